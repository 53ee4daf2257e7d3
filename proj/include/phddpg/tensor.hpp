#pragma once

// Reverse-mode differentiable computation on small dense matrices.
// Values are computed eagerly when an op is recorded on the tape;
// backward() replays the tape in reverse. Shapes are (rows, cols),
// row-major; vectors are (n,1) columns unless noted.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace phddpg::ad {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
struct MatT {
    int rows = 0;
    int cols = 0;
    std::vector<T> v;

    MatT() = default;
    MatT(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, T(0)) {}

    static MatT from(int r, int c, std::vector<T> data) {
        if (static_cast<size_t>(r) * c != data.size())
            throw ShapeError("MatT::from: data size does not match shape");
        MatT m;
        m.rows = r;
        m.cols = c;
        m.v = std::move(data);
        return m;
    }
    static MatT column(const std::vector<T>& data) {
        return from(static_cast<int>(data.size()), 1, data);
    }

    T& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    T at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }
    void fill(T x) { std::fill(v.begin(), v.end(), x); }
};

using Mat = MatT<double>;

enum class Init { Uniform, Zero };

// Named parameter tensors with deterministic iteration order and a
// seedable fan-in initializer. Gradients live alongside the values so
// several tapes/backward passes can accumulate into them.
template <typename T>
struct ParamSetT {
    std::vector<std::string> names;
    std::vector<MatT<T>> values;
    std::vector<MatT<T>> grads;
    std::map<std::string, int> index;

    int add(const std::string& name, int rows, int cols, Init init, std::mt19937_64& rng) {
        if (index.count(name)) throw std::runtime_error("ParamSet: duplicate name " + name);
        MatT<T> m(rows, cols);
        if (init == Init::Uniform) {
            const T bound = T(1) / std::sqrt(T(rows));
            std::uniform_real_distribution<double> d(-double(bound), double(bound));
            for (auto& x : m.v) x = T(d(rng));
        }
        int id = static_cast<int>(values.size());
        names.push_back(name);
        values.push_back(std::move(m));
        grads.emplace_back(rows, cols);
        index[name] = id;
        return id;
    }

    bool has(const std::string& name) const { return index.count(name) != 0; }
    MatT<T>& value(const std::string& name) { return values[at(name)]; }
    const MatT<T>& value(const std::string& name) const { return values[at(name)]; }
    MatT<T>& grad(const std::string& name) { return grads[at(name)]; }

    int at(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) throw std::runtime_error("ParamSet: unknown name " + name);
        return it->second;
    }

    void zero_grad() {
        for (auto& g : grads) g.fill(T(0));
    }

    size_t total_params() const {
        size_t n = 0;
        for (const auto& m : values) n += m.size();
        return n;
    }

    // Elementwise convex blend: this = tau * online + (1 - tau) * this.
    void soft_update_from(const ParamSetT& online, T tau) {
        if (names != online.names) throw ShapeError("soft_update: parameter sets differ");
        for (size_t i = 0; i < values.size(); ++i) {
            if (values[i].rows != online.values[i].rows || values[i].cols != online.values[i].cols)
                throw ShapeError("soft_update: shape mismatch at " + names[i]);
            if (tau == T(1)) {
                values[i].v = online.values[i].v;
            } else if (tau != T(0)) {
                for (size_t j = 0; j < values[i].v.size(); ++j)
                    values[i].v[j] = tau * online.values[i].v[j] + (T(1) - tau) * values[i].v[j];
            }
        }
    }
};

using ParamSet = ParamSetT<double>;

using NodeId = int;

template <typename T>
class TapeT {
public:
    TapeT() = default;
    TapeT(const TapeT&) = delete;
    TapeT& operator=(const TapeT&) = delete;

    // --- graph construction -------------------------------------------------

    NodeId input(MatT<T> m, bool needs_grad = false) {
        NodeId id = alloc();
        node(id).val = std::move(m);
        node(id).track = needs_grad;
        if (needs_grad) node(id).grad = MatT<T>(node(id).val.rows, node(id).val.cols);
        return id;
    }

    NodeId scalar(T x) { return input(MatT<T>::from(1, 1, {x})); }

    // Binds a parameter tensor; gradients accumulate directly into ps.grads.
    NodeId param(ParamSetT<T>& ps, const std::string& name) {
        int pi = ps.at(name);
        NodeId id = alloc();
        node(id).ext_val = &ps.values[pi];
        node(id).ext_grad = &ps.grads[pi];
        node(id).track = true;
        return id;
    }

    const MatT<T>& val(NodeId id) const {
        const Node& n = nodes_[id];
        return n.ext_val ? *n.ext_val : n.val;
    }
    MatT<T>& grad(NodeId id) {
        Node& n = nodes_[id];
        return n.ext_grad ? *n.ext_grad : n.grad;
    }

    // --- ops ----------------------------------------------------------------

    NodeId matmul(NodeId a, NodeId b) {
        const auto& A = val(a);
        const auto& B = val(b);
        if (A.cols != B.rows) throw ShapeError("matmul: inner dimensions differ");
        MatT<T> C(A.rows, B.cols);
        gemm(A, B, C);
        NodeId id = emit(std::move(C), {a, b});
        node(id).back = [this, id, a, b] {
            const auto& G = grad(id);
            const auto& A = val(a);
            const auto& B = val(b);
            if (tracked(a)) {  // dA += G * B^T
                auto& GA = grad(a);
                for (int i = 0; i < A.rows; ++i)
                    for (int k = 0; k < B.cols; ++k) {
                        const T g = G.at(i, k);
                        if (g == T(0)) continue;
                        for (int j = 0; j < A.cols; ++j) GA.at(i, j) += g * B.at(j, k);
                    }
            }
            if (tracked(b)) {  // dB += A^T * G
                auto& GB = grad(b);
                for (int i = 0; i < A.rows; ++i)
                    for (int j = 0; j < A.cols; ++j) {
                        const T x = A.at(i, j);
                        if (x == T(0)) continue;
                        for (int k = 0; k < B.cols; ++k) GB.at(j, k) += x * G.at(i, k);
                    }
            }
        };
        return id;
    }

    NodeId transpose(NodeId a) {
        const auto& A = val(a);
        MatT<T> C(A.cols, A.rows);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            auto& GA = grad(a);
            for (int i = 0; i < G.rows; ++i)
                for (int j = 0; j < G.cols; ++j) GA.at(j, i) += G.at(i, j);
        };
        return id;
    }

    // X (m,n) * W (n,p) + row-broadcast b (1,p)
    NodeId dense(NodeId x, NodeId w, NodeId b) {
        const auto& X = val(x);
        const auto& W = val(w);
        const auto& B = val(b);
        if (X.cols != W.rows) throw ShapeError("dense: input width does not match weight rows");
        if (B.rows != 1 || B.cols != W.cols) throw ShapeError("dense: bias must be (1, out)");
        MatT<T> C(X.rows, W.cols);
        gemm(X, W, C);
        for (int i = 0; i < C.rows; ++i)
            for (int j = 0; j < C.cols; ++j) C.at(i, j) += B.at(0, j);
        NodeId id = emit(std::move(C), {x, w, b});
        node(id).back = [this, id, x, w, b] {
            const auto& G = grad(id);
            const auto& X = val(x);
            const auto& W = val(w);
            if (tracked(x)) {
                auto& GX = grad(x);
                for (int i = 0; i < X.rows; ++i)
                    for (int k = 0; k < W.cols; ++k) {
                        const T g = G.at(i, k);
                        if (g == T(0)) continue;
                        for (int j = 0; j < X.cols; ++j) GX.at(i, j) += g * W.at(j, k);
                    }
            }
            if (tracked(w)) {
                auto& GW = grad(w);
                for (int i = 0; i < X.rows; ++i)
                    for (int j = 0; j < X.cols; ++j) {
                        const T xv = X.at(i, j);
                        if (xv == T(0)) continue;
                        for (int k = 0; k < W.cols; ++k) GW.at(j, k) += xv * G.at(i, k);
                    }
            }
            if (tracked(b)) {
                auto& GB = grad(b);
                for (int i = 0; i < G.rows; ++i)
                    for (int j = 0; j < G.cols; ++j) GB.at(0, j) += G.at(i, j);
            }
        };
        return id;
    }

    NodeId relu(NodeId a) {
        MatT<T> C = val(a);
        for (auto& x : C.v) x = x > T(0) ? x : T(0);
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            const auto& A = val(a);
            auto& GA = grad(a);
            for (size_t i = 0; i < A.v.size(); ++i)
                if (A.v[i] > T(0)) GA.v[i] += G.v[i];
        };
        return id;
    }

    NodeId sigmoid(NodeId a) {
        MatT<T> C = val(a);
        for (auto& x : C.v) x = T(1) / (T(1) + std::exp(-x));
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            const auto& Y = val(id);
            auto& GA = grad(a);
            for (size_t i = 0; i < Y.v.size(); ++i) GA.v[i] += G.v[i] * Y.v[i] * (T(1) - Y.v[i]);
        };
        return id;
    }

    // Row-wise softmax (normalizes along columns within each row).
    NodeId softmax_rows(NodeId a) {
        MatT<T> C = val(a);
        for (int i = 0; i < C.rows; ++i) {
            T mx = C.at(i, 0);
            for (int j = 1; j < C.cols; ++j) mx = std::max(mx, C.at(i, j));
            T sum = T(0);
            for (int j = 0; j < C.cols; ++j) {
                T e = std::exp(C.at(i, j) - mx);
                C.at(i, j) = e;
                sum += e;
            }
            for (int j = 0; j < C.cols; ++j) C.at(i, j) /= sum;
        }
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            const auto& Y = val(id);
            auto& GA = grad(a);
            for (int i = 0; i < Y.rows; ++i) {
                T dot = T(0);
                for (int j = 0; j < Y.cols; ++j) dot += G.at(i, j) * Y.at(i, j);
                for (int j = 0; j < Y.cols; ++j) GA.at(i, j) += Y.at(i, j) * (G.at(i, j) - dot);
            }
        };
        return id;
    }

    NodeId add(NodeId a, NodeId b) {
        const auto& A = val(a);
        const auto& B = val(b);
        same_shape(A, B, "add");
        MatT<T> C = A;
        for (size_t i = 0; i < C.v.size(); ++i) C.v[i] += B.v[i];
        NodeId id = emit(std::move(C), {a, b});
        node(id).back = [this, id, a, b] {
            const auto& G = grad(id);
            if (tracked(a)) {
                auto& GA = grad(a);
                for (size_t i = 0; i < G.v.size(); ++i) GA.v[i] += G.v[i];
            }
            if (tracked(b)) {
                auto& GB = grad(b);
                for (size_t i = 0; i < G.v.size(); ++i) GB.v[i] += G.v[i];
            }
        };
        return id;
    }

    NodeId sub(NodeId a, NodeId b) {
        const auto& A = val(a);
        const auto& B = val(b);
        same_shape(A, B, "sub");
        MatT<T> C = A;
        for (size_t i = 0; i < C.v.size(); ++i) C.v[i] -= B.v[i];
        NodeId id = emit(std::move(C), {a, b});
        node(id).back = [this, id, a, b] {
            const auto& G = grad(id);
            if (tracked(a)) {
                auto& GA = grad(a);
                for (size_t i = 0; i < G.v.size(); ++i) GA.v[i] += G.v[i];
            }
            if (tracked(b)) {
                auto& GB = grad(b);
                for (size_t i = 0; i < G.v.size(); ++i) GB.v[i] -= G.v[i];
            }
        };
        return id;
    }

    NodeId square(NodeId a) {
        MatT<T> C = val(a);
        for (auto& x : C.v) x = x * x;
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            const auto& A = val(a);
            auto& GA = grad(a);
            for (size_t i = 0; i < A.v.size(); ++i) GA.v[i] += T(2) * A.v[i] * G.v[i];
        };
        return id;
    }

    // Elementwise y = k * x + c with scalar constants.
    NodeId scale_shift(NodeId a, T k, T c) {
        MatT<T> C = val(a);
        for (auto& x : C.v) x = k * x + c;
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a, k] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            auto& GA = grad(a);
            for (size_t i = 0; i < G.v.size(); ++i) GA.v[i] += k * G.v[i];
        };
        return id;
    }

    // alpha * A + (1 - alpha) * B. The boundary cases pass the untouched
    // operand through bit-exactly.
    NodeId affine_mix(T alpha, NodeId a, NodeId b) {
        const auto& A = val(a);
        const auto& B = val(b);
        same_shape(A, B, "affine_mix");
        MatT<T> C(A.rows, A.cols);
        if (alpha == T(1)) {
            C.v = A.v;
        } else if (alpha == T(0)) {
            C.v = B.v;
        } else {
            for (size_t i = 0; i < C.v.size(); ++i) C.v[i] = alpha * A.v[i] + (T(1) - alpha) * B.v[i];
        }
        NodeId id = emit(std::move(C), {a, b});
        node(id).back = [this, id, a, b, alpha] {
            const auto& G = grad(id);
            if (tracked(a) && alpha != T(0)) {
                auto& GA = grad(a);
                for (size_t i = 0; i < G.v.size(); ++i) GA.v[i] += alpha * G.v[i];
            }
            if (tracked(b) && alpha != T(1)) {
                auto& GB = grad(b);
                for (size_t i = 0; i < G.v.size(); ++i) GB.v[i] += (T(1) - alpha) * G.v[i];
            }
        };
        return id;
    }

    NodeId concat_cols(const std::vector<NodeId>& parts) {
        if (parts.empty()) throw ShapeError("concat_cols: empty");
        int rows = val(parts[0]).rows;
        int cols = 0;
        for (NodeId p : parts) {
            if (val(p).rows != rows) throw ShapeError("concat_cols: row count differs");
            cols += val(p).cols;
        }
        MatT<T> C(rows, cols);
        int off = 0;
        for (NodeId p : parts) {
            const auto& P = val(p);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < P.cols; ++j) C.at(i, off + j) = P.at(i, j);
            off += P.cols;
        }
        NodeId id = emit(std::move(C), parts);
        node(id).back = [this, id, parts] {
            const auto& G = grad(id);
            int off = 0;
            for (NodeId p : parts) {
                const int pc = val(p).cols;
                if (tracked(p)) {
                    auto& GP = grad(p);
                    for (int i = 0; i < G.rows; ++i)
                        for (int j = 0; j < pc; ++j) GP.at(i, j) += G.at(i, off + j);
                }
                off += pc;
            }
        };
        return id;
    }

    // out[k, :] = mean over i in groups[k] of X[i, :].
    NodeId row_group_mean(NodeId x, std::vector<std::vector<int>> groups) {
        const auto& X = val(x);
        MatT<T> C(static_cast<int>(groups.size()), X.cols);
        for (size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].empty()) throw ShapeError("row_group_mean: empty group");
            for (int i : groups[k]) {
                if (i < 0 || i >= X.rows) throw ShapeError("row_group_mean: row index out of range");
                for (int j = 0; j < X.cols; ++j) C.at(static_cast<int>(k), j) += X.at(i, j);
            }
            for (int j = 0; j < X.cols; ++j) C.at(static_cast<int>(k), j) /= T(groups[k].size());
        }
        NodeId id = emit(std::move(C), {x});
        node(id).back = [this, id, x, groups = std::move(groups)] {
            if (!tracked(x)) return;
            const auto& G = grad(id);
            auto& GX = grad(x);
            for (size_t k = 0; k < groups.size(); ++k) {
                const T inv = T(1) / T(groups[k].size());
                for (int i : groups[k])
                    for (int j = 0; j < G.cols; ++j) GX.at(i, j) += inv * G.at(static_cast<int>(k), j);
            }
        };
        return id;
    }

    NodeId mean_rows(NodeId a) {
        const auto& A = val(a);
        MatT<T> C(1, A.cols);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < A.cols; ++j) C.at(0, j) += A.at(i, j);
        for (int j = 0; j < A.cols; ++j) C.at(0, j) /= T(A.rows);
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            const auto& A = val(a);
            auto& GA = grad(a);
            const T inv = T(1) / T(A.rows);
            for (int i = 0; i < A.rows; ++i)
                for (int j = 0; j < A.cols; ++j) GA.at(i, j) += inv * G.at(0, j);
        };
        return id;
    }

    NodeId broadcast_rows(NodeId a, int rows) {
        const auto& A = val(a);
        if (A.rows != 1) throw ShapeError("broadcast_rows: input must have one row");
        MatT<T> C(rows, A.cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(0, j);
        NodeId id = emit(std::move(C), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const auto& G = grad(id);
            auto& GA = grad(a);
            for (int i = 0; i < G.rows; ++i)
                for (int j = 0; j < G.cols; ++j) GA.at(0, j) += G.at(i, j);
        };
        return id;
    }

    NodeId pick(NodeId a, int r, int c) {
        const auto& A = val(a);
        if (r < 0 || r >= A.rows || c < 0 || c >= A.cols) throw ShapeError("pick: index out of range");
        NodeId id = emit(MatT<T>::from(1, 1, {A.at(r, c)}), {a});
        node(id).back = [this, id, a, r, c] {
            if (!tracked(a)) return;
            grad(a).at(r, c) += grad(id).at(0, 0);
        };
        return id;
    }

    NodeId sum_all(NodeId a) {
        const auto& A = val(a);
        T s = T(0);
        for (T x : A.v) s += x;
        NodeId id = emit(MatT<T>::from(1, 1, {s}), {a});
        node(id).back = [this, id, a] {
            if (!tracked(a)) return;
            const T g = grad(id).at(0, 0);
            auto& GA = grad(a);
            for (auto& x : GA.v) x += g;
        };
        return id;
    }

    // Mean of scalar (1,1) nodes; used for batch losses.
    NodeId mean_of(const std::vector<NodeId>& xs) {
        if (xs.empty()) throw ShapeError("mean_of: empty");
        T s = T(0);
        for (NodeId x : xs) {
            if (val(x).rows != 1 || val(x).cols != 1) throw ShapeError("mean_of: non-scalar input");
            s += val(x).at(0, 0);
        }
        s /= T(xs.size());
        NodeId id = emit(MatT<T>::from(1, 1, {s}), xs);
        node(id).back = [this, id, xs] {
            const T g = grad(id).at(0, 0) / T(xs.size());
            for (NodeId x : xs)
                if (tracked(x)) grad(x).at(0, 0) += g;
        };
        return id;
    }

    // Softmax(Q K^T / sqrt(d_k)) V
    NodeId scaled_dot_attention(NodeId q, NodeId k, NodeId v, int d_k) {
        NodeId scores = scale_shift(matmul(q, transpose(k)), T(1) / std::sqrt(T(d_k)), T(0));
        return matmul(softmax_rows(scores), v);
    }

    // --- execution ----------------------------------------------------------

    // Seeds d(out)/d(out) (all ones unless a seed matrix is given) and
    // accumulates gradients down the tape. Parameter gradients accumulate
    // into the bound ParamSet.
    void backward(NodeId out, const MatT<T>* seed = nullptr) {
        auto& g = grad(out);
        if (seed) {
            if (seed->rows != g.rows || seed->cols != g.cols) throw ShapeError("backward: bad seed shape");
            for (size_t i = 0; i < g.v.size(); ++i) g.v[i] += seed->v[i];
        } else {
            for (auto& x : g.v) x += T(1);
        }
        for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
            if (nodes_[i].back && nodes_[i].track) nodes_[i].back();
    }

    // Zeroes gradients of tape-owned nodes (not bound parameters).
    void zero_node_grads() {
        for (auto& n : nodes_)
            if (!n.ext_grad) n.grad.fill(T(0));
    }

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        MatT<T> val;
        MatT<T> grad;
        MatT<T>* ext_val = nullptr;
        MatT<T>* ext_grad = nullptr;
        bool track = false;
        std::function<void()> back;
    };

    std::vector<Node> nodes_;

    Node& node(NodeId id) { return nodes_[id]; }
    bool tracked(NodeId id) const { return nodes_[id].track; }

    NodeId alloc() {
        nodes_.emplace_back();
        return static_cast<int>(nodes_.size()) - 1;
    }

    NodeId emit(MatT<T> v, const std::vector<NodeId>& parents) {
        NodeId id = alloc();
        Node& n = node(id);
        n.grad = MatT<T>(v.rows, v.cols);
        n.val = std::move(v);
        for (NodeId p : parents)
            if (nodes_[p].track) {
                n.track = true;
                break;
            }
        return id;
    }

    static void gemm(const MatT<T>& A, const MatT<T>& B, MatT<T>& C) {
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < A.cols; ++j) {
                const T x = A.at(i, j);
                if (x == T(0)) continue;
                const T* brow = &B.v[static_cast<size_t>(j) * B.cols];
                T* crow = &C.v[static_cast<size_t>(i) * C.cols];
                for (int k = 0; k < B.cols; ++k) crow[k] += x * brow[k];
            }
    }

    static void same_shape(const MatT<T>& A, const MatT<T>& B, const char* op) {
        if (A.rows != B.rows || A.cols != B.cols)
            throw ShapeError(std::string(op) + ": shape mismatch");
    }
};

using Tape = TapeT<double>;

// Max over parameter elements of |analytic - central difference| /
// max(1e-8, |analytic| + |numeric|). The builder must construct a scalar
// graph from the current parameter values.
template <typename T>
double gradient_check(const std::function<NodeId(TapeT<T>&)>& build, ParamSetT<T>& params,
                      double eps = 1e-5) {
    params.zero_grad();
    {
        TapeT<T> tape;
        NodeId out = build(tape);
        if (tape.val(out).rows != 1 || tape.val(out).cols != 1)
            throw ShapeError("gradient_check: graph must be scalar-valued");
        tape.backward(out);
    }
    auto eval = [&]() -> double {
        TapeT<T> tape;
        NodeId out = build(tape);
        double y = double(tape.val(out).at(0, 0));
        if (!std::isfinite(y)) throw std::runtime_error("gradient_check: non-finite value");
        return y;
    };
    double worst = 0.0;
    for (size_t pi = 0; pi < params.values.size(); ++pi) {
        auto& value = params.values[pi];
        const auto& agrad = params.grads[pi];
        for (size_t e = 0; e < value.v.size(); ++e) {
            const T keep = value.v[e];
            value.v[e] = keep + T(eps);
            const double up = eval();
            value.v[e] = keep - T(eps);
            const double dn = eval();
            value.v[e] = keep;
            const double numeric = (up - dn) / (2.0 * eps);
            const double analytic = double(agrad.v[e]);
            if (!std::isfinite(numeric)) throw std::runtime_error("gradient_check: non-finite difference");
            const double rel =
                std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

// Adam with bias correction; moments are kept per parameter tensor and
// keyed by position, so the optimizer must always see the same ParamSet.
template <typename T>
struct AdamT {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long t = 0;
    std::vector<MatT<T>> m, v;

    explicit AdamT(double lr_ = 1e-3) : lr(lr_) {}

    void step(ParamSetT<T>& ps) {
        if (m.empty()) {
            for (const auto& p : ps.values) {
                m.emplace_back(p.rows, p.cols);
                v.emplace_back(p.rows, p.cols);
            }
        }
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, double(t));
        const double bc2 = 1.0 - std::pow(beta2, double(t));
        for (size_t i = 0; i < ps.values.size(); ++i) {
            auto& val = ps.values[i].v;
            auto& gr = ps.grads[i].v;
            auto& mi = m[i].v;
            auto& vi = v[i].v;
            for (size_t j = 0; j < val.size(); ++j) {
                const double g = double(gr[j]);
                mi[j] = T(beta1 * double(mi[j]) + (1.0 - beta1) * g);
                vi[j] = T(beta2 * double(vi[j]) + (1.0 - beta2) * g * g);
                const double mhat = double(mi[j]) / bc1;
                const double vhat = double(vi[j]) / bc2;
                val[j] -= T(lr * mhat / (std::sqrt(vhat) + eps));
            }
        }
    }
};

using Adam = AdamT<double>;

}  // namespace phddpg::ad
