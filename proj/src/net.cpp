#include "phddpg/net.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace phddpg {

const char* to_string(Turn t) {
    switch (t) {
        case Turn::Left: return "left";
        case Turn::Through: return "through";
        case Turn::Right: return "right";
    }
    return "?";
}

const char* to_string(Dir d) {
    switch (d) {
        case Dir::N: return "N";
        case Dir::E: return "E";
        case Dir::S: return "S";
        case Dir::W: return "W";
    }
    return "?";
}

Turn turn_from(const std::string& s) {
    if (s == "left") return Turn::Left;
    if (s == "through" || s == "straight") return Turn::Through;
    if (s == "right") return Turn::Right;
    throw ValidationError("unknown turn: " + s);
}

Dir dir_from(const std::string& s) {
    if (s == "N") return Dir::N;
    if (s == "E") return Dir::E;
    if (s == "S") return Dir::S;
    if (s == "W") return Dir::W;
    throw ValidationError("unknown direction: " + s);
}

Dir opposite(Dir d) {
    switch (d) {
        case Dir::N: return Dir::S;
        case Dir::S: return Dir::N;
        case Dir::E: return Dir::W;
        case Dir::W: return Dir::E;
    }
    return Dir::N;
}

Dir exit_direction(Dir approach, Turn turn) {
    if (turn == Turn::Through) return opposite(approach);
    // Right-hand traffic: coming from the north and heading south, a left
    // turn exits east and a right turn exits west; rotate for the rest.
    switch (approach) {
        case Dir::N: return turn == Turn::Left ? Dir::E : Dir::W;
        case Dir::S: return turn == Turn::Left ? Dir::W : Dir::E;
        case Dir::E: return turn == Turn::Left ? Dir::S : Dir::N;
        case Dir::W: return turn == Turn::Left ? Dir::N : Dir::S;
    }
    return Dir::N;
}

bool movements_conflict(Dir a1, Turn t1, Dir a2, Turn t2) {
    if (a1 == a2) return false;
    const bool r1 = t1 == Turn::Right;
    const bool r2 = t2 == Turn::Right;
    if (r1 && r2) return false;
    if (r1) return t2 == Turn::Through && exit_direction(a1, t1) == exit_direction(a2, t2);
    if (r2) return t1 == Turn::Through && exit_direction(a2, t2) == exit_direction(a1, t1);
    if (a1 == opposite(a2)) return t1 != t2;  // opposing left crosses opposing through
    return true;                              // crossing streets always conflict
}

bool movements_conflict(const RoadNetwork& net, int m1, int m2) {
    const Movement& a = net.movements[m1];
    const Movement& b = net.movements[m2];
    return movements_conflict(a.approach, a.turn, b.approach, b.turn);
}

Dir RoadNetwork::lane_approach(int lane) const {
    const Lane& l = lanes[lane];
    const NetNode& a = nodes[l.from_node];
    const NetNode& b = nodes[l.to_node];
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    if (std::abs(dy) >= std::abs(dx)) return dy > 0 ? Dir::N : Dir::S;
    return dx > 0 ? Dir::E : Dir::W;
}

namespace {

void validate_phase_set(const RoadNetwork& net, const Intersection& inter, const PhaseSet& ps) {
    const int k = ps.size();
    if (k < 2) throw ValidationError("intersection " + inter.id + ": K < 2 phases");
    if (ps.cycle_order.size() != static_cast<size_t>(k))
        throw ValidationError("intersection " + inter.id + ": cycle_order size != K");
    std::vector<bool> seen(k, false);
    for (int c : ps.cycle_order) {
        if (c < 0 || c >= k || seen[c])
            throw ValidationError("intersection " + inter.id + ": cycle_order is not a permutation");
        seen[c] = true;
    }
    std::set<int> covered;
    for (const Phase& p : ps.phases) {
        for (size_t i = 0; i < p.movements.size(); ++i) {
            int mi = p.movements[i];
            if (mi < 0 || mi >= static_cast<int>(net.movements.size()))
                throw ValidationError("intersection " + inter.id + ": phase references unknown movement");
            const Movement& m = net.movements[mi];
            if (m.intersection != inter.index)
                throw ValidationError("intersection " + inter.id +
                                      ": phase references a movement of another intersection");
            if (m.turn == Turn::Right)
                throw ValidationError("intersection " + inter.id +
                                      ": right movements are always permitted and may not join a phase");
            covered.insert(mi);
            for (size_t j = i + 1; j < p.movements.size(); ++j) {
                if (movements_conflict(net, mi, p.movements[j])) {
                    std::ostringstream os;
                    os << "intersection " << inter.id << ": conflicting movements in phase " << p.id
                       << " (" << to_string(net.movements[mi].approach) << "-"
                       << to_string(net.movements[mi].turn) << " vs "
                       << to_string(net.movements[p.movements[j]].approach) << "-"
                       << to_string(net.movements[p.movements[j]].turn) << ")";
                    throw ValidationError(os.str());
                }
            }
        }
    }
    for (const Movement& m : net.movements) {
        if (m.intersection != inter.index || m.turn == Turn::Right) continue;
        if (!covered.count(m.index))
            throw ValidationError("intersection " + inter.id + ": movement " + std::to_string(m.index) +
                                  " (" + std::string(to_string(m.approach)) + "-" + to_string(m.turn) +
                                  ") appears in no phase");
    }
}

// Member movements' source lanes as positions within entry_lanes.
std::vector<std::vector<int>> lane_groups(const RoadNetwork& net, const Intersection& inter) {
    std::vector<std::vector<int>> groups;
    for (const Phase& p : inter.phase_set.phases) {
        std::vector<int> g;
        for (int mi : p.movements) {
            int from = net.movements[mi].from_lane;
            auto it = std::find(inter.entry_lanes.begin(), inter.entry_lanes.end(), from);
            if (it == inter.entry_lanes.end())
                throw ValidationError("intersection " + inter.id + ": phase source lane is not an entry lane");
            g.push_back(static_cast<int>(it - inter.entry_lanes.begin()));
        }
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        groups.push_back(std::move(g));
    }
    return groups;
}

}  // namespace

PhaseSet default_phase_set(const RoadNetwork& net, int intersection, int phase_count) {
    const Intersection& inter = net.intersections[intersection];
    // Group this intersection's non-right movements by (approach, turn).
    std::map<std::pair<int, int>, std::vector<int>> groups;
    std::set<int> approaches;
    for (const Movement& m : net.movements) {
        if (m.intersection != inter.index) continue;
        approaches.insert(static_cast<int>(m.approach));
        if (m.turn == Turn::Right) continue;
        groups[{static_cast<int>(m.approach), static_cast<int>(m.turn)}].push_back(m.index);
    }
    if (approaches.size() != 4)
        throw ValidationError("intersection " + inter.id +
                              ": default phase set requires the standard 4-approach layout");
    auto group = [&](Dir d, Turn t) -> const std::vector<int>& {
        auto it = groups.find({static_cast<int>(d), static_cast<int>(t)});
        if (it == groups.end() || it->second.empty())
            throw ValidationError("intersection " + inter.id + ": missing " +
                                  std::string(to_string(d)) + "-" + to_string(t) +
                                  " movements for the default phase set");
        return it->second;
    };
    auto join = [&](std::initializer_list<std::pair<Dir, Turn>> parts) {
        std::vector<int> ms;
        for (auto [d, t] : parts) {
            const auto& g = group(d, t);
            ms.insert(ms.end(), g.begin(), g.end());
        }
        std::sort(ms.begin(), ms.end());
        return ms;
    };

    PhaseSet ps;
    if (phase_count == 4) {
        ps.phases = {{0, join({{Dir::N, Turn::Through}, {Dir::S, Turn::Through}})},
                     {1, join({{Dir::N, Turn::Left}, {Dir::S, Turn::Left}})},
                     {2, join({{Dir::E, Turn::Through}, {Dir::W, Turn::Through}})},
                     {3, join({{Dir::E, Turn::Left}, {Dir::W, Turn::Left}})}};
    } else if (phase_count == 8) {
        int id = 0;
        for (Dir d : {Dir::N, Dir::E, Dir::S, Dir::W})
            for (Turn t : {Turn::Through, Turn::Left}) ps.phases.push_back({id++, join({{d, t}})});
    } else {
        throw ValidationError("default phase set supports 4 or 8 phases, got " +
                              std::to_string(phase_count));
    }
    ps.cycle_order.resize(ps.phases.size());
    for (size_t i = 0; i < ps.cycle_order.size(); ++i) ps.cycle_order[i] = static_cast<int>(i);
    return ps;
}

RoadNetwork build_network(const NetworkSpec& spec) {
    RoadNetwork net;

    for (const IntersectionSpec& is : spec.intersections) {
        if (net.node_by_id.count(is.id)) throw ValidationError("duplicate intersection id: " + is.id);
        NetNode n;
        n.index = static_cast<int>(net.nodes.size());
        n.id = is.id;
        n.x = is.x;
        n.y = is.y;
        n.is_signal = !is.is_virtual;
        net.node_by_id[n.id] = n.index;
        net.nodes.push_back(n);
    }

    for (const RoadSpec& rs : spec.roads) {
        if (net.road_by_id.count(rs.id)) throw ValidationError("duplicate road id: " + rs.id);
        auto from = net.node_by_id.find(rs.from);
        auto to = net.node_by_id.find(rs.to);
        if (from == net.node_by_id.end() || to == net.node_by_id.end())
            throw ValidationError("road " + rs.id + ": unknown endpoint node");
        if (rs.lanes.empty()) throw ValidationError("road " + rs.id + ": no lanes");
        Road r;
        r.index = static_cast<int>(net.roads.size());
        r.id = rs.id;
        r.from_node = from->second;
        r.to_node = to->second;
        for (size_t li = 0; li < rs.lanes.size(); ++li) {
            if (rs.lanes[li].length <= 0)
                throw ValidationError("road " + rs.id + ": lane length must be positive");
            Lane l;
            l.index = static_cast<int>(net.lanes.size());
            l.id = rs.id + "_" + std::to_string(li);
            l.length = rs.lanes[li].length;
            l.road = r.index;
            l.lane_index = static_cast<int>(li);
            l.from_node = r.from_node;
            l.to_node = r.to_node;
            net.lane_by_id[l.id] = l.index;
            r.lanes.push_back(l.index);
            net.lanes.push_back(l);
        }
        net.road_by_id[r.id] = r.index;
        net.roads.push_back(r);
    }

    // Signalized intersections get their slot before movements resolve, so
    // movements can point at them.
    for (const NetNode& n : net.nodes) {
        if (!n.is_signal) continue;
        Intersection inter;
        inter.index = static_cast<int>(net.intersections.size());
        inter.node = n.index;
        inter.id = n.id;
        inter.x = n.x;
        inter.y = n.y;
        net.nodes[n.index].intersection = inter.index;
        net.intersections.push_back(inter);
    }

    for (const MovementSpec& ms : spec.movements) {
        auto from = net.lane_by_id.find(ms.from_lane);
        auto to = net.lane_by_id.find(ms.to_lane);
        if (from == net.lane_by_id.end())
            throw ValidationError("movement: dangling lane reference " + ms.from_lane);
        if (to == net.lane_by_id.end())
            throw ValidationError("movement: dangling lane reference " + ms.to_lane);
        Movement m;
        m.index = static_cast<int>(net.movements.size());
        m.from_lane = from->second;
        m.to_lane = to->second;
        m.turn = ms.turn;
        const Lane& fl = net.lanes[m.from_lane];
        m.intersection = net.nodes[fl.to_node].intersection;
        m.approach = net.lane_approach(m.from_lane);
        m.exit = exit_direction(m.approach, m.turn);
        if (net.movement_by_lanes.count({m.from_lane, m.to_lane}))
            throw ValidationError("duplicate movement " + ms.from_lane + " -> " + ms.to_lane);
        net.movement_by_lanes[{m.from_lane, m.to_lane}] = m.index;
        net.movements.push_back(m);
    }

    for (size_t spec_i = 0, inter_i = 0; spec_i < spec.intersections.size(); ++spec_i) {
        const IntersectionSpec& is = spec.intersections[spec_i];
        if (is.is_virtual) continue;
        Intersection& inter = net.intersections[inter_i++];

        // Entry lanes ordered (approach N,E,S,W; road id; lane index).
        std::vector<std::tuple<int, std::string, int, int>> order;
        for (const Lane& l : net.lanes) {
            if (l.to_node != inter.node) continue;
            order.emplace_back(static_cast<int>(net.lane_approach(l.index)), net.roads[l.road].id,
                               l.lane_index, l.index);
        }
        std::sort(order.begin(), order.end());
        for (const auto& t : order) inter.entry_lanes.push_back(std::get<3>(t));

        if (is.phases) {
            PhaseSet ps;
            for (size_t pi = 0; pi < is.phases->size(); ++pi)
                ps.phases.push_back({static_cast<int>(pi), (*is.phases)[pi]});
            ps.cycle_order.resize(ps.phases.size());
            for (size_t i = 0; i < ps.cycle_order.size(); ++i) ps.cycle_order[i] = static_cast<int>(i);
            inter.phase_set = std::move(ps);
        } else {
            inter.phase_set = default_phase_set(net, inter.index, is.phase_count);
        }
        validate_phase_set(net, inter, inter.phase_set);
        inter.phase_lane_groups = lane_groups(net, inter);
    }

    // Neighbor map from roads joining two signalized intersections.
    for (const Road& r : net.roads) {
        const NetNode& a = net.nodes[r.from_node];
        const NetNode& b = net.nodes[r.to_node];
        if (!a.is_signal || !b.is_signal) continue;
        const double dist = std::hypot(a.x - b.x, a.y - b.y);
        auto dir_of = [](const NetNode& from, const NetNode& to) {
            const double dx = to.x - from.x;
            const double dy = to.y - from.y;
            if (std::abs(dy) >= std::abs(dx)) return dy > 0 ? Dir::N : Dir::S;
            return dx > 0 ? Dir::E : Dir::W;
        };
        auto add = [&](int of_node, int nb_node) {
            Intersection& inter = net.intersections[net.nodes[of_node].intersection];
            int nb = net.nodes[nb_node].intersection;
            for (const Neighbor& n : inter.neighbors)
                if (n.intersection == nb) return;
            inter.neighbors.push_back({nb, dir_of(net.nodes[of_node], net.nodes[nb_node]), dist});
        };
        add(r.from_node, r.to_node);
        add(r.to_node, r.from_node);
    }

    return net;
}

RouteCheck validate_route(const RoadNetwork& net, const std::vector<int>& route) {
    for (int lane : route) {
        if (lane < 0 || lane >= static_cast<int>(net.lanes.size()))
            return {false, 0, "route references unknown lane"};
    }
    for (size_t i = 0; i + 1 < route.size(); ++i) {
        if (net.find_movement(route[i], route[i + 1])) continue;
        const Lane& cur = net.lanes[route[i]];
        const Lane& nxt = net.lanes[route[i + 1]];
        const bool continuation = cur.to_node == nxt.from_node && !net.nodes[cur.to_node].is_signal;
        if (!continuation) {
            return {false, static_cast<int>(i),
                    "broken link at position " + std::to_string(i) + ": " + cur.id + " -> " + nxt.id};
        }
    }
    return {};
}

}  // namespace phddpg
