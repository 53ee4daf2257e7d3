#include "phddpg/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace phddpg {

MaskStrategy mask_strategy_from(const std::string& s) {
    if (s == "gaussian") return MaskStrategy::Gaussian;
    if (s == "mean") return MaskStrategy::Mean;
    if (s == "zero") return MaskStrategy::Zero;
    if (s == "none") return MaskStrategy::None;
    throw std::runtime_error("unknown mask strategy: " + s);
}

std::string to_string(MaskStrategy m) {
    switch (m) {
        case MaskStrategy::Gaussian: return "gaussian";
        case MaskStrategy::Mean: return "mean";
        case MaskStrategy::Zero: return "zero";
        case MaskStrategy::None: return "none";
    }
    return "?";
}

Variant variant_from(const std::string& s) {
    if (s == "full") return Variant::Full;
    if (s == "cycle") return Variant::Cycle;
    if (s == "conservative") return Variant::Conservative;
    if (s == "conservative_cycle") return Variant::ConservativeCycle;
    if (s == "nb") return Variant::Nb;
    throw std::runtime_error("unknown variant: " + s);
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "full";
        case Variant::Cycle: return "cycle";
        case Variant::Conservative: return "conservative";
        case Variant::ConservativeCycle: return "conservative_cycle";
        case Variant::Nb: return "nb";
    }
    return "?";
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Accessor table: one entry per config key, used by both the parser and
// the canonical writer so they can never drift apart.
struct Field {
    std::string section;
    std::string key;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

template <typename T>
T parse_num(const std::string& s) {
    std::istringstream is(s);
    T v{};
    is >> v;
    if (is.fail()) throw std::runtime_error("bad numeric value: " + s);
    return v;
}

std::vector<Field> fields() {
    std::vector<Field> f;
    auto num = [&f](const std::string& sec, const std::string& key, auto accessor) {
        using V = std::remove_reference_t<decltype(accessor(std::declval<Config&>()))>;
        f.push_back({sec, key,
                     [accessor](Config& c, const std::string& s) { accessor(c) = parse_num<V>(s); },
                     [accessor](const Config& c) { return fmt(double(accessor(const_cast<Config&>(c)))); }});
    };
    num("sim", "free_flow_speed", [](Config& c) -> double& { return c.sim.free_flow_speed; });
    num("sim", "saturation_headway", [](Config& c) -> double& { return c.sim.saturation_headway; });
    num("sim", "vehicle_spacing", [](Config& c) -> double& { return c.sim.vehicle_spacing; });
    num("sim", "yellow", [](Config& c) -> double& { return c.sim.yellow; });
    num("sim", "red_clearance", [](Config& c) -> double& { return c.sim.red_clearance; });
    num("sim", "horizon", [](Config& c) -> double& { return c.sim.horizon; });
    num("sim", "segment_count", [](Config& c) -> int& { return c.sim.segment_count; });
    num("sim", "segment_length", [](Config& c) -> double& { return c.sim.segment_length; });
    num("agent", "embed_dim", [](Config& c) -> int& { return c.agent.embed_dim; });
    num("agent", "head_width", [](Config& c) -> int& { return c.agent.head_width; });
    num("agent", "alpha", [](Config& c) -> double& { return c.agent.alpha; });
    num("agent", "x_min", [](Config& c) -> double& { return c.agent.x_min; });
    num("agent", "x_max", [](Config& c) -> double& { return c.agent.x_max; });
    num("agent", "lr_actor", [](Config& c) -> double& { return c.agent.lr_actor; });
    num("agent", "lr_critic", [](Config& c) -> double& { return c.agent.lr_critic; });
    num("agent", "gamma", [](Config& c) -> double& { return c.agent.gamma; });
    num("agent", "tau", [](Config& c) -> double& { return c.agent.tau; });
    num("agent", "batch_size", [](Config& c) -> int& { return c.agent.batch_size; });
    num("agent", "replay_capacity", [](Config& c) -> int& { return c.agent.replay_capacity; });
    num("agent", "update_period", [](Config& c) -> int& { return c.agent.update_period; });
    num("agent", "explore_sigma", [](Config& c) -> double& { return c.agent.explore_sigma; });
    num("agent", "reward_scale", [](Config& c) -> double& { return c.agent.reward_scale; });
    num("agent", "obs_norm", [](Config& c) -> double& { return c.agent.obs_norm; });
    num("agent", "nb_embed_dim", [](Config& c) -> int& { return c.agent.nb_embed_dim; });
    num("agent", "nb_direction_dim", [](Config& c) -> int& { return c.agent.nb_direction_dim; });
    num("agent", "nb_distance_norm", [](Config& c) -> double& { return c.agent.nb_distance_norm; });
    num("train", "episodes", [](Config& c) -> int& { return c.train.episodes; });
    num("train", "steps_per_episode", [](Config& c) -> int& { return c.train.steps_per_episode; });
    num("train", "interactions", [](Config& c) -> int& { return c.train.interactions; });
    num("train", "collect_episodes", [](Config& c) -> int& { return c.train.collect_episodes; });
    num("train", "train_episodes", [](Config& c) -> int& { return c.train.train_episodes; });
    num("train", "online_warmup_episodes", [](Config& c) -> int& { return c.train.online_warmup_episodes; });
    num("train", "eval_seeds", [](Config& c) -> int& { return c.train.eval_seeds; });
    num("train", "report_last", [](Config& c) -> int& { return c.train.report_last; });
    f.push_back({"train", "seed",
                 [](Config& c, const std::string& s) { c.train.seed = parse_num<std::uint64_t>(s); },
                 [](const Config& c) { return std::to_string(c.train.seed); }});
    f.push_back({"variant", "variant",
                 [](Config& c, const std::string& s) { c.variant.variant = variant_from(s); },
                 [](const Config& c) { return to_string(c.variant.variant); }});
    f.push_back({"variant", "mask",
                 [](Config& c, const std::string& s) { c.variant.mask = mask_strategy_from(s); },
                 [](const Config& c) { return to_string(c.variant.mask); }});
    num("variant", "conservative_margin", [](Config& c) -> double& { return c.variant.conservative_margin; });
    num("variant", "fixed_time_split", [](Config& c) -> double& { return c.variant.fixed_time_split; });
    num("variant", "max_pressure_duration",
        [](Config& c) -> double& { return c.variant.max_pressure_duration; });
    return f;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string Config::canonical_text() const {
    std::ostringstream os;
    std::string section;
    for (const auto& fld : fields()) {
        if (fld.section != section) {
            section = fld.section;
            os << "[" << section << "]\n";
        }
        os << fld.key << " = " << fld.get(*this) << "\n";
    }
    return os.str();
}

std::uint64_t Config::hash() const { return fnv1a(canonical_text()); }

Config Config::parse(std::istream& in) {
    Config c;
    std::map<std::string, const Field*> lookup;
    static const std::vector<Field> defs = fields();
    for (const auto& fld : defs) lookup[fld.section + "." + fld.key] = &fld;

    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        auto it = lookup.find(section + "." + key);
        if (it == lookup.end())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key [" +
                                     section + "] " + key);
        it->second->set(c, val);
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse(in);
}

Config Config::parse_text(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

}  // namespace phddpg
