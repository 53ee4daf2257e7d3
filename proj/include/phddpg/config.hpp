#pragma once

// Experiment configuration: flat key = value text grouped in [sections].
// Unknown keys are rejected so typos fail loudly. The canonical
// serialization feeds the config hash embedded in checkpoints and logs.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace phddpg {

enum class MaskStrategy { Gaussian, Mean, Zero, None };
enum class Variant { Full, Cycle, Conservative, ConservativeCycle, Nb };

MaskStrategy mask_strategy_from(const std::string& s);
std::string to_string(MaskStrategy m);
Variant variant_from(const std::string& s);
std::string to_string(Variant v);

struct SimConfig {
    double free_flow_speed = 11.0;    // m/s
    double saturation_headway = 2.0;  // s between discharges per lane
    double vehicle_spacing = 7.5;     // m per stored vehicle
    double yellow = 3.0;              // s
    double red_clearance = 2.0;       // s
    double horizon = 3600.0;          // s
    int segment_count = 4;
    double segment_length = 100.0;  // m
};

struct AgentConfig {
    int embed_dim = 32;
    int head_width = 32;
    double alpha = 0.5;  // attention residual mix
    double x_min = 10.0;
    double x_max = 40.0;
    double lr_actor = 1e-3;
    double lr_critic = 1e-3;
    double gamma = 0.8;
    double tau = 0.005;
    int batch_size = 80;  // N
    int replay_capacity = 100000;
    int update_period = 2;       // d: actor/target update every d critic steps
    double explore_sigma = 2.0;  // s of Gaussian jitter on executed durations
    double reward_scale = 0.01;  // internal reward normalization for targets
    double obs_norm = 20.0;      // lane-count normalizer inside the nets
    int nb_embed_dim = 16;
    int nb_direction_dim = 8;
    double nb_distance_norm = 1000.0;  // m
};

struct TrainConfig {
    int episodes = 100;         // M (online)
    int steps_per_episode = 360;  // T gradient steps
    int interactions = 0;       // H; 0 = all decision points of one episode
    int collect_episodes = 30;  // offline buffer fill
    int train_episodes = 40;    // offline gradient-only episodes
    int online_warmup_episodes = 3;
    int eval_seeds = 1;
    int report_last = 10;  // metric = mean over final episodes
    std::uint64_t seed = 1;
};

struct VariantConfig {
    Variant variant = Variant::Full;
    MaskStrategy mask = MaskStrategy::Gaussian;
    double conservative_margin = 5.0;  // s per decision
    double fixed_time_split = 30.0;    // s
    double max_pressure_duration = 20.0;  // s
};

struct Config {
    SimConfig sim;
    AgentConfig agent;
    TrainConfig train;
    VariantConfig variant;

    std::string canonical_text() const;
    std::uint64_t hash() const;  // FNV-1a over canonical_text()

    static Config parse(std::istream& in);
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);
};

std::uint64_t fnv1a(const std::string& s);

}  // namespace phddpg
