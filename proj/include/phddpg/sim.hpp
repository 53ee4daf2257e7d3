#pragma once

// Deterministic discrete-time (1 s) queue-based microsimulation.
// Vehicles roll at free-flow speed until they hit the back of a queue,
// queue heads discharge at the saturation headway while their movement is
// permitted, and signals run Green -> Yellow -> AllRed -> Green.

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phddpg/config.hpp"
#include "phddpg/net.hpp"

namespace phddpg {

struct Observation;  // observe.hpp

enum class VehicleMode { Pending, Moving, Queued, Arrived };

struct VehicleState {
    int id = -1;
    std::vector<int> route;  // lane indices
    int route_pos = 0;
    double entry_time = 0;  // scheduled entry second (kept for metrics even when deferred)
    double distance_to_stopline = 0;
    VehicleMode mode = VehicleMode::Pending;
    double arrival_time = std::numeric_limits<double>::quiet_NaN();

    bool arrived() const { return mode == VehicleMode::Arrived; }
    bool in_network() const { return mode == VehicleMode::Moving || mode == VehicleMode::Queued; }
};

enum class LightState { Green, Yellow, AllRed };

struct IntersectionSignalState {
    int active_phase = 0;
    double phase_elapsed = 0;
    double phase_duration = 0;  // commanded x_k
    LightState transition = LightState::Green;
    double transition_remaining = 0;
    int pending_phase = -1;
    double pending_duration = 0;
    double prev_duration = 0;  // last executed duration (Conservative variant)

    bool green_expired() const {
        return transition == LightState::Green && phase_elapsed >= phase_duration;
    }
};

struct LaneRuntime {
    std::vector<int> moving;  // vehicle ids, ascending distance_to_stopline
    std::deque<int> queue;    // front is at the stopline
    double last_discharge = -1e18;
};

struct DischargeEvent {
    int lane = -1;
    int movement = -1;  // -1 for route-exhausted exits
    int vehicle = -1;
    int intersection = -1;
};

struct FlowEntry {
    double t = 0;
    std::vector<int> route;
};

struct FlowSpec {
    std::vector<FlowEntry> entries;  // sorted by t
};

struct SimState {
    double clock = 0;
    std::vector<VehicleState> vehicles;  // indexed by flow entry order
    std::vector<LaneRuntime> lanes;
    std::vector<IntersectionSignalState> signals;
    FlowSpec flow;
    size_t flow_cursor = 0;
    std::vector<int> deferred;  // capacity-blocked entries awaiting injection
    long injected = 0;
    long arrived_total = 0;
    std::vector<DischargeEvent> last_discharges;  // events of the latest step
    int clamp_warnings = 0;
    std::uint64_t rng_seed = 0;

    long in_network() const {
        long n = 0;
        for (const auto& v : vehicles) n += v.in_network() ? 1 : 0;
        return n;
    }
};

// --- episode log --------------------------------------------------------

struct NeighborSnapshot {
    int direction = 0;  // Dir as int
    double distance = 0;
    std::vector<double> lane_block;  // neighbor's per-lane (q, m, v1..v4)
    std::vector<double> x_nb;        // neighbor's last commanded duration vector
};

struct DecisionRecord {
    int intersection = 0;
    double clock = 0;
    std::vector<double> obs;  // flattened Observation
    std::vector<NeighborSnapshot> neighbors;
    int phase = 0;
    double commanded = 0;  // controller output
    double executed = 0;   // after clamping to the duration range
    bool clamped = false;
    double reward = std::numeric_limits<double>::quiet_NaN();  // credited at next decision
};

struct VehicleRecord {
    int id = 0;
    double entry_time = 0;
    double arrival_time = std::numeric_limits<double>::quiet_NaN();
};

struct EpisodeLog {
    double horizon = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<VehicleRecord> vehicles;
    std::vector<DecisionRecord> decisions;
    int clamp_warnings = 0;
};

void write_episode_log(const EpisodeLog& log, const std::string& path);
std::string episode_log_to_jsonl(const EpisodeLog& log);
EpisodeLog read_episode_log(const std::string& path);

// --- control ------------------------------------------------------------

struct Decision {
    int phase = 0;
    double duration = 0;
    // Optional full duration vector behind the scalar command; recorded so
    // neighbors can expose their latest commanded vector.
    std::vector<double> full_x;
};

struct DecisionContext {
    const RoadNetwork& net;
    const SimState& state;
    int intersection = 0;
    const Observation& obs;
    double clock = 0;
    std::span<const NeighborSnapshot> neighbors;
};

using Controller = std::function<Decision(const DecisionContext&)>;

struct RunOptions {
    bool collect_neighbors = false;
    std::uint64_t seed = 0;  // recorded in the log; dynamics are seed-free
    std::uint64_t config_hash = 0;
    // Invoked after every step; used by invariant-checking tests.
    std::function<void(const SimState&)> on_step;
};

struct ApplyResult {
    double executed = 0;
    bool clamped = false;
};

class Simulator {
public:
    Simulator(const RoadNetwork& net, const SimConfig& cfg, double duration_min = 10.0,
              double duration_max = 40.0);

    SimState make_state(const FlowSpec& flow) const;

    // Places entries scheduled up to the current clock (deferred first).
    void inject(SimState& s) const;

    // One 1 s tick: advance, discharge, transfer, signal timers, clock.
    void step(SimState& s) const;

    // Same-phase commands extend the green without clearance; phase changes
    // run Yellow(3) -> AllRed(red_clearance) -> Green(k, x). Durations
    // outside [duration_min, duration_max] are clamped and counted.
    ApplyResult apply_phase_command(SimState& s, int intersection, int phase, double duration) const;

    EpisodeLog run_episode(const FlowSpec& flow, const Controller& controller, double horizon,
                           const RunOptions& options = {}) const;

    long lane_vehicle_count(const SimState& s, int lane) const {
        return static_cast<long>(s.lanes[lane].moving.size() + s.lanes[lane].queue.size());
    }
    int lane_capacity(int lane) const {
        return net_.lanes[lane].capacity(cfg_.vehicle_spacing);
    }

    const RoadNetwork& net() const { return net_; }
    const SimConfig& config() const { return cfg_; }
    double duration_min() const { return dur_min_; }
    double duration_max() const { return dur_max_; }

private:
    const RoadNetwork& net_;
    SimConfig cfg_;
    double dur_min_, dur_max_;

    bool movement_permitted(const SimState& s, const Movement& m) const;
    bool entry_slot_free(const SimState& s, int lane, int extra = 1) const;
    void place_batch(SimState& s, int lane, std::vector<int>& ids) const;
    // Attempts to discharge the queue head; returns the movement id or -1.
    std::optional<DischargeEvent> try_discharge(SimState& s, int lane, bool right_pass,
                                                const std::vector<DischargeEvent>& so_far) const;
};

}  // namespace phddpg
