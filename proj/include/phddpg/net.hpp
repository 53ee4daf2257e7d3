#pragma once

// Static road-network model: lanes, movements, phases, neighbors.
// Immutable after build_network(); safe to share read-only.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phddpg/errors.hpp"

namespace phddpg {

enum class Turn { Left, Through, Right };

// Compass direction a vehicle comes FROM when approaching an intersection.
enum class Dir { N, E, S, W };

const char* to_string(Turn t);
const char* to_string(Dir d);
Turn turn_from(const std::string& s);
Dir dir_from(const std::string& s);

// Exit side of the junction for a given (approach, turn), right-hand traffic.
Dir exit_direction(Dir approach, Turn turn);
Dir opposite(Dir d);

// --- build input ------------------------------------------------------------

struct LaneSpec {
    double length = 300.0;  // meters
};

struct RoadSpec {
    std::string id;
    std::string from;
    std::string to;
    std::vector<LaneSpec> lanes;
};

struct MovementSpec {
    std::string from_lane;
    std::string to_lane;
    Turn turn = Turn::Through;
};

struct IntersectionSpec {
    std::string id;
    double x = 0, y = 0;
    bool is_virtual = false;  // boundary source/sink, no signal
    // Explicit phases as movement indices into NetworkSpec::movements.
    // Absent -> default_phase_set with phase_count phases.
    std::optional<std::vector<std::vector<int>>> phases;
    int phase_count = 4;  // 4 or 8 when phases are defaulted
};

struct NetworkSpec {
    std::vector<IntersectionSpec> intersections;
    std::vector<RoadSpec> roads;
    std::vector<MovementSpec> movements;
};

// --- built network ----------------------------------------------------------

struct NetNode {
    int index = -1;
    std::string id;
    double x = 0, y = 0;
    bool is_signal = false;
    int intersection = -1;  // index into RoadNetwork::intersections or -1
};

struct Road {
    int index = -1;
    std::string id;
    int from_node = -1, to_node = -1;
    std::vector<int> lanes;
};

struct Lane {
    int index = -1;
    std::string id;
    double length = 0;
    int road = -1;
    int lane_index = 0;       // position within the road, 0 = innermost
    int from_node = -1, to_node = -1;

    int capacity(double vehicle_spacing) const {
        return static_cast<int>(std::floor(length / vehicle_spacing));
    }
};

struct Movement {
    int index = -1;
    int from_lane = -1, to_lane = -1;
    Turn turn = Turn::Through;
    int intersection = -1;  // signalized intersection it crosses, -1 otherwise
    Dir approach = Dir::N;
    Dir exit = Dir::N;
};

struct Phase {
    int id = 0;
    std::vector<int> movements;
};

struct PhaseSet {
    std::vector<Phase> phases;
    std::vector<int> cycle_order;
    int size() const { return static_cast<int>(phases.size()); }
};

struct Neighbor {
    int intersection = -1;
    Dir direction = Dir::N;  // where the neighbor lies relative to this one
    double distance = 0;     // center-to-center meters
};

struct Intersection {
    int index = -1;
    int node = -1;
    std::string id;
    double x = 0, y = 0;
    PhaseSet phase_set;
    // Entry lanes in fixed (approach N,E,S,W; lane_index ascending) order.
    // In the standard layout lane_index 0/1/2 carries Left/Through/Right.
    std::vector<int> entry_lanes;
    std::vector<Neighbor> neighbors;
    // Per phase: positions (into entry_lanes) of the member movements'
    // source lanes; feeds the agent's phase-feature pooling.
    std::vector<std::vector<int>> phase_lane_groups;
};

struct RoadNetwork {
    std::vector<NetNode> nodes;
    std::vector<Road> roads;
    std::vector<Lane> lanes;
    std::vector<Movement> movements;
    std::vector<Intersection> intersections;

    std::map<std::string, int> node_by_id;
    std::map<std::string, int> road_by_id;
    std::map<std::string, int> lane_by_id;
    std::map<std::pair<int, int>, int> movement_by_lanes;  // (from, to) -> movement

    std::optional<int> find_movement(int from_lane, int to_lane) const {
        auto it = movement_by_lanes.find({from_lane, to_lane});
        if (it == movement_by_lanes.end()) return std::nullopt;
        return it->second;
    }

    // Approach direction of a lane relative to its downstream node.
    Dir lane_approach(int lane) const;

    bool lane_ends_at_signal(int lane) const {
        return nodes[lanes[lane].to_node].is_signal;
    }
};

// Movements of one intersection conflict if their junction paths cross
// (standard four-leg conflict matrix on (approach, turn) pairs). Right
// turns conflict only with the through movement merging into their exit.
bool movements_conflict(Dir a1, Turn t1, Dir a2, Turn t2);
bool movements_conflict(const RoadNetwork& net, int m1, int m2);

// Validates the spec and assembles the network. Throws ValidationError on
// dangling references, in-phase conflicts, or K < 2.
RoadNetwork build_network(const NetworkSpec& spec);

// The standard 4-phase (NS-Through, NS-Left, EW-Through, EW-Left) or
// 8-phase (one (approach, turn) group each) set for a 4x3 intersection.
// Operates on movement groups of the given intersection spec index;
// throws ValidationError for nonstandard layouts.
PhaseSet default_phase_set(const RoadNetwork& net, int intersection, int phase_count = 4);

struct RouteCheck {
    bool ok = true;
    int broken_at = -1;  // first index i where route[i] -> route[i+1] has no link
    std::string message;
};

// A route is an ordered lane list; consecutive lanes must be connected by
// a movement or by road continuation through a non-signalized node.
RouteCheck validate_route(const RoadNetwork& net, const std::vector<int>& route);

}  // namespace phddpg
