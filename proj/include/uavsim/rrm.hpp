#ifndef UAVSIM_RRM_HPP
#define UAVSIM_RRM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/link.hpp"
#include "uavsim/trajectory.hpp"

namespace uavsim {
namespace rrm {

struct RrmLink {
    int uav = -1;
    LinkMode mode = LinkMode::U2N;
    int receiver = BS_NODE;
    bool qos_exempt = false;
};

// One slot's allocation/power problem over expected gains.
struct Problem {
    int n_subchannels = 0;
    double bandwidth_hz = 180e3;
    double noise_w = 0.0;
    double r_min_bps = 0.0;
    double p_max_w = 0.0;
    std::vector<RrmLink> links;
    const GainTable* gains = nullptr;

    double direct_gain(int l, int c) const { return gains->at(links[l].uav, links[l].receiver, c); }
    double cross_gain(int tx_link, int victim, int c) const {
        return gains->at(links[tx_link].uav, links[victim].receiver, c);
    }
    // A transmitter co-located with the victim's receiver does not
    // interfere (relay duplexing is idealized).
    bool interferes(int tx_link, int victim) const {
        return tx_link != victim && links[tx_link].uav != links[victim].receiver;
    }
};

using Allocation = std::vector<std::vector<char>>;  // [link][subchannel]

std::vector<double> link_rates(const Problem& prob, const Allocation& alloc,
                               const std::vector<double>& powers);
double sum_rate(const Problem& prob, const Allocation& alloc, const std::vector<double>& powers);

struct InitialAllocation {
    Allocation allocation;
    std::vector<bool> qos_flagged;  // links that cannot reach r_min even interference-free
};

// Greedy QoS-first allocation: links sorted by neediness
// (r_min / best single-channel rate), each taking its best channels
// until the rate target is met. U2N links stay orthogonal, U2U links
// underlay. Links whose interference-free all-channel rate cannot reach
// r_min are flagged (soft QoS) and take a single channel.
InitialAllocation initial_allocation(const Problem& prob);

struct BnbStats {
    std::uint64_t nodes_created = 0;
    std::uint64_t nodes_expanded = 0;
    std::uint64_t pruned_bound = 0;
    std::uint64_t pruned_infeasible = 0;
    std::uint64_t forced_fixes = 0;
    std::uint64_t leaves = 0;
    std::uint64_t incumbent_updates = 0;
    bool budget_hit = false;

    std::string summary() const;
};

struct BnbResult {
    Allocation allocation;
    double objective_bps = 0.0;
    bool feasible = false;   // allocation meets every hard constraint
    bool optimal = false;    // search ran to completion (not budget-cut)
    BnbStats stats;
};

// Exact best-bound-first branch-and-bound over the binary
// (link, subchannel) variables at fixed powers. Upper bound: sum of
// interference-free rates over free/fixed-1 variables. Constraint
// pruning: a link is dead when even its interference-free p_max rate
// over all non-zero variables misses r_min. Returns the incumbent with
// optimal=false when the node budget runs out.
BnbResult branch_and_bound(const Problem& prob, const Allocation& incumbent,
                           const std::vector<double>& powers, std::uint64_t node_budget);

struct DcResult {
    std::vector<double> powers;
    double objective_bps = 0.0;
    std::vector<double> objective_sequence;  // accepted outer iterates, non-decreasing
    int outer_iterations = 0;
    bool feasible = false;
};

// Difference-of-convex power control at a fixed allocation: the
// subtracted log term is linearized at the current iterate and the
// concave surrogate is maximized over [0, p_max]^n by projected
// gradient with a quadratic penalty for the (linearized) rate
// constraints. Iterates are accepted only when the true objective does
// not decrease. Throws QosError when the feasibility pre-phase finds no
// power vector meeting r_min.
DcResult dc_power_control(const Problem& prob, const Allocation& alloc);

// --- Per-slot joint optimization -----------------------------------

struct SlotUav {
    int id = -1;
    Point3 position;     // start of slot
    Segment segment;     // active flight segment (hover allowed)
    bool moving = false;
    double v_max = 20.0;
    double v_floor = 0.0;
};

struct SlotProblem {
    std::vector<SlotUav> uavs;     // every UAV, ascending id
    std::vector<RrmLink> links;    // active links only
    Point3 bs;
    RadioParams radio;
    int n_subchannels = 0;
    double r_min_bps = 0.0;
    double p_max_w = 0.0;
    double dt = 0.1;
    std::uint64_t bnb_node_budget = 1000000;
};

struct SlotDecision {
    std::vector<double> speeds;    // per UAV, same order as problem.uavs
    Allocation allocation;
    std::vector<double> powers;
    std::vector<bool> qos_flagged;
    std::vector<bool> speed_qos_conflict;  // per UAV
    double objective_bps = 0.0;    // expected sum-rate at end-of-slot positions
    int rounds = 0;
    int dc_iterations = 0;
    BnbStats bnb_stats;
    bool bnb_suboptimal = false;
};

// Alternate speed control, subchannel allocation and power control
// until the expected sum-rate stalls (< 1e-3 relative) or 20 rounds.
// Each block's result is kept only when it does not decrease the
// objective, so the round objective is non-decreasing.
SlotDecision optimize_slot(const SlotProblem& prob);

// Expected gain table for the given UAV end-of-slot positions
// (U2N rows stochastic-free expected mix, U2U rows deterministic).
GainTable expected_gains(const std::vector<Point3>& uav_positions, const Point3& bs,
                         const RadioParams& radio, int n_subchannels);

} // namespace rrm
} // namespace uavsim

#endif
