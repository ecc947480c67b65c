#ifndef UAVSIM_ORACLE_HPP
#define UAVSIM_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "uavsim/geometry.hpp"

namespace uavsim {
namespace oracle {

// Brute-force reference implementations. These deliberately share no
// code with the solvers they validate: SINR and rate formulas are
// re-derived in place, scan orders are fixed, and there is no
// randomness.

struct SmallInstance {
    int n_links = 0;        // <= 6
    int n_subchannels = 0;  // <= 4
    std::vector<bool> is_u2n;           // per link
    std::vector<bool> qos_exempt;       // per link: excluded from the rate constraint
    // direct_gain[l][c]: transmitter of l to its own receiver.
    std::vector<std::vector<double>> direct_gain;
    // cross_gain[t][l][c]: transmitter of link t to the receiver of link l.
    std::vector<std::vector<std::vector<double>>> cross_gain;
    double r_min_bps = 0.0;
    double p_max_w = 0.0;
    double bandwidth_hz = 180e3;
    double noise_w = 0.0;
};

using Allocation = std::vector<std::vector<char>>;  // [link][subchannel] in {0,1}

struct AllocationResult {
    Allocation allocation;
    double objective_bps = 0.0;
    bool feasible = false;     // false when no allocation meets every constraint
    std::uint64_t candidates_scanned = 0;
};

// Sum-rate of an allocation at the given per-subchannel powers,
// evaluated with the oracle's own formulas.
double sum_rate(const SmallInstance& inst, const Allocation& alloc, const std::vector<double>& powers);

// Per-link rates under the same model.
std::vector<double> link_rates(const SmallInstance& inst, const Allocation& alloc,
                               const std::vector<double>& powers);

// Global optimum over all binary allocations that give every link at
// least one subchannel, keep U2N links mutually orthogonal, and meet
// the per-link rate constraint (non-exempt links), with all powers at
// p_max. Throws BudgetError beyond 2^24 candidates.
AllocationResult exhaustive_allocation(const SmallInstance& inst);

struct PowerResult {
    std::vector<double> powers;
    double objective_bps = 0.0;
    bool feasible = false;
};

// Best feasible power vector on the grid {0, res, 2*res, ..., p_max}^n
// for a fixed allocation. Full grid only for n_links <= 3.
PowerResult grid_power_search(const SmallInstance& inst, const Allocation& alloc, double resolution);

struct GridRegion {
    Point3 lo;
    Point3 hi;
    // Optional membership filter (e.g. a spherical crown); empty means
    // the whole box.
    std::function<bool(const Point3&)> member;
};

// Best grid member of the region under the objective. Fixed scan order
// (x fastest, then y, then z); ties keep the first point scanned.
Point3 grid_point_search(const GridRegion& region, const std::function<double(const Point3&)>& objective,
                         double resolution);

} // namespace oracle
} // namespace uavsim

#endif
