#ifndef UAVSIM_SVG_HPP
#define UAVSIM_SVG_HPP

#include <string>
#include <vector>

#include "uavsim/metrics.hpp"
#include "uavsim/scenario.hpp"

namespace uavsim {

// Top-down (x, y) view of one run: BS, task centers with their crown
// footprints, and per-UAV flight paths.
void write_trajectory_svg(const std::string& path, const Scenario& scenario,
                          const std::vector<SlotRecord>& records);

struct SumRatePoint {
    double x = 0.0;      // subchannel count
    double mean = 0.0;
    double lo = 0.0;     // 95% interval
    double hi = 0.0;
};

struct SumRateSeries {
    std::string label;
    std::vector<SumRatePoint> points;
};

// Mean sum-rate vs. subchannel count, one line per scheme, with
// confidence whiskers.
void write_sumrate_svg(const std::string& path, const std::vector<SumRateSeries>& series);

} // namespace uavsim

#endif
