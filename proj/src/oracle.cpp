#include "uavsim/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "uavsim/errors.hpp"

namespace uavsim {
namespace oracle {

namespace {

constexpr std::uint64_t kEnumerationBudget = 1u << 24;

} // namespace

std::vector<double> link_rates(const SmallInstance& inst, const Allocation& alloc,
                               const std::vector<double>& powers) {
    std::vector<double> rates(inst.n_links, 0.0);
    for (int l = 0; l < inst.n_links; ++l) {
        double r = 0.0;
        for (int c = 0; c < inst.n_subchannels; ++c) {
            if (!alloc[l][c])
                continue;
            double interference = 0.0;
            for (int t = 0; t < inst.n_links; ++t)
                if (t != l && alloc[t][c])
                    interference += powers[t] * inst.cross_gain[t][l][c];
            const double s = powers[l] * inst.direct_gain[l][c] / (interference + inst.noise_w);
            r += inst.bandwidth_hz * std::log2(1.0 + s);
        }
        rates[l] = r;
    }
    return rates;
}

double sum_rate(const SmallInstance& inst, const Allocation& alloc, const std::vector<double>& powers) {
    double total = 0.0;
    for (double r : link_rates(inst, alloc, powers))
        total += r;
    return total;
}

AllocationResult exhaustive_allocation(const SmallInstance& inst) {
    const int vars = inst.n_links * inst.n_subchannels;
    if (vars > 24)
        throw BudgetError("exhaustive_allocation: more than 2^24 candidates");
    const std::uint64_t limit = std::uint64_t{1} << vars;
    if (limit > kEnumerationBudget)
        throw BudgetError("exhaustive_allocation: more than 2^24 candidates");

    const std::vector<double> powers(inst.n_links, inst.p_max_w);
    AllocationResult best;
    best.objective_bps = -1.0;

    Allocation alloc(inst.n_links, std::vector<char>(inst.n_subchannels, 0));
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        ++best.candidates_scanned;
        // Unpack: bit (l * n_subchannels + c).
        bool structure_ok = true;
        for (int l = 0; l < inst.n_links && structure_ok; ++l) {
            int count = 0;
            for (int c = 0; c < inst.n_subchannels; ++c) {
                const char v = (mask >> (l * inst.n_subchannels + c)) & 1 ? 1 : 0;
                alloc[l][c] = v;
                count += v;
            }
            if (count == 0)
                structure_ok = false;
        }
        if (!structure_ok)
            continue;
        // U2N links must be mutually orthogonal.
        bool orthogonal = true;
        for (int c = 0; c < inst.n_subchannels && orthogonal; ++c) {
            int users = 0;
            for (int l = 0; l < inst.n_links; ++l)
                if (inst.is_u2n[l] && alloc[l][c])
                    ++users;
            if (users > 1)
                orthogonal = false;
        }
        if (!orthogonal)
            continue;
        const std::vector<double> rates = link_rates(inst, alloc, powers);
        bool qos_ok = true;
        for (int l = 0; l < inst.n_links; ++l)
            if (!inst.qos_exempt[l] && rates[l] < inst.r_min_bps)
                qos_ok = false;
        if (!qos_ok)
            continue;
        double objective = 0.0;
        for (double r : rates)
            objective += r;
        if (objective > best.objective_bps) {
            best.objective_bps = objective;
            best.allocation = alloc;
            best.feasible = true;
        }
    }
    if (!best.feasible)
        best.objective_bps = 0.0;
    return best;
}

PowerResult grid_power_search(const SmallInstance& inst, const Allocation& alloc, double resolution) {
    if (inst.n_links > 3)
        throw BudgetError("grid_power_search: full grid limited to 3 links");
    if (!(resolution > 0.0))
        throw DomainError("grid_power_search: resolution must be positive");

    const int steps = static_cast<int>(std::floor(inst.p_max_w / resolution + 1e-9));
    std::vector<double> axis;
    for (int i = 0; i <= steps; ++i)
        axis.push_back(std::min(i * resolution, inst.p_max_w));
    if (axis.back() < inst.p_max_w)
        axis.push_back(inst.p_max_w);

    PowerResult best;
    best.objective_bps = -1.0;
    std::vector<double> powers(inst.n_links, 0.0);

    const std::uint64_t total = [&] {
        std::uint64_t t = 1;
        for (int l = 0; l < inst.n_links; ++l)
            t *= axis.size();
        return t;
    }();
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t rem = idx;
        for (int l = 0; l < inst.n_links; ++l) {
            powers[l] = axis[rem % axis.size()];
            rem /= axis.size();
        }
        const std::vector<double> rates = link_rates(inst, alloc, powers);
        bool qos_ok = true;
        double objective = 0.0;
        for (int l = 0; l < inst.n_links; ++l) {
            if (!inst.qos_exempt[l] && rates[l] < inst.r_min_bps)
                qos_ok = false;
            objective += rates[l];
        }
        if (qos_ok && objective > best.objective_bps) {
            best.objective_bps = objective;
            best.powers = powers;
            best.feasible = true;
        }
    }
    if (!best.feasible) {
        best.objective_bps = 0.0;
        best.powers.assign(inst.n_links, 0.0);
    }
    return best;
}

Point3 grid_point_search(const GridRegion& region, const std::function<double(const Point3&)>& objective,
                         double resolution) {
    if (!(resolution > 0.0))
        throw DomainError("grid_point_search: resolution must be positive");
    Point3 best{};
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (double z = region.lo.z; z <= region.hi.z + 1e-12; z += resolution)
        for (double y = region.lo.y; y <= region.hi.y + 1e-12; y += resolution)
            for (double x = region.lo.x; x <= region.hi.x + 1e-12; x += resolution) {
                const Point3 p{x, y, z};
                if (region.member && !region.member(p))
                    continue;
                const double v = objective(p);
                if (!found || v > best_value) {
                    best = p;
                    best_value = v;
                    found = true;
                }
            }
    if (!found)
        throw DomainError("grid_point_search: region contains no grid point");
    return best;
}

} // namespace oracle
} // namespace uavsim
