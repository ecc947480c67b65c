#include "uavsim/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "uavsim/errors.hpp"

namespace uavsim {

namespace {

// Objective wrapper for the planners: expected U2N gain, with the
// sub-reference-distance corner clamped to the 1 m sphere so the
// optimizer never trips the channel module's strict precondition.
double planning_gain(const Point3& p, const Point3& bs, const RadioParams& params) {
    const double d = distance(p, bs);
    Point3 q = p;
    if (d == 0.0)
        q = {bs.x, bs.y, bs.z + 1.0};
    else if (d < 1.0)
        q = bs + (1.0 / d) * (p - bs);
    if (horizontal_distance(q, bs) == 0.0 && q.z <= bs.z)
        return 0.0;
    return u2n_expected_gain(q, bs, params);
}

// Shrinking pattern-search polish over a convex region given by a
// projection operator. Keeps the best point seen.
template <typename Objective, typename Project>
Point3 pattern_polish(Point3 p, double initial_step, double final_step,
                      const Objective& f, const Project& project) {
    static const std::array<Point3, 6> dirs = {
        Point3{1, 0, 0}, Point3{-1, 0, 0}, Point3{0, 1, 0},
        Point3{0, -1, 0}, Point3{0, 0, 1}, Point3{0, 0, -1}};
    double best = f(p);
    for (double step = initial_step; step >= final_step; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (const Point3& d : dirs) {
                const Point3 trial = project(p + step * d);
                const double v = f(trial);
                if (v > best) {
                    best = v;
                    p = trial;
                    improved = true;
                }
            }
        }
    }
    return p;
}

// Projected gradient ascent with a halving step schedule, then a
// pattern polish. `scale` sets the initial step and the finite
// difference width.
template <typename Objective, typename Project>
Point3 ascend(Point3 p, double scale, const Objective& f, const Project& project) {
    const double fd = std::max(1e-6, 1e-5 * scale);
    double value = f(p);
    double step = scale / 4.0;
    for (int iter = 0; iter < 400 && step > 1e-9 * scale; ++iter) {
        const Point3 grad{
            (f(project({p.x + fd, p.y, p.z})) - f(project({p.x - fd, p.y, p.z}))) / (2 * fd),
            (f(project({p.x, p.y + fd, p.z})) - f(project({p.x, p.y - fd, p.z}))) / (2 * fd),
            (f(project({p.x, p.y, p.z + fd})) - f(project({p.x, p.y, p.z - fd}))) / (2 * fd)};
        const double gn = norm(grad);
        if (gn == 0.0)
            break;
        const Point3 trial = project(p + (step / gn) * grad);
        const double v = f(trial);
        if (v > value) {
            const double rel = (v - value) / std::max(std::abs(value), 1e-300);
            p = trial;
            value = v;
            step *= 1.5;
            if (rel < 1e-6)
                break;
        } else {
            step *= 0.5;
        }
    }
    return pattern_polish(p, scale / 8.0, 1e-6 * std::max(scale, 1.0), f, project);
}

} // namespace

Point3 plan_next_sensing_point(const Point3& current, const SensingTask& next_task,
                               const SensingModel& model, const Point3& bs,
                               const RadioParams& params) {
    (void)current;  // the segment starts wherever the UAV is; the target is position-free
    const SphericalCrown crown = feasible_region(model, next_task);
    if (crown.radius <= 1e-9)
        return crown.project(crown.center);

    const auto f = [&](const Point3& p) { return planning_gain(p, bs, params); };
    const auto project = [&](const Point3& p) { return crown.project(p); };

    std::vector<Point3> starts;
    starts.push_back(crown.project(bs));
    starts.push_back(crown.apex());
    RngStream rng(0x9e3779b97f4a7c15ULL);  // fixed stream: planning is deterministic
    for (int i = 0; i < 8; ++i) {
        Point3 cand;
        bool ok = false;
        for (int tries = 0; tries < 64 && !ok; ++tries) {
            const Point3 dir{normal01(rng), normal01(rng), normal01(rng)};
            const double dn = norm(dir);
            if (dn == 0.0)
                continue;
            const double r = crown.radius * std::cbrt(uniform01_open_low(rng));
            cand = crown.center + (r / dn) * dir;
            ok = cand.z >= crown.min_altitude;
        }
        if (!ok) {
            const double phi = 6.283185307179586 * (i + 0.5) / 8.0;
            cand = crown.project({crown.center.x + crown.radius * std::cos(phi),
                                  crown.center.y + crown.radius * std::sin(phi),
                                  crown.min_altitude});
        }
        starts.push_back(cand);
    }

    Point3 best = starts.front();
    double best_value = -std::numeric_limits<double>::infinity();
    for (const Point3& s : starts) {
        const Point3 p = ascend(s, crown.radius, f, project);
        const double v = f(p);
        if (v > best_value) {
            best_value = v;
            best = p;
        }
    }
    return best;
}

double expected_u2n_rate(const Point3& p, const Point3& bs, const RadioParams& params,
                         double p_max_w) {
    const double g = planning_gain(p, bs, params);
    return rate(p_max_w * g / params.noise_power_w(), params.bandwidth_per_subchannel_hz);
}

Point3 plan_communication_detour(const Point3& sensing_point, const Point3& bs,
                                 const RadioParams& params, const SensingModel& model,
                                 double p_max_w, double r_min_bps) {
    const auto rate_at = [&](const Point3& p) { return expected_u2n_rate(p, bs, params, p_max_w); };
    if (rate_at(sensing_point) >= r_min_bps)
        return sensing_point;

    const double h_min = model.min_altitude_m;
    const Point3 anchor{bs.x, bs.y, std::max(h_min, bs.z + 1.0)};
    if (rate_at(anchor) < r_min_bps)
        throw QosError("plan_communication_detour: rate target unreachable even adjacent to the BS");

    // The expected rate depends on position only through horizontal
    // distance to the BS and altitude, so the nearest feasible point
    // lies in the vertical half-plane through the BS and the sensing
    // point. Work in (rho, z).
    double ux = sensing_point.x - bs.x;
    double uy = sensing_point.y - bs.y;
    const double un = std::hypot(ux, uy);
    if (un == 0.0) {
        ux = 1.0;
        uy = 0.0;
    } else {
        ux /= un;
        uy /= un;
    }
    const auto lift = [&](double rho, double z) { return Point3{bs.x + rho * ux, bs.y + rho * uy, z}; };
    const double rho_s = un;
    const double z_s = sensing_point.z;
    const auto dist_s = [&](double rho, double z) { return std::hypot(rho - rho_s, z - z_s); };
    const auto feasible = [&](double rho, double z) {
        return rho >= 0.0 && z >= h_min && rate_at(lift(rho, z)) >= r_min_bps;
    };

    // Boundary point on the ray toward the anchor.
    double rho_a = 0.0, z_a = anchor.z;
    double lo = 0.0, hi = 1.0;  // x(lo) infeasible-side, x(hi) feasible
    const double rho_s0 = rho_s, z_s0 = std::max(z_s, h_min);
    for (int it = 0; it < 70; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rho = rho_s0 + mid * (rho_a - rho_s0);
        const double z = z_s0 + mid * (z_a - z_s0);
        if (feasible(rho, z))
            hi = mid;
        else
            lo = mid;
    }
    double rho = rho_s0 + hi * (rho_a - rho_s0);
    double z = z_s0 + hi * (z_a - z_s0);

    // Pattern search in the half-plane: shrink distance to the sensing
    // point while staying feasible.
    static const std::array<std::array<double, 2>, 8> dirs = {{{1, 0},
                                                               {-1, 0},
                                                               {0, 1},
                                                               {0, -1},
                                                               {0.7071067811865476, 0.7071067811865476},
                                                               {0.7071067811865476, -0.7071067811865476},
                                                               {-0.7071067811865476, 0.7071067811865476},
                                                               {-0.7071067811865476, -0.7071067811865476}}};
    double best_d = dist_s(rho, z);
    for (double step = std::max(best_d / 2.0, 1.0); step >= 1e-4; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            // Pull straight toward the sensing point first.
            const double dr = rho_s - rho, dz = z_s - z;
            const double dn = std::hypot(dr, dz);
            if (dn > 0.0) {
                const double nr = std::max(0.0, rho + step * dr / dn);
                const double nz = std::max(h_min, z + step * dz / dn);
                if (feasible(nr, nz) && dist_s(nr, nz) < best_d) {
                    rho = nr;
                    z = nz;
                    best_d = dist_s(nr, nz);
                    improved = true;
                    continue;
                }
            }
            for (const auto& d : dirs) {
                const double nr = std::max(0.0, rho + step * d[0]);
                const double nz = std::max(h_min, z + step * d[1]);
                if (feasible(nr, nz) && dist_s(nr, nz) < best_d) {
                    rho = nr;
                    z = nz;
                    best_d = dist_s(nr, nz);
                    improved = true;
                    break;
                }
            }
        }
    }
    return lift(rho, z);
}

SpeedResult control_speed(const SpeedRequest& req, const RadioParams& params) {
    const double v_floor = std::clamp(req.v_floor, 0.0, req.v_max);
    if (req.qos_exempt || req.r_min_bps <= 0.0 || req.subchannels.empty())
        return {req.v_max, false};

    const auto rate_at_speed = [&](double v) {
        const Point3 end = advance(req.position, req.segment, v, req.dt);
        double g;
        if (req.peer_is_bs) {
            g = planning_gain(end, req.peer, params);
        } else {
            const double d = std::max(1.0, distance(end, req.peer));
            g = std::pow(10.0, -(params.u2u_intercept_db +
                                 10.0 * params.u2u_pathloss_exponent * std::log10(d)) /
                                   10.0);
        }
        double r = 0.0;
        const double n0b = params.noise_power_w();
        for (size_t i = 0; i < req.subchannels.size(); ++i) {
            const double interference = i < req.interference_w.size() ? req.interference_w[i] : 0.0;
            r += rate(req.tx_power_w * g / (interference + n0b), params.bandwidth_per_subchannel_hz);
        }
        return r;
    };

    if (rate_at_speed(req.v_max) >= req.r_min_bps)
        return {req.v_max, false};
    if (rate_at_speed(v_floor) < req.r_min_bps)
        return {v_floor, true};  // deadline-qos-conflict: deadline wins, violation flagged

    double lo = v_floor, hi = req.v_max;  // rate(lo) >= r_min > rate(hi)
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at_speed(mid) >= req.r_min_bps)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, false};
}

} // namespace uavsim
