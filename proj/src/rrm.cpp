#include "uavsim/rrm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {
namespace rrm {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double shannon(double sinr, double bw) { return bw * std::log2(1.0 + sinr); }

} // namespace

std::vector<double> link_rates(const Problem& prob, const Allocation& alloc,
                               const std::vector<double>& powers) {
    const int L = static_cast<int>(prob.links.size());
    std::vector<double> rates(L, 0.0);
    for (int l = 0; l < L; ++l) {
        double r = 0.0;
        for (int c = 0; c < prob.n_subchannels; ++c) {
            if (!alloc[l][c])
                continue;
            double interference = 0.0;
            for (int t = 0; t < L; ++t)
                if (prob.interferes(t, l) && alloc[t][c])
                    interference += powers[t] * prob.cross_gain(t, l, c);
            r += shannon(powers[l] * prob.direct_gain(l, c) / (interference + prob.noise_w),
                         prob.bandwidth_hz);
        }
        rates[l] = r;
    }
    return rates;
}

double sum_rate(const Problem& prob, const Allocation& alloc, const std::vector<double>& powers) {
    const std::vector<double> rates = link_rates(prob, alloc, powers);
    return std::accumulate(rates.begin(), rates.end(), 0.0);
}

// ---------------------------------------------------------------- greedy

InitialAllocation initial_allocation(const Problem& prob) {
    const int L = static_cast<int>(prob.links.size());
    const int C = prob.n_subchannels;
    InitialAllocation out;
    out.allocation.assign(L, std::vector<char>(C, 0));
    out.qos_flagged.assign(L, false);
    if (L == 0)
        return out;

    // Interference-free p_max rates drive both the neediness priority
    // and the soft-QoS flags.
    std::vector<std::vector<double>> r_free(L, std::vector<double>(C, 0.0));
    std::vector<double> best_single(L, 0.0), best_total(L, 0.0);
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < C; ++c) {
            r_free[l][c] =
                shannon(prob.p_max_w * prob.direct_gain(l, c) / prob.noise_w, prob.bandwidth_hz);
            best_single[l] = std::max(best_single[l], r_free[l][c]);
            best_total[l] += r_free[l][c];
        }
    for (int l = 0; l < L; ++l)
        out.qos_flagged[l] =
            prob.links[l].qos_exempt || (prob.r_min_bps > 0.0 && best_total[l] < prob.r_min_bps);

    std::vector<int> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> priority(L, 0.0);
    for (int l = 0; l < L; ++l)
        priority[l] = best_single[l] > 0.0 ? prob.r_min_bps / best_single[l]
                                           : std::numeric_limits<double>::infinity();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return priority[a] > priority[b]; });

    std::vector<char> taken_by_u2n(C, 0);
    int free_u2n_channels = C;
    int u2n_links_waiting = 0;
    for (const RrmLink& link : prob.links)
        u2n_links_waiting += link.mode == LinkMode::U2N ? 1 : 0;
    if (u2n_links_waiting > C)
        throw DomainError("initial_allocation: more U2N links than subchannels");

    const std::vector<double> powers(L, prob.p_max_w);
    for (int l : order) {
        std::vector<int> channels(C);
        std::iota(channels.begin(), channels.end(), 0);
        std::stable_sort(channels.begin(), channels.end(),
                         [&](int a, int b) { return r_free[l][a] > r_free[l][b]; });
        const bool u2n = prob.links[l].mode == LinkMode::U2N;
        // A needy U2N link may not starve the U2N links behind it: it
        // leaves one orthogonal channel per waiting link.
        int takeable = C;
        if (u2n) {
            --u2n_links_waiting;
            takeable = free_u2n_channels - u2n_links_waiting;
        }
        int taken = 0;
        for (int c : channels) {
            if (u2n && (taken_by_u2n[c] || taken >= takeable))
                continue;
            out.allocation[l][c] = 1;
            ++taken;
            if (u2n) {
                taken_by_u2n[c] = 1;
                --free_u2n_channels;
            }
            if (out.qos_flagged[l])
                break;  // best-effort links keep a minimal footprint
            if (prob.r_min_bps <= 0.0)
                break;  // no QoS target: one channel here, the B&B grows it
            if (link_rates(prob, out.allocation, powers)[l] >= prob.r_min_bps)
                break;
        }
    }
    return out;
}

// ------------------------------------------------------------------ B&B

std::string BnbStats::summary() const {
    std::ostringstream os;
    os << "nodes_created " << nodes_created << "\n"
       << "nodes_expanded " << nodes_expanded << "\n"
       << "pruned_bound " << pruned_bound << "\n"
       << "pruned_infeasible " << pruned_infeasible << "\n"
       << "forced_fixes " << forced_fixes << "\n"
       << "leaves " << leaves << "\n"
       << "incumbent_updates " << incumbent_updates << "\n"
       << "budget_hit " << (budget_hit ? 1 : 0) << "\n";
    return os.str();
}

namespace {

constexpr std::int8_t kFixed0 = 0;
constexpr std::int8_t kFixed1 = 1;
constexpr std::int8_t kFree = 2;

struct BnbNode {
    std::vector<std::int8_t> state;
    double bound = 0.0;
    std::uint64_t id = 0;
};

struct BnbNodeOrder {
    // Max-heap on bound, ties to the oldest node.
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound)
            return a.bound < b.bound;
        return a.id > b.id;
    }
};

struct BnbContext {
    const Problem* prob;
    int L, C;
    std::vector<double> r_free;        // at the given powers (objective bound)
    std::vector<double> r_free_pmax;   // at p_max (constraint bound)
    BnbStats* stats;

    int var(int l, int c) const { return l * C + c; }

    double bound_of(const std::vector<std::int8_t>& s) const {
        double b = 0.0;
        for (int v = 0; v < L * C; ++v)
            if (s[v] != kFixed0)
                b += r_free[v];
        return b;
    }

    // Force-fix single-choice variables, enforce U2N orthogonality and
    // the best-case QoS condition. Returns false when the node dies.
    bool propagate(std::vector<std::int8_t>& s) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int c = 0; c < C; ++c) {
                int u2n_fixed1 = -1;
                for (int l = 0; l < L; ++l) {
                    if (prob->links[l].mode != LinkMode::U2N || s[var(l, c)] != kFixed1)
                        continue;
                    if (u2n_fixed1 >= 0)
                        return false;  // two U2N links pinned to one channel
                    u2n_fixed1 = l;
                }
                if (u2n_fixed1 < 0)
                    continue;
                for (int l = 0; l < L; ++l) {
                    if (l == u2n_fixed1 || prob->links[l].mode != LinkMode::U2N)
                        continue;
                    if (s[var(l, c)] == kFree) {
                        s[var(l, c)] = kFixed0;
                        ++stats->forced_fixes;
                        changed = true;
                    }
                }
            }
            for (int l = 0; l < L; ++l) {
                int ones = 0, free_count = 0, last_free = -1;
                double cap = 0.0;
                for (int c = 0; c < C; ++c) {
                    const std::int8_t st = s[var(l, c)];
                    if (st == kFixed1)
                        ++ones;
                    if (st == kFree) {
                        ++free_count;
                        last_free = c;
                    }
                    if (st != kFixed0)
                        cap += r_free_pmax[var(l, c)];
                }
                if (ones == 0 && free_count == 0)
                    return false;  // the link would hold no subchannel
                if (ones == 0 && free_count == 1) {
                    s[var(l, last_free)] = kFixed1;
                    ++stats->forced_fixes;
                    changed = true;
                }
                if (!prob->links[l].qos_exempt && prob->r_min_bps > 0.0 && cap < prob->r_min_bps)
                    return false;  // even the interference-free best case misses r_min
            }
        }
        return true;
    }
};

} // namespace

BnbResult branch_and_bound(const Problem& prob, const Allocation& incumbent,
                           const std::vector<double>& powers, std::uint64_t node_budget) {
    const int L = static_cast<int>(prob.links.size());
    const int C = prob.n_subchannels;
    BnbResult result;
    result.allocation = incumbent;
    if (L == 0) {
        result.feasible = result.optimal = true;
        return result;
    }
    int u2n_count = 0;
    for (const RrmLink& l : prob.links)
        u2n_count += l.mode == LinkMode::U2N ? 1 : 0;
    if (u2n_count > C)
        throw DomainError("branch_and_bound: more U2N links than subchannels");

    BnbContext ctx;
    ctx.prob = &prob;
    ctx.L = L;
    ctx.C = C;
    ctx.stats = &result.stats;
    ctx.r_free.resize(L * C);
    ctx.r_free_pmax.resize(L * C);
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < C; ++c) {
            const double g = prob.direct_gain(l, c);
            ctx.r_free[ctx.var(l, c)] = shannon(powers[l] * g / prob.noise_w, prob.bandwidth_hz);
            ctx.r_free_pmax[ctx.var(l, c)] =
                shannon(prob.p_max_w * g / prob.noise_w, prob.bandwidth_hz);
        }

    const auto evaluate = [&](const Allocation& alloc, double& objective) {
        const std::vector<double> rates = link_rates(prob, alloc, powers);
        objective = std::accumulate(rates.begin(), rates.end(), 0.0);
        for (int l = 0; l < L; ++l)
            if (!prob.links[l].qos_exempt && prob.r_min_bps > 0.0 && rates[l] < prob.r_min_bps)
                return false;
        return true;
    };

    double incumbent_obj = -std::numeric_limits<double>::infinity();
    {
        double obj = 0.0;
        if (!incumbent.empty() && evaluate(incumbent, obj)) {
            incumbent_obj = obj;
            result.objective_bps = obj;
            result.feasible = true;
        }
    }

    std::priority_queue<BnbNode, std::vector<BnbNode>, BnbNodeOrder> frontier;
    BnbNode root;
    root.state.assign(static_cast<size_t>(L) * C, kFree);
    root.id = result.stats.nodes_created++;
    if (ctx.propagate(root.state)) {
        root.bound = ctx.bound_of(root.state);
        frontier.push(std::move(root));
    } else {
        ++result.stats.pruned_infeasible;
    }

    while (!frontier.empty()) {
        if (result.stats.nodes_created > node_budget) {
            result.stats.budget_hit = true;
            break;
        }
        BnbNode node = frontier.top();
        frontier.pop();
        if (result.feasible && node.bound <= incumbent_obj) {
            ++result.stats.pruned_bound;
            continue;
        }
        ++result.stats.nodes_expanded;

        // Branch on the free variable with the largest standalone rate.
        int branch_var = -1;
        double best_rate = -1.0;
        for (int v = 0; v < L * C; ++v)
            if (node.state[v] == kFree && ctx.r_free[v] > best_rate) {
                best_rate = ctx.r_free[v];
                branch_var = v;
            }
        if (branch_var < 0) {
            // Leaf: all variables fixed.
            ++result.stats.leaves;
            Allocation alloc(L, std::vector<char>(C, 0));
            for (int l = 0; l < L; ++l)
                for (int c = 0; c < C; ++c)
                    alloc[l][c] = node.state[ctx.var(l, c)] == kFixed1 ? 1 : 0;
            double obj = 0.0;
            if (evaluate(alloc, obj) && (!result.feasible || obj > incumbent_obj)) {
                incumbent_obj = obj;
                result.objective_bps = obj;
                result.allocation = alloc;
                result.feasible = true;
                ++result.stats.incumbent_updates;
            }
            continue;
        }

        for (std::int8_t value : {kFixed1, kFixed0}) {
            BnbNode child;
            child.state = node.state;
            child.state[branch_var] = value;
            child.id = result.stats.nodes_created++;
            if (!ctx.propagate(child.state)) {
                ++result.stats.pruned_infeasible;
                continue;
            }
            child.bound = ctx.bound_of(child.state);
            if (result.feasible && child.bound <= incumbent_obj) {
                ++result.stats.pruned_bound;
                continue;
            }
            frontier.push(std::move(child));
        }
    }
    result.optimal = !result.stats.budget_hit;
    return result;
}

// ------------------------------------------------------------------- DC

namespace {

struct DcModel {
    const Problem* prob;
    const Allocation* alloc;
    int L;
    std::vector<char> constrained;  // per link

    std::vector<double> rates(const std::vector<double>& p) const {
        return link_rates(*prob, *alloc, p);
    }
    double objective(const std::vector<double>& p) const {
        const std::vector<double> r = rates(p);
        return std::accumulate(r.begin(), r.end(), 0.0);
    }
    bool feasible(const std::vector<double>& p, double tol) const {
        const std::vector<double> r = rates(p);
        for (int l = 0; l < L; ++l)
            if (constrained[l] && r[l] < prob->r_min_bps - tol)
                return false;
        return true;
    }
    // d rates / d p, analytic; used by the feasibility pre-phase.
    std::vector<double> rate_gradient(const std::vector<double>& p, int link) const {
        std::vector<double> grad(L, 0.0);
        for (int c = 0; c < prob->n_subchannels; ++c) {
            if (!(*alloc)[link][c])
                continue;
            double interference = 0.0;
            for (int t = 0; t < L; ++t)
                if (prob->interferes(t, link) && (*alloc)[t][c])
                    interference += p[t] * prob->cross_gain(t, link, c);
            const double i_term = interference + prob->noise_w;
            const double a_term = i_term + p[link] * prob->direct_gain(link, c);
            grad[link] += prob->bandwidth_hz / kLn2 * prob->direct_gain(link, c) / a_term;
            for (int t = 0; t < L; ++t)
                if (prob->interferes(t, link) && (*alloc)[t][c]) {
                    const double g = prob->cross_gain(t, link, c);
                    grad[t] += prob->bandwidth_hz / kLn2 * (g / a_term - g / i_term);
                }
        }
        return grad;
    }
};

// One DC descent from `start`. Returns the accepted iterate sequence of
// true objectives (non-decreasing by construction).
struct DcRun {
    std::vector<double> powers;
    std::vector<double> sequence;
    int outer = 0;
    bool feasible = false;
};

DcRun run_dc(const DcModel& model, std::vector<double> p, double feas_tol) {
    const Problem& prob = *model.prob;
    const Allocation& alloc = *model.alloc;
    const int L = model.L;
    const int C = prob.n_subchannels;
    const double pmax = prob.p_max_w;

    DcRun run;
    run.feasible = model.feasible(p, feas_tol);
    run.sequence.push_back(model.objective(p));

    // Penalty scale commensurate with the objective.
    double obj_scale = 1.0;
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < C; ++c)
            if (alloc[l][c])
                obj_scale += shannon(pmax * prob.direct_gain(l, c) / prob.noise_w, prob.bandwidth_hz);
    const double r_norm = std::max(prob.r_min_bps, 1.0);

    for (int outer = 0; outer < 100; ++outer) {
        ++run.outer;
        // Linearization constants at the current iterate.
        std::vector<std::vector<double>> i0(L, std::vector<double>(C, 0.0));
        for (int l = 0; l < L; ++l)
            for (int c = 0; c < C; ++c) {
                if (!alloc[l][c])
                    continue;
                double interference = 0.0;
                for (int t = 0; t < L; ++t)
                    if (prob.interferes(t, l) && alloc[t][c])
                        interference += p[t] * prob.cross_gain(t, l, c);
                i0[l][c] = interference + prob.noise_w;
            }
        const std::vector<double> p0 = p;

        // Surrogate link rates: concave in p. R~_l(p) =
        //   sum_c B [ log2(I_lc(p) + p_l g) - log2(I0) - sum_t G (p_t - p0_t)/(I0 ln2) ]
        const auto surrogate_rates = [&](const std::vector<double>& q, std::vector<double>& out) {
            out.assign(L, 0.0);
            for (int l = 0; l < L; ++l)
                for (int c = 0; c < C; ++c) {
                    if (!alloc[l][c])
                        continue;
                    double interference = 0.0;
                    double lin = 0.0;
                    for (int t = 0; t < L; ++t)
                        if (prob.interferes(t, l) && alloc[t][c]) {
                            const double g = prob.cross_gain(t, l, c);
                            interference += q[t] * g;
                            lin += g * (q[t] - p0[t]);
                        }
                    const double a_term = interference + prob.noise_w + q[l] * prob.direct_gain(l, c);
                    out[l] += prob.bandwidth_hz *
                              (std::log2(a_term) - std::log2(i0[l][c]) - lin / (i0[l][c] * kLn2));
                }
        };
        std::vector<double> sr;
        const auto penalized = [&](const std::vector<double>& q, double mu) {
            surrogate_rates(q, sr);
            double f = std::accumulate(sr.begin(), sr.end(), 0.0);
            for (int l = 0; l < L; ++l)
                if (model.constrained[l]) {
                    const double v = std::max(0.0, prob.r_min_bps - sr[l]) / r_norm;
                    f -= mu * obj_scale * v * v;
                }
            return f;
        };
        const auto penalized_grad = [&](const std::vector<double>& q, double mu,
                                        std::vector<double>& grad) {
            grad.assign(L, 0.0);
            surrogate_rates(q, sr);
            // Per-link surrogate gradients, then chain the penalty.
            std::vector<std::vector<double>> g_l(L, std::vector<double>(L, 0.0));
            for (int l = 0; l < L; ++l)
                for (int c = 0; c < C; ++c) {
                    if (!alloc[l][c])
                        continue;
                    double interference = 0.0;
                    for (int t = 0; t < L; ++t)
                        if (prob.interferes(t, l) && alloc[t][c])
                            interference += q[t] * prob.cross_gain(t, l, c);
                    const double a_term =
                        interference + prob.noise_w + q[l] * prob.direct_gain(l, c);
                    g_l[l][l] += prob.bandwidth_hz / kLn2 * prob.direct_gain(l, c) / a_term;
                    for (int t = 0; t < L; ++t)
                        if (prob.interferes(t, l) && alloc[t][c]) {
                            const double g = prob.cross_gain(t, l, c);
                            g_l[l][t] += prob.bandwidth_hz / kLn2 * (g / a_term - g / i0[l][c]);
                        }
                }
            for (int l = 0; l < L; ++l) {
                double weight = 1.0;
                if (model.constrained[l]) {
                    const double v = std::max(0.0, prob.r_min_bps - sr[l]) / r_norm;
                    weight += 2.0 * mu * obj_scale * v / r_norm;
                }
                for (int t = 0; t < L; ++t)
                    grad[t] += weight * g_l[l][t];
            }
        };

        // Inner concave maximization by projected gradient with an
        // escalating penalty weight.
        std::vector<double> q = p;
        double mu = 1.0;
        for (int mu_round = 0; mu_round < 7; ++mu_round) {
            double value = penalized(q, mu);
            double step = pmax / 2.0;
            std::vector<double> grad, trial(L);
            for (int it = 0; it < 250 && step > 1e-10 * pmax; ++it) {
                penalized_grad(q, mu, grad);
                double gmax = 0.0;
                for (double g : grad)
                    gmax = std::max(gmax, std::abs(g));
                if (gmax == 0.0)
                    break;
                for (int l = 0; l < L; ++l)
                    trial[l] = std::clamp(q[l] + step * grad[l] / gmax, 0.0, pmax);
                const double v = penalized(trial, mu);
                if (v > value) {
                    const double rel = (v - value) / std::max(std::abs(value), 1e-300);
                    q = trial;
                    value = v;
                    step *= 1.3;
                    if (rel < 1e-10)
                        break;
                } else {
                    step *= 0.5;
                }
            }
            if (model.feasible(q, feas_tol))
                break;
            mu *= 10.0;
        }

        // Accept only true-objective improvements that keep
        // feasibility. A run that starts infeasible first has to reach
        // the feasible set; its reported sequence begins there.
        const double candidate_obj = model.objective(q);
        const bool candidate_feasible = model.feasible(q, feas_tol);
        const double current_obj = run.sequence.back();
        if (!run.feasible && candidate_feasible) {
            p = q;
            run.feasible = true;
            run.sequence.assign(1, candidate_obj);
            continue;
        }
        if (candidate_feasible == run.feasible && candidate_obj >= current_obj) {
            p = q;
            run.sequence.push_back(candidate_obj);
            if ((candidate_obj - current_obj) / std::max(std::abs(current_obj), 1e-300) < 1e-4)
                break;
        } else {
            break;
        }
    }
    run.powers = p;
    return run;
}

} // namespace

DcResult dc_power_control(const Problem& prob, const Allocation& alloc) {
    const int L = static_cast<int>(prob.links.size());
    DcResult result;
    if (L == 0) {
        result.feasible = true;
        return result;
    }

    DcModel model;
    model.prob = &prob;
    model.alloc = &alloc;
    model.L = L;
    model.constrained.assign(L, 0);
    bool any_constraint = false;
    for (int l = 0; l < L; ++l) {
        model.constrained[l] = !prob.links[l].qos_exempt && prob.r_min_bps > 0.0;
        any_constraint = any_constraint || model.constrained[l];
    }
    const double feas_tol = std::max(1e-9 * prob.r_min_bps, 1e-9);
    const double pmax = prob.p_max_w;

    // Feasibility pre-phase: push the minimum rate slack up by
    // projected supergradient ascent from a couple of starts.
    std::vector<double> feas_point(L, pmax);
    if (any_constraint) {
        double best_slack = -std::numeric_limits<double>::infinity();
        for (const double scale : {1.0, 0.5}) {
            std::vector<double> p(L, pmax * scale);
            const auto min_slack = [&](const std::vector<double>& q) {
                const std::vector<double> r = model.rates(q);
                double slack = std::numeric_limits<double>::infinity();
                for (int l = 0; l < L; ++l)
                    if (model.constrained[l])
                        slack = std::min(slack, r[l] - prob.r_min_bps);
                return slack;
            };
            double value = min_slack(p);
            double step = pmax / 2.0;
            for (int it = 0; it < 200 && step > 1e-9 * pmax; ++it) {
                const std::vector<double> r = model.rates(p);
                int worst = -1;
                double worst_slack = std::numeric_limits<double>::infinity();
                for (int l = 0; l < L; ++l)
                    if (model.constrained[l] && r[l] - prob.r_min_bps < worst_slack) {
                        worst_slack = r[l] - prob.r_min_bps;
                        worst = l;
                    }
                if (worst < 0)
                    break;
                const std::vector<double> grad = model.rate_gradient(p, worst);
                double gmax = 0.0;
                for (double g : grad)
                    gmax = std::max(gmax, std::abs(g));
                if (gmax == 0.0)
                    break;
                std::vector<double> trial(L);
                for (int l = 0; l < L; ++l)
                    trial[l] = std::clamp(p[l] + step * grad[l] / gmax, 0.0, pmax);
                const double v = min_slack(trial);
                if (v > value) {
                    p = trial;
                    value = v;
                    step *= 1.3;
                } else {
                    step *= 0.5;
                }
            }
            if (value > best_slack) {
                best_slack = value;
                feas_point = p;
            }
        }
        if (best_slack < -feas_tol)
            throw QosError("dc_power_control: no power vector meets r_min at this allocation "
                           "(infeasible-start)");
    }

    // DC descents from full power, the feasibility point, corner
    // starts, and (two links) a coarse lattice; keep the best feasible
    // outcome. The iteration only ever climbs, so extra starts cost
    // little and cover the corner-vs-interior ambiguity of small
    // interference channels.
    std::vector<std::vector<double>> starts;
    starts.emplace_back(L, pmax);
    if (any_constraint)
        starts.push_back(feas_point);
    if (L <= 3)
        for (int hot = 0; hot < L; ++hot) {
            std::vector<double> s(L, pmax * 1e-3);
            s[hot] = pmax;
            starts.push_back(std::move(s));
        }
    if (L == 2)
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= 4; ++j)
                starts.push_back({pmax * i / 4.0, pmax * j / 4.0});

    bool have = false;
    DcRun best;
    for (const auto& s : starts) {
        DcRun run = run_dc(model, s, feas_tol);
        if (any_constraint && !run.feasible)
            continue;
        if (!have || run.sequence.back() > best.sequence.back()) {
            best = std::move(run);
            have = true;
        }
    }
    if (!have)  // pre-phase succeeded, so the feasibility start must converge
        best = run_dc(model, feas_point, feas_tol);

    result.powers = best.powers;
    result.objective_bps = best.sequence.back();
    result.objective_sequence = best.sequence;
    result.outer_iterations = best.outer;
    result.feasible = !any_constraint || best.feasible;
    return result;
}

// --------------------------------------------------------- slot driver

GainTable expected_gains(const std::vector<Point3>& uav_positions, const Point3& bs,
                         const RadioParams& radio, int n_subchannels) {
    const int n = static_cast<int>(uav_positions.size());
    GainTable table(n, n_subchannels);
    for (int tx = 0; tx < n; ++tx) {
        table.set_all_subchannels(tx, BS_NODE, u2n_expected_gain(uav_positions[tx], bs, radio));
        for (int rx = 0; rx < n; ++rx) {
            if (rx == tx)
                continue;
            // Trajectories may cross; evaluate inside the reference
            // sphere at the 1 m bound instead of rejecting.
            const double d = std::max(1.0, distance(uav_positions[tx], uav_positions[rx]));
            const double g = std::pow(
                10.0, -(radio.u2u_intercept_db + 10.0 * radio.u2u_pathloss_exponent * std::log10(d)) /
                          10.0);
            table.set_all_subchannels(tx, rx, g);
        }
    }
    return table;
}

SlotDecision optimize_slot(const SlotProblem& sp) {
    const int n_uav = static_cast<int>(sp.uavs.size());
    const int L = static_cast<int>(sp.links.size());
    SlotDecision out;
    out.speeds.assign(n_uav, 0.0);
    out.speed_qos_conflict.assign(n_uav, false);

    std::vector<int> uav_index(n_uav);  // uav id -> index (ids are dense, engine guarantees)
    for (int i = 0; i < n_uav; ++i)
        uav_index[sp.uavs[i].id] = i;
    std::vector<int> link_of_uav(n_uav, -1);
    for (int l = 0; l < L; ++l)
        link_of_uav[uav_index[sp.links[l].uav]] = l;

    const auto end_positions = [&](const std::vector<double>& speeds) {
        std::vector<Point3> pos(n_uav);
        for (int i = 0; i < n_uav; ++i)
            pos[i] = sp.uavs[i].moving
                         ? advance(sp.uavs[i].position, sp.uavs[i].segment, speeds[i], sp.dt)
                         : sp.uavs[i].position;
        return pos;
    };
    // Soft-flagged links drop out of the hard rate constraints for the
    // whole slot; the flags are filled right after the greedy pass.
    std::vector<RrmLink> slot_links = sp.links;
    const auto make_problem = [&](const GainTable& table) {
        Problem prob;
        prob.n_subchannels = sp.n_subchannels;
        prob.bandwidth_hz = sp.radio.bandwidth_per_subchannel_hz;
        prob.noise_w = sp.radio.noise_power_w();
        prob.r_min_bps = sp.r_min_bps;
        prob.p_max_w = sp.p_max_w;
        prob.links = slot_links;
        prob.gains = &table;
        return prob;
    };

    // Bootstrap: start-of-slot gains, greedy allocation, full power.
    std::vector<Point3> start_pos(n_uav);
    for (int i = 0; i < n_uav; ++i)
        start_pos[i] = sp.uavs[i].position;
    GainTable start_gains = expected_gains(start_pos, sp.bs, sp.radio, sp.n_subchannels);
    Problem start_prob = make_problem(start_gains);

    Allocation alloc;
    std::vector<double> powers(L, sp.p_max_w);
    if (L > 0) {
        InitialAllocation init = initial_allocation(start_prob);
        alloc = init.allocation;
        out.qos_flagged = init.qos_flagged;
        for (int l = 0; l < L; ++l)
            slot_links[l].qos_exempt = slot_links[l].qos_exempt || init.qos_flagged[l];
        start_prob = make_problem(start_gains);
    } else {
        out.qos_flagged.clear();
    }

    // Speed control against interference frozen at start-of-slot.
    const auto solve_speeds = [&](std::vector<double>& speeds) {
        for (int i = 0; i < n_uav; ++i) {
            const SlotUav& u = sp.uavs[i];
            if (!u.moving) {
                speeds[i] = 0.0;
                continue;
            }
            const int l = link_of_uav[i];
            if (l < 0) {
                speeds[i] = u.v_max;
                continue;
            }
            SpeedRequest req;
            req.position = u.position;
            req.segment = u.segment;
            const RrmLink& link = slot_links[l];
            req.peer_is_bs = link.mode == LinkMode::U2N;
            req.peer = req.peer_is_bs ? sp.bs : start_pos[uav_index[link.receiver]];
            for (int c = 0; c < sp.n_subchannels; ++c)
                if (!alloc.empty() && alloc[l][c])
                    req.subchannels.push_back(c);
            req.tx_power_w = powers[l];
            for (int c : req.subchannels) {
                double interference = 0.0;
                for (int t = 0; t < L; ++t)
                    if (start_prob.interferes(t, l) && alloc[t][c])
                        interference += powers[t] * start_prob.cross_gain(t, l, c);
                req.interference_w.push_back(interference);
            }
            req.r_min_bps = sp.r_min_bps;
            req.v_max = u.v_max;
            req.v_floor = u.v_floor;
            req.dt = sp.dt;
            req.qos_exempt = link.qos_exempt;
            const SpeedResult sr = control_speed(req, sp.radio);
            speeds[i] = sr.speed;
            out.speed_qos_conflict[i] = sr.qos_conflict;
        }
    };
    solve_speeds(out.speeds);

    GainTable cur_gains = expected_gains(end_positions(out.speeds), sp.bs, sp.radio, sp.n_subchannels);
    Problem cur_prob = make_problem(cur_gains);
    double objective = L > 0 ? sum_rate(cur_prob, alloc, powers) : 0.0;

    if (L == 0) {
        out.rounds = 1;
        return out;
    }

    for (int round = 0; round < 20; ++round) {
        ++out.rounds;
        const double round_start = objective;

        // Subchannel allocation block.
        BnbResult bnb = branch_and_bound(cur_prob, alloc, powers, sp.bnb_node_budget);
        out.bnb_stats.nodes_created += bnb.stats.nodes_created;
        out.bnb_stats.nodes_expanded += bnb.stats.nodes_expanded;
        out.bnb_stats.pruned_bound += bnb.stats.pruned_bound;
        out.bnb_stats.pruned_infeasible += bnb.stats.pruned_infeasible;
        out.bnb_stats.forced_fixes += bnb.stats.forced_fixes;
        out.bnb_stats.leaves += bnb.stats.leaves;
        out.bnb_stats.incumbent_updates += bnb.stats.incumbent_updates;
        out.bnb_suboptimal = out.bnb_suboptimal || bnb.stats.budget_hit;
        if (!bnb.allocation.empty()) {
            const double cand = sum_rate(cur_prob, bnb.allocation, powers);
            if (cand >= objective) {
                alloc = bnb.allocation;
                objective = cand;
            }
        }

        // Power control block.
        try {
            DcResult dc = dc_power_control(cur_prob, alloc);
            out.dc_iterations += dc.outer_iterations;
            const double cand = sum_rate(cur_prob, alloc, dc.powers);
            if (cand >= objective) {
                powers = dc.powers;
                objective = cand;
            }
        } catch (const QosError&) {
            // Soft links already flagged; keep the current powers.
        }

        // Speed block: re-solve with the new allocation and powers,
        // keep only if the end-of-slot sum-rate does not drop.
        std::vector<double> trial_speeds(n_uav, 0.0);
        std::vector<bool> saved_conflict = out.speed_qos_conflict;
        solve_speeds(trial_speeds);
        GainTable trial_gains =
            expected_gains(end_positions(trial_speeds), sp.bs, sp.radio, sp.n_subchannels);
        Problem trial_prob = make_problem(trial_gains);
        const double cand = sum_rate(trial_prob, alloc, powers);
        if (cand >= objective) {
            out.speeds = trial_speeds;
            cur_gains = std::move(trial_gains);
            cur_prob = make_problem(cur_gains);
            objective = cand;
        } else {
            out.speed_qos_conflict = saved_conflict;
        }

        if (objective - round_start < 1e-3 * std::max(std::abs(round_start), 1e-300))
            break;
    }

    out.allocation = alloc;
    out.powers = powers;
    out.objective_bps = objective;
    return out;
}

} // namespace rrm
} // namespace uavsim
