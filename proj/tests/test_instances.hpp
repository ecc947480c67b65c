// Shared random-instance generator for the allocation/power tests. The
// gains are drawn node-wise (BS + one node per transmitter + dedicated
// receiver nodes for U2U links) so the same numbers can be viewed both
// as an abstract oracle::SmallInstance and as an rrm::Problem over a
// GainTable.
#ifndef UAVSIM_TEST_INSTANCES_HPP
#define UAVSIM_TEST_INSTANCES_HPP

#include <cmath>
#include <memory>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/oracle.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/rrm.hpp"

namespace testutil {

struct InstanceFixture {
    uavsim::oracle::SmallInstance inst;
    std::shared_ptr<uavsim::GainTable> gains;  // node-level view
    std::vector<uavsim::rrm::RrmLink> links;

    uavsim::rrm::Problem problem() const {
        uavsim::rrm::Problem prob;
        prob.n_subchannels = inst.n_subchannels;
        prob.bandwidth_hz = inst.bandwidth_hz;
        prob.noise_w = inst.noise_w;
        prob.r_min_bps = inst.r_min_bps;
        prob.p_max_w = inst.p_max_w;
        prob.links = links;
        prob.gains = gains.get();
        return prob;
    }
};

// r_min_mode: 0 -> no QoS constraint; 1 -> moderate target (feasible on
// one good channel); 2 -> mixed (sometimes zero).
// cross_scale damps every gain that is not some link's direct channel;
// 1.0 gives interference up to the same order as the signals.
inline InstanceFixture random_instance(uavsim::RngStream& rng, int max_links, int max_subch,
                                       int r_min_mode, double cross_scale = 1.0) {
    using namespace uavsim;
    InstanceFixture fx;
    const int L = 1 + static_cast<int>(uniform01(rng) * max_links) % max_links;
    const int C = 1 + static_cast<int>(uniform01(rng) * max_subch) % max_subch;
    fx.inst.n_links = L;
    fx.inst.n_subchannels = C;
    fx.inst.bandwidth_hz = 180e3;
    fx.inst.noise_w = RadioParams{}.noise_power_w();
    fx.inst.p_max_w = 0.02;

    // Link types; U2N links may not outnumber subchannels.
    fx.inst.is_u2n.assign(L, false);
    int u2n_count = 0;
    for (int l = 0; l < L; ++l)
        if (uniform01(rng) < 0.5 && u2n_count < C) {
            fx.inst.is_u2n[l] = true;
            ++u2n_count;
        }
    if (u2n_count == 0 && C >= 1) {  // keep at least one cellular link
        fx.inst.is_u2n[0] = true;
    }
    fx.inst.qos_exempt.assign(L, false);

    // Node ids: transmitter of link l is node l; U2U link l receives at
    // node L + l; U2N links receive at the BS.
    fx.links.resize(L);
    for (int l = 0; l < L; ++l) {
        fx.links[l].uav = l;
        fx.links[l].mode = fx.inst.is_u2n[l] ? LinkMode::U2N : LinkMode::U2U;
        fx.links[l].receiver = fx.inst.is_u2n[l] ? BS_NODE : L + l;
        fx.links[l].qos_exempt = false;
    }

    const int n_nodes = 2 * L;
    fx.gains = std::make_shared<GainTable>(n_nodes, C);
    const auto log_uniform = [&rng](double lo_exp, double hi_exp) {
        return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * uniform01(rng));
    };
    const auto is_direct = [&](int tx, int rx) {
        return tx < L && fx.links[tx].receiver == rx;
    };
    for (int tx = 0; tx < n_nodes; ++tx) {
        for (int c = 0; c < C; ++c)
            fx.gains->set(tx, BS_NODE, c,
                          is_direct(tx, BS_NODE) ? log_uniform(-11.0, -8.0)
                                                 : cross_scale * log_uniform(-12.5, -9.0));
        for (int rx = 0; rx < n_nodes; ++rx) {
            if (rx == tx)
                continue;
            for (int c = 0; c < C; ++c)
                fx.gains->set(tx, rx, c,
                              is_direct(tx, rx) ? log_uniform(-11.0, -8.0)
                                                : cross_scale * log_uniform(-12.5, -9.0));
        }
    }

    // Project the node gains into the abstract instance arrays, with
    // co-located transmitter/receiver pairs excluded from interference.
    fx.inst.direct_gain.assign(L, std::vector<double>(C, 0.0));
    fx.inst.cross_gain.assign(L, std::vector<std::vector<double>>(L, std::vector<double>(C, 0.0)));
    for (int l = 0; l < L; ++l)
        for (int c = 0; c < C; ++c)
            fx.inst.direct_gain[l][c] = fx.gains->at(l, fx.links[l].receiver, c);
    for (int t = 0; t < L; ++t)
        for (int l = 0; l < L; ++l) {
            if (t == l)
                continue;
            if (fx.links[t].uav == fx.links[l].receiver)
                continue;  // stays zero
            for (int c = 0; c < C; ++c)
                fx.inst.cross_gain[t][l][c] = fx.gains->at(t, fx.links[l].receiver, c);
        }

    double min_best_single = 1e300;
    for (int l = 0; l < L; ++l) {
        double best = 0.0;
        for (int c = 0; c < C; ++c)
            best = std::max(best, fx.inst.bandwidth_hz *
                                      std::log2(1.0 + fx.inst.p_max_w * fx.inst.direct_gain[l][c] /
                                                          fx.inst.noise_w));
        min_best_single = std::min(min_best_single, best);
    }
    switch (r_min_mode) {
        case 0: fx.inst.r_min_bps = 0.0; break;
        case 1: fx.inst.r_min_bps = (0.1 + 0.5 * uniform01(rng)) * min_best_single; break;
        default:
            fx.inst.r_min_bps =
                uniform01(rng) < 0.3 ? 0.0 : (0.1 + 0.6 * uniform01(rng)) * min_best_single;
    }
    return fx;
}

} // namespace testutil

#endif
