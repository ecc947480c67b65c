#include "uavsim/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double power_law_gain(double intercept_db, double exponent, double d) {
    return db_to_linear(-(intercept_db + 10.0 * exponent * std::log10(d)));
}

void require_reference_distance(double d, const char* who) {
    if (!(d >= 1.0)) {
        std::ostringstream msg;
        msg << who << ": distance " << d << " m is below the 1 m reference distance";
        throw DomainError(msg.str());
    }
}

} // namespace

double RadioParams::noise_power_w() const {
    return db_to_linear(noise_psd_dbm_hz - 30.0) * bandwidth_per_subchannel_hz;
}

double los_probability(double elevation_deg, const RadioParams& params) {
    const double a = params.los_sigmoid_a;
    const double b = params.los_sigmoid_b;
    return 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
}

double u2n_los_gain(double d, const RadioParams& params) {
    require_reference_distance(d, "u2n_los_gain");
    return power_law_gain(params.pathloss_intercept_los_db, params.pathloss_exponent_los, d);
}

double u2n_nlos_gain(double d, const RadioParams& params) {
    require_reference_distance(d, "u2n_nlos_gain");
    return power_law_gain(params.pathloss_intercept_nlos_db, params.pathloss_exponent_nlos, d);
}

double u2n_expected_gain(const Point3& uav, const Point3& bs, const RadioParams& params) {
    const double d = distance(uav, bs);
    require_reference_distance(d, "u2n_expected_gain");
    const double p_los = los_probability(elevation_angle(bs, uav), params);
    return p_los * u2n_los_gain(d, params) + (1.0 - p_los) * u2n_nlos_gain(d, params);
}

double u2u_gain(const Point3& tx, const Point3& rx, const RadioParams& params) {
    const double d = distance(tx, rx);
    require_reference_distance(d, "u2u_gain");
    return power_law_gain(params.u2u_intercept_db, params.u2u_pathloss_exponent, d);
}

double sample_rician(double k_db, RngStream& rng) {
    const double k = std::isinf(k_db) && k_db < 0.0 ? 0.0 : db_to_linear(k_db);
    // h = s + sigma*(n1 + j*n2) with s^2 + 2*sigma^2 = 1, so E|h|^2 = 1.
    const double s = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(0.5 / (k + 1.0));
    const double re = s + sigma * normal01(rng);
    const double im = sigma * normal01(rng);
    return re * re + im * im;
}

GainTable::GainTable(int n_uavs, int n_subchannels)
    : n_uavs_(n_uavs), n_subch_(n_subchannels),
      gain_(static_cast<size_t>(n_uavs) * (n_uavs + 1) * n_subchannels, 0.0) {}

int GainTable::index(int tx_uav, int rx_node, int subchannel) const {
    if (tx_uav < 0 || tx_uav >= n_uavs_ || rx_node < BS_NODE || rx_node >= n_uavs_ ||
        subchannel < 0 || subchannel >= n_subch_)
        throw DomainError("GainTable: index out of range");
    // rx slot 0 is the BS, slots 1..n are UAVs.
    return (tx_uav * (n_uavs_ + 1) + (rx_node + 1)) * n_subch_ + subchannel;
}

void GainTable::set(int tx_uav, int rx_node, int subchannel, double gain) {
    if (!(gain > 0.0))
        throw DomainError("GainTable::set: gains must be positive");
    gain_[index(tx_uav, rx_node, subchannel)] = gain;
}

void GainTable::set_all_subchannels(int tx_uav, int rx_node, double gain) {
    for (int c = 0; c < n_subch_; ++c)
        set(tx_uav, rx_node, c, gain);
}

double GainTable::at(int tx_uav, int rx_node, int subchannel) const {
    const double g = gain_[index(tx_uav, rx_node, subchannel)];
    if (g <= 0.0) {
        std::ostringstream msg;
        msg << "GainTable: missing gain for tx=" << tx_uav << " rx=" << rx_node
            << " subchannel=" << subchannel;
        throw DomainError(msg.str());
    }
    return g;
}

double sinr(const std::vector<Assignment>& links, int link_index, int subchannel,
            const GainTable& gains, const RadioParams& params) {
    const Assignment& link = links[link_index];
    const int rx = link.receiver();
    const double signal = link.tx_power_w * gains.at(link.uav, rx, subchannel);
    double interference = 0.0;
    for (int i = 0; i < static_cast<int>(links.size()); ++i) {
        if (i == link_index)
            continue;
        const Assignment& other = links[i];
        if (other.uav == rx)
            continue;  // self-interference at a relay is out of scope (idealized duplexing)
        bool co_channel = false;
        for (int c : other.subchannels)
            if (c == subchannel) { co_channel = true; break; }
        if (!co_channel)
            continue;
        interference += other.tx_power_w * gains.at(other.uav, rx, subchannel);
    }
    return signal / (interference + params.noise_power_w());
}

double rate(double sinr_linear, double bandwidth_hz) {
    return bandwidth_hz * std::log2(1.0 + sinr_linear);
}

double link_rate(const std::vector<Assignment>& links, int link_index,
                 const GainTable& gains, const RadioParams& params) {
    double total = 0.0;
    for (int c : links[link_index].subchannels)
        total += rate(sinr(links, link_index, c, gains, params), params.bandwidth_per_subchannel_hz);
    return total;
}

} // namespace uavsim
