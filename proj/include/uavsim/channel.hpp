#ifndef UAVSIM_CHANNEL_HPP
#define UAVSIM_CHANNEL_HPP

#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/link.hpp"
#include "uavsim/rng.hpp"

namespace uavsim {

struct RadioParams {
    double bandwidth_per_subchannel_hz = 180e3;
    double noise_psd_dbm_hz = -174.0;

    // Elevation-angle LoS-probability sigmoid 1/(1 + a*exp(-b*(theta - a))).
    double los_sigmoid_a = 9.61;
    double los_sigmoid_b = 0.16;

    // Power-law path loss, dB at the 1 m reference distance plus
    // 10*exponent*log10(d).
    double pathloss_exponent_los = 2.2;
    double pathloss_exponent_nlos = 3.6;
    double pathloss_intercept_los_db = 41.0;
    double pathloss_intercept_nlos_db = 46.0;

    double rician_k_db = 12.0;

    double u2u_pathloss_exponent = 2.05;
    double u2u_intercept_db = 42.0;

    // Thermal noise over one subchannel, in watts.
    double noise_power_w() const;
};

// P(LoS) as a function of elevation angle in degrees. Nondecreasing in
// elevation for b > 0; equals 1 for a == 0.
double los_probability(double elevation_deg, const RadioParams& params);

// Deterministic LoS / NLoS power-law gains at distance d (meters, >= 1).
double u2n_los_gain(double d, const RadioParams& params);
double u2n_nlos_gain(double d, const RadioParams& params);

// LoS-probability-weighted mean linear gain of the UAV-to-BS channel.
// The average is taken in the linear-gain domain; this is the smooth
// surrogate all optimizers run on.
double u2n_expected_gain(const Point3& uav, const Point3& bs, const RadioParams& params);

// Deterministic UAV-to-UAV gain (LoS power law, no fading).
double u2u_gain(const Point3& tx, const Point3& rx, const RadioParams& params);

// Unit-mean Rician power fade |h|^2. k_db = -inf selects the Rayleigh
// limit (K = 0). Consumes exactly four engine draws.
double sample_rician(double k_db, RngStream& rng);

// Linear power gains for the current slot, indexed by
// (transmitting UAV, receiver node, subchannel) where the receiver is
// a UAV id or BS_NODE. Entries must be > 0; zero means "not filled"
// and reads of such entries throw (missing-gain).
class GainTable {
public:
    GainTable() = default;
    GainTable(int n_uavs, int n_subchannels);

    void set(int tx_uav, int rx_node, int subchannel, double gain);
    void set_all_subchannels(int tx_uav, int rx_node, double gain);
    double at(int tx_uav, int rx_node, int subchannel) const;

    int n_uavs() const { return n_uavs_; }
    int n_subchannels() const { return n_subch_; }

private:
    int index(int tx_uav, int rx_node, int subchannel) const;
    int n_uavs_ = 0;
    int n_subch_ = 0;
    std::vector<double> gain_;
};

// SINR of `links[link_index]` on one of its subchannels. Co-channel
// interference sums p*g over every other link occupying `subchannel`,
// evaluated at the victim's receiver.
double sinr(const std::vector<Assignment>& links, int link_index, int subchannel,
            const GainTable& gains, const RadioParams& params);

// Shannon rate of one subchannel.
double rate(double sinr_linear, double bandwidth_hz);

// Sum of per-subchannel Shannon rates over the link's allocation.
double link_rate(const std::vector<Assignment>& links, int link_index,
                 const GainTable& gains, const RadioParams& params);

} // namespace uavsim

#endif
