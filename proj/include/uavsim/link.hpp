#ifndef UAVSIM_LINK_HPP
#define UAVSIM_LINK_HPP

#include <optional>
#include <vector>

namespace uavsim {

enum class LinkMode { U2N, U2U };

// Receiver id: BS_NODE for the base station, otherwise a UAV id.
constexpr int BS_NODE = -1;

// Per-link decision record, one per transmitting UAV per slot.
struct Assignment {
    int uav = -1;
    LinkMode mode = LinkMode::U2N;
    std::optional<int> relay;       // set iff mode == U2U
    std::vector<int> subchannels;   // sorted ascending
    double tx_power_w = 0.0;        // per active subchannel
    bool qos_exempt = false;        // best-effort link, excluded from rate constraints

    int receiver() const { return mode == LinkMode::U2U ? *relay : BS_NODE; }
};

} // namespace uavsim

#endif
