#ifndef UAVSIM_PROTOCOL_HPP
#define UAVSIM_PROTOCOL_HPP

#include <optional>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/link.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/scenario.hpp"
#include "uavsim/sensing.hpp"
#include "uavsim/trajectory.hpp"

namespace uavsim {

// The four protocol steps of one slot, in execution order.
enum class SlotPhase { Report, ModeSelection, DesignAndAllocate, Transmission };

struct Beacon {
    int uav = -1;
    Point3 position;
    int slot = 0;
};

struct UavRuntime {
    int id = -1;
    Point3 position;
    double speed = 0.0;
    std::vector<SensingTask> tasks;  // scenario order; drained oldest-first
    int active_task = -1;            // index into tasks, -1 when idle
    Plan plan;

    // Slot-scoped link state.
    bool has_link = false;
    LinkMode mode = LinkMode::U2N;
    std::optional<int> relay;
    bool relay_fallback = false;

    double backlog_bits() const;
    bool all_tasks_delivered() const;
};

struct World {
    Scenario cfg;
    std::vector<UavRuntime> uavs;  // ascending id
    RngStream rng;
    int slot = 0;      // slots already run
    double now_s = 0.0;
    bool dump_search_tree = false;

    static World from_scenario(const Scenario& scenario);
    bool all_delivered() const;
};

// --- Protocol operations --------------------------------------------

// UAV Report step: one beacon per UAV in id order, positions passed
// through losslessly.
std::vector<Beacon> collect_reports(const std::vector<UavRuntime>& uavs, int slot);

// Mode selection: U2N iff the expected-gain SNR at full power reaches
// the threshold (boundary inclusive).
LinkMode select_mode(const Point3& uav, const Point3& bs, const RadioParams& params,
                     double p_max_w, double threshold_db);

double expected_snr_db(const Point3& uav, const Point3& bs, const RadioParams& params,
                       double p_max_w);

struct RelayCandidate {
    int id = -1;
    Point3 position;
};

// Nearest candidate whose own U2N SNR meets the threshold; ties go to
// the lowest id. nullopt when no candidate qualifies (caller falls back
// to best-effort U2N and flags it).
std::optional<int> pair_relay(const Point3& requester, const std::vector<RelayCandidate>& candidates,
                              const Point3& bs, const RadioParams& params, double p_max_w,
                              double threshold_db);

// One full slot: Report -> ModeSelection -> DesignAndAllocate ->
// Transmission, under the world's scheme. Mutates the world and returns
// the slot's metrics record.
SlotRecord run_slot(World& world);

} // namespace uavsim

#endif
