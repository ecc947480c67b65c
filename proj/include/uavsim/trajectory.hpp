#ifndef UAVSIM_TRAJECTORY_HPP
#define UAVSIM_TRAJECTORY_HPP

#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/sensing.hpp"

namespace uavsim {

enum class WaypointKind { Sense, Communicate };

struct Waypoint {
    Point3 position;
    WaypointKind kind = WaypointKind::Sense;
    int task_id = -1;
    double deadline_s = 0.0;   // absolute sim time by which the waypoint should be reached
};

// Ordered waypoint list for one UAV; consecutive waypoints define the
// line segments flown.
struct Plan {
    int uav = -1;
    std::vector<Waypoint> waypoints;
    int active = 0;            // index of the waypoint currently flown to
    double completion_deadline_s = 0.0;

    bool finished() const { return active >= static_cast<int>(waypoints.size()); }
    const Waypoint& target() const { return waypoints[active]; }
};

// Point of the task's feasible crown with the best expected U2N channel,
// found by multi-start projected gradient ascent (starts: crown point
// nearest the BS, the apex, 8 pseudo-random members from a fixed-seed
// stream) plus a shrinking pattern-search polish. Deterministic.
Point3 plan_next_sensing_point(const Point3& current, const SensingTask& next_task,
                               const SensingModel& model, const Point3& bs,
                               const RadioParams& params);

// Expected single-subchannel U2N rate at full power; the feasibility
// measure used by the detour planner.
double expected_u2n_rate(const Point3& p, const Point3& bs, const RadioParams& params, double p_max_w);

// Nearest point to `sensing_point` (at or above min_altitude) whose
// expected U2N rate at full power reaches r_min. Returns sensing_point
// itself when it already qualifies. Throws QosError when not even the
// best point over the BS reaches r_min.
Point3 plan_communication_detour(const Point3& sensing_point, const Point3& bs,
                                 const RadioParams& params, const SensingModel& model,
                                 double p_max_w, double r_min_bps);

struct SpeedRequest {
    Point3 position;                   // on `segment`
    Segment segment;
    Point3 peer;                       // BS or relay, frozen for the slot
    bool peer_is_bs = true;
    std::vector<int> subchannels;
    double tx_power_w = 0.0;
    std::vector<double> interference_w;  // per subchannel at the peer, frozen
    double r_min_bps = 0.0;
    double v_max = 20.0;
    double v_floor = 0.0;              // deadline enforcement
    double dt = 0.1;
    bool qos_exempt = false;           // skip the rate constraint entirely
};

struct SpeedResult {
    double speed = 0.0;
    bool qos_conflict = false;   // v_floor itself violates r_min
};

// Largest speed in [v_floor, v_max] whose end-of-slot position still
// meets the link-rate constraint, by bisection to 1e-3 m/s. Expected
// gains only; interference frozen.
SpeedResult control_speed(const SpeedRequest& req, const RadioParams& params);

} // namespace uavsim

#endif
