#include "uavsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "uavsim/errors.hpp"
#include "uavsim/rrm.hpp"

namespace uavsim {

namespace {

constexpr double kArrivalTol = 1e-6;  // meters
constexpr double kBitTol = 1e-6;      // bits

bool at_point(const Point3& a, const Point3& b) { return distance(a, b) <= kArrivalTol; }

} // namespace

double UavRuntime::backlog_bits() const {
    double total = 0.0;
    for (const SensingTask& t : tasks)
        total += t.backlog_bits();
    return total;
}

bool UavRuntime::all_tasks_delivered() const {
    for (const SensingTask& t : tasks)
        if (t.state != TaskState::Delivered)
            return false;
    return true;
}

World World::from_scenario(const Scenario& scenario) {
    World w;
    w.cfg = scenario;
    for (const UavSpec& spec : scenario.uavs) {
        UavRuntime u;
        u.id = spec.id;
        u.position = spec.position;
        u.plan.uav = spec.id;
        u.plan.completion_deadline_s = scenario.completion_budget_s;
        for (const TaskSpec& t : scenario.tasks) {
            if (t.uav != spec.id)
                continue;
            SensingTask task;
            task.id = t.id;
            task.center = t.center;
            task.failure_tolerance = t.failure_tolerance;
            task.data_volume_bits = t.data_volume_bits;
            task.sense_slots_required = t.sense_slots;
            u.tasks.push_back(task);
        }
        w.uavs.push_back(std::move(u));
    }
    w.rng.seed(scenario.seed);
    return w;
}

bool World::all_delivered() const {
    for (const UavRuntime& u : uavs)
        if (!u.all_tasks_delivered())
            return false;
    return true;
}

std::vector<Beacon> collect_reports(const std::vector<UavRuntime>& uavs, int slot) {
    std::vector<Beacon> beacons;
    beacons.reserve(uavs.size());
    for (const UavRuntime& u : uavs)
        beacons.push_back({u.id, u.position, slot});
    return beacons;
}

double expected_snr_db(const Point3& uav, const Point3& bs, const RadioParams& params,
                       double p_max_w) {
    const double snr = p_max_w * u2n_expected_gain(uav, bs, params) / params.noise_power_w();
    return 10.0 * std::log10(snr);
}

LinkMode select_mode(const Point3& uav, const Point3& bs, const RadioParams& params,
                     double p_max_w, double threshold_db) {
    return expected_snr_db(uav, bs, params, p_max_w) >= threshold_db ? LinkMode::U2N
                                                                     : LinkMode::U2U;
}

std::optional<int> pair_relay(const Point3& requester, const std::vector<RelayCandidate>& candidates,
                              const Point3& bs, const RadioParams& params, double p_max_w,
                              double threshold_db) {
    std::optional<int> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const RelayCandidate& c : candidates) {
        if (expected_snr_db(c.position, bs, params, p_max_w) < threshold_db)
            continue;
        const double d = distance(requester, c.position);
        if (d < best_distance || (d == best_distance && (!best || c.id < *best))) {
            best_distance = d;
            best = c.id;
        }
    }
    return best;
}

namespace {

// ---------------------------------------------------------- plan upkeep

SensingTask* task_by_id(UavRuntime& uav, int task_id) {
    for (SensingTask& t : uav.tasks)
        if (t.id == task_id)
            return &t;
    return nullptr;
}

int next_pending(const UavRuntime& uav) {
    for (int i = 0; i < static_cast<int>(uav.tasks.size()); ++i)
        if (uav.tasks[i].state == TaskState::Pending)
            return i;
    return -1;
}

// Per-task deadline: the remaining completion budget split in
// proportion to the leg length, with later legs estimated
// center-to-center over the still-pending queue.
double allot_deadline(const World& world, const UavRuntime& uav, const Point3& target,
                      int from_task_index) {
    const double remaining_budget = world.cfg.completion_budget_s - world.now_s;
    if (remaining_budget <= 0.0)
        return world.now_s;
    const double leg = distance(uav.position, target);
    double future = 0.0;
    Point3 anchor = target;
    for (int i = from_task_index; i < static_cast<int>(uav.tasks.size()); ++i) {
        if (uav.tasks[i].state != TaskState::Pending)
            continue;
        future += distance(anchor, uav.tasks[i].center);
        anchor = uav.tasks[i].center;
    }
    const double total = leg + future;
    if (total <= 0.0)
        return world.now_s + remaining_budget;
    return world.now_s + remaining_budget * (leg / total);
}

void activate_task(World& world, UavRuntime& uav, int task_index) {
    SensingTask& task = uav.tasks[task_index];
    task.state = TaskState::Active;
    uav.active_task = task_index;
    Point3 sense_point;
    if (world.cfg.scheme == Scheme::Separate) {
        // Best sensing quality: the crown point closest to the center.
        sense_point = feasible_region(world.cfg.sensing, task).project(task.center);
    } else {
        sense_point = plan_next_sensing_point(uav.position, task, world.cfg.sensing,
                                              world.cfg.bs, world.cfg.radio);
    }
    uav.plan.waypoints.push_back({sense_point, WaypointKind::Sense, task.id,
                                  allot_deadline(world, uav, sense_point, task_index + 1)});
}

void push_comm_waypoint(World& world, UavRuntime& uav, int task_id) {
    const Point3 comm = plan_communication_detour(uav.position, world.cfg.bs, world.cfg.radio,
                                                  world.cfg.sensing, world.cfg.p_max_w,
                                                  world.cfg.r_min_bps);
    uav.plan.waypoints.push_back(
        {comm, WaypointKind::Communicate, task_id, world.cfg.completion_budget_s});
}

// Advance the waypoint queue past everything already completed and
// activate the next task where the scheme allows it.
void update_plan(World& world, UavRuntime& uav) {
    for (;;) {
        if (uav.active_task >= 0 && uav.tasks[uav.active_task].state == TaskState::Delivered)
            uav.active_task = -1;
        if (uav.plan.finished()) {
            if (uav.active_task == -1) {
                const int np = next_pending(uav);
                if (np < 0)
                    return;  // everything delivered or draining passively
                activate_task(world, uav, np);
                continue;
            }
            return;
        }
        const Waypoint& wp = uav.plan.target();
        if (!at_point(uav.position, wp.position))
            return;  // still traveling
        if (wp.kind == WaypointKind::Sense) {
            SensingTask* task = task_by_id(uav, wp.task_id);
            if (task && task->state == TaskState::Active)
                return;  // hover and keep sensing
            // Sensing done here; decide what comes next.
            const int done_task = wp.task_id;
            ++uav.plan.active;
            if (world.cfg.scheme == Scheme::Separate) {
                if (task && task->state == TaskState::Sensed)
                    push_comm_waypoint(world, uav, done_task);
                else
                    uav.active_task = -1;  // nothing to upload (zero-volume task)
            } else {
                if (world.cfg.scheme == Scheme::NonCooperative && uav.backlog_bits() > kBitTol &&
                    expected_u2n_rate(uav.position, world.cfg.bs, world.cfg.radio,
                                      world.cfg.p_max_w) < world.cfg.r_min_bps)
                    push_comm_waypoint(world, uav, done_task);
                uav.active_task = -1;  // next pending task activates below
            }
            continue;
        }
        // Communicate waypoint: hover until drained.
        if (uav.backlog_bits() > kBitTol)
            return;
        ++uav.plan.active;
        if (world.cfg.scheme == Scheme::Separate)
            uav.active_task = -1;
        continue;
    }
}

// ------------------------------------------------------------ the slot

struct SlotLinks {
    std::vector<rrm::RrmLink> links;          // ascending uav id
    std::map<int, int> link_of_uav;           // uav id -> index in links
    std::map<int, int> requester_of_relay;    // relay id -> requester id
    int relay_fallbacks = 0;
};

bool sensing_eligible(const World& world, const UavRuntime& uav, const Point3& where) {
    if (uav.active_task < 0)
        return false;
    const SensingTask& task = uav.tasks[uav.active_task];
    if (task.state != TaskState::Active)
        return false;
    return feasible_region(world.cfg.sensing, task).contains(where);
}

bool wants_link(const World& world, const UavRuntime& uav) {
    if (world.cfg.scheme == Scheme::Separate) {
        if (uav.plan.finished())
            return false;
        const Waypoint& wp = uav.plan.target();
        return wp.kind == WaypointKind::Communicate && at_point(uav.position, wp.position) &&
               uav.backlog_bits() > kBitTol;
    }
    return uav.backlog_bits() > kBitTol || sensing_eligible(world, uav, uav.position);
}

SlotLinks select_links(World& world, const std::vector<Beacon>& beacons) {
    SlotLinks out;
    const Scenario& cfg = world.cfg;
    std::map<int, Point3> beacon_pos;
    for (const Beacon& b : beacons)
        beacon_pos[b.uav] = b.position;

    for (UavRuntime& u : world.uavs) {
        u.has_link = wants_link(world, u);
        u.mode = LinkMode::U2N;
        u.relay.reset();
        u.relay_fallback = false;
    }

    if (cfg.scheme == Scheme::Cooperative) {
        for (UavRuntime& u : world.uavs)
            if (u.has_link)
                u.mode = select_mode(beacon_pos[u.id], cfg.bs, cfg.radio, cfg.p_max_w,
                                     cfg.snr_threshold_db);
        std::set<int> used_relays;
        for (UavRuntime& u : world.uavs) {
            if (!u.has_link || u.mode != LinkMode::U2U)
                continue;
            std::vector<RelayCandidate> candidates;
            for (const UavRuntime& other : world.uavs)
                if (other.id != u.id && !used_relays.count(other.id))
                    candidates.push_back({other.id, beacon_pos[other.id]});
            const std::optional<int> relay = pair_relay(beacon_pos[u.id], candidates, cfg.bs,
                                                        cfg.radio, cfg.p_max_w,
                                                        cfg.snr_threshold_db);
            if (relay) {
                u.relay = relay;
                used_relays.insert(*relay);
                out.requester_of_relay[*relay] = u.id;
            } else {
                // No qualifying relay: best-effort U2N, flagged.
                u.mode = LinkMode::U2N;
                u.relay_fallback = true;
                ++out.relay_fallbacks;
            }
        }
        // A chosen relay transmits this slot even when it has no
        // traffic of its own.
        for (const auto& [relay_id, requester] : out.requester_of_relay)
            for (UavRuntime& u : world.uavs)
                if (u.id == relay_id && !u.has_link) {
                    u.has_link = true;
                    u.mode = LinkMode::U2N;
                }
    }

    // Orthogonality capacity guard: at most `subchannels` U2N links per
    // slot; excess links are deferred by per-slot rotation (relays are
    // kept with priority).
    std::vector<UavRuntime*> u2n_links;
    for (UavRuntime& u : world.uavs)
        if (u.has_link && u.mode == LinkMode::U2N)
            u2n_links.push_back(&u);
    if (static_cast<int>(u2n_links.size()) > cfg.subchannels) {
        const int n = static_cast<int>(world.uavs.size());
        std::stable_sort(u2n_links.begin(), u2n_links.end(), [&](UavRuntime* a, UavRuntime* b) {
            const bool ra = out.requester_of_relay.count(a->id) > 0;
            const bool rb = out.requester_of_relay.count(b->id) > 0;
            if (ra != rb)
                return ra;
            return (a->id + world.slot) % n < (b->id + world.slot) % n;
        });
        for (size_t i = cfg.subchannels; i < u2n_links.size(); ++i) {
            UavRuntime* deferred = u2n_links[i];
            deferred->has_link = false;
            const auto req = out.requester_of_relay.find(deferred->id);
            if (req != out.requester_of_relay.end()) {
                for (UavRuntime& u : world.uavs)
                    if (u.id == req->second) {
                        u.has_link = false;
                        u.relay.reset();
                        u.relay_fallback = true;
                        ++out.relay_fallbacks;
                    }
                out.requester_of_relay.erase(req);
            }
        }
    }

    for (const UavRuntime& u : world.uavs) {
        if (!u.has_link)
            continue;
        rrm::RrmLink link;
        link.uav = u.id;
        link.mode = u.mode;
        link.receiver = u.mode == LinkMode::U2U ? *u.relay : BS_NODE;
        link.qos_exempt = u.relay_fallback;
        out.link_of_uav[u.id] = static_cast<int>(out.links.size());
        out.links.push_back(link);
    }
    return out;
}

} // namespace

SlotRecord run_slot(World& world) {
    const Scenario& cfg = world.cfg;
    const int n = static_cast<int>(world.uavs.size());
    SlotRecord rec;
    rec.slot = world.slot + 1;
    rec.time_s = world.now_s + cfg.slot_duration_s;

    // --- Report ---
    const std::vector<Beacon> beacons = collect_reports(world.uavs, rec.slot);
    for (UavRuntime& u : world.uavs)
        update_plan(world, u);

    // --- Mode selection ---
    SlotLinks links = select_links(world, beacons);
    rec.qos_violations += links.relay_fallbacks;

    // --- Trajectory design and resource management ---
    rrm::SlotProblem sp;
    sp.bs = cfg.bs;
    sp.radio = cfg.radio;
    sp.n_subchannels = cfg.subchannels;
    sp.r_min_bps = cfg.r_min_bps;
    sp.p_max_w = cfg.p_max_w;
    sp.dt = cfg.slot_duration_s;
    sp.bnb_node_budget = cfg.bnb_node_budget;
    std::vector<int> uav_ids;
    for (UavRuntime& u : world.uavs) {
        rrm::SlotUav su;
        su.id = u.id;
        su.position = u.position;
        su.v_max = cfg.v_max_mps;
        if (!u.plan.finished() && !at_point(u.position, u.plan.target().position)) {
            su.moving = true;
            su.segment = {u.position, u.plan.target().position};
            const double remaining_time = u.plan.target().deadline_s - world.now_s;
            const double remaining_dist = distance(u.position, u.plan.target().position);
            su.v_floor = remaining_time <= 0.0
                             ? cfg.v_max_mps
                             : std::min(cfg.v_max_mps, remaining_dist / remaining_time);
        }
        sp.uavs.push_back(su);
        uav_ids.push_back(u.id);
    }
    // Dense id check is done at world construction; rrm indexes by id.
    sp.links = links.links;

    rrm::Allocation alloc;
    std::vector<double> powers;
    std::vector<double> speeds(n, 0.0);
    std::vector<bool> qos_flagged(links.links.size(), false);

    if (cfg.scheme == Scheme::Cooperative) {
        rrm::SlotDecision decision = rrm::optimize_slot(sp);
        alloc = decision.allocation;
        powers = decision.powers;
        speeds = decision.speeds;
        qos_flagged = decision.qos_flagged.empty()
                          ? std::vector<bool>(links.links.size(), false)
                          : decision.qos_flagged;
        for (bool conflict : decision.speed_qos_conflict)
            if (conflict)
                ++rec.qos_violations;
        rec.bnb_nodes = decision.bnb_stats.nodes_created;
        rec.dc_iterations = decision.dc_iterations;
        rec.rrm_rounds = decision.rounds;
        rec.bnb_budget_hit = decision.bnb_suboptimal;
        if (world.dump_search_tree)
            rec.bnb_dump = decision.bnb_stats.summary();
    } else {
        // Orthogonal round-robin split of all subchannels (per-slot
        // rotation), full power, no underlay.
        const int L = static_cast<int>(links.links.size());
        alloc.assign(L, std::vector<char>(cfg.subchannels, 0));
        if (L > 0)
            for (int c = 0; c < cfg.subchannels; ++c)
                alloc[(c + world.slot) % L][c] = 1;
        powers.assign(L, cfg.p_max_w);
        for (int i = 0; i < n; ++i) {
            const rrm::SlotUav& su = sp.uavs[i];
            if (!su.moving) {
                speeds[i] = 0.0;
                continue;
            }
            const auto it = links.link_of_uav.find(su.id);
            if (it == links.link_of_uav.end() || cfg.scheme == Scheme::Separate) {
                speeds[i] = su.v_max;
                continue;
            }
            SpeedRequest req;
            req.position = su.position;
            req.segment = su.segment;
            req.peer = cfg.bs;
            req.peer_is_bs = true;
            for (int c = 0; c < cfg.subchannels; ++c)
                if (alloc[it->second][c])
                    req.subchannels.push_back(c);
            req.interference_w.assign(req.subchannels.size(), 0.0);
            req.tx_power_w = cfg.p_max_w;
            req.r_min_bps = cfg.r_min_bps;
            req.v_max = su.v_max;
            req.v_floor = su.v_floor;
            req.dt = cfg.slot_duration_s;
            req.qos_exempt = links.links[it->second].qos_exempt;
            const SpeedResult sr = control_speed(req, cfg.radio);
            speeds[i] = sr.speed;
            if (sr.qos_conflict)
                ++rec.qos_violations;
        }
    }

    // --- Movement (positions used for transmission are end-of-slot) ---
    for (int i = 0; i < n; ++i) {
        UavRuntime& u = world.uavs[i];
        u.speed = speeds[i];
        if (sp.uavs[i].moving)
            u.position = advance(u.position, sp.uavs[i].segment, speeds[i], cfg.slot_duration_s);
    }

    // --- Transmission (and concurrent sensing) ---
    // Sensing draws first, in id order: bits collected this slot are
    // uploadable this slot.
    std::vector<bool> sensed_flag(n, false);
    for (int i = 0; i < n; ++i) {
        UavRuntime& u = world.uavs[i];
        if (cfg.scheme == Scheme::Separate) {
            // Sense only while hovering at the sensing waypoint.
            if (u.plan.finished() || u.plan.target().kind != WaypointKind::Sense ||
                !at_point(u.position, u.plan.target().position))
                continue;
        }
        if (!sensing_eligible(world, u, u.position))
            continue;
        record_sensing(u.tasks[u.active_task], u.position, cfg.sensing, world.rng);
        sensed_flag[i] = true;
    }

    const int L = static_cast<int>(links.links.size());
    std::vector<Assignment> assignments;
    for (int l = 0; l < L; ++l) {
        Assignment a;
        a.uav = links.links[l].uav;
        a.mode = links.links[l].mode;
        if (a.mode == LinkMode::U2U)
            a.relay = links.links[l].receiver;
        for (int c = 0; c < cfg.subchannels; ++c)
            if (!alloc.empty() && alloc[l][c])
                a.subchannels.push_back(c);
        a.tx_power_w = powers.empty() ? 0.0 : powers[l];
        a.qos_exempt = links.links[l].qos_exempt || (l < static_cast<int>(qos_flagged.size()) &&
                                                     qos_flagged[l]);
        assignments.push_back(std::move(a));
    }

    // Realized channel: expected everywhere, then a fresh LoS state and
    // Rician/Rayleigh power fade per transmitting U2N link, id order.
    std::vector<Point3> positions(n);
    for (int i = 0; i < n; ++i)
        positions[i] = world.uavs[i].position;
    GainTable realized = rrm::expected_gains(positions, cfg.bs, cfg.radio, cfg.subchannels);
    for (int l = 0; l < L; ++l) {
        if (assignments[l].mode != LinkMode::U2N)
            continue;
        const Point3& pos = positions[assignments[l].uav];
        const double p_los = los_probability(elevation_angle(cfg.bs, pos), cfg.radio);
        const bool los = bernoulli(world.rng, p_los);
        const double fade =
            sample_rician(los ? cfg.radio.rician_k_db
                              : -std::numeric_limits<double>::infinity(),
                          world.rng);
        const double d = distance(pos, cfg.bs);
        const double g = (los ? u2n_los_gain(d, cfg.radio) : u2n_nlos_gain(d, cfg.radio)) * fade;
        realized.set_all_subchannels(assignments[l].uav, BS_NODE, g);
    }

    std::vector<double> realized_rate(L, 0.0);
    std::vector<double> min_sinr_db(L, 0.0);
    for (int l = 0; l < L; ++l) {
        double worst = std::numeric_limits<double>::infinity();
        for (int c : assignments[l].subchannels)
            worst = std::min(worst, sinr(assignments, l, c, realized, cfg.radio));
        min_sinr_db[l] = assignments[l].subchannels.empty()
                             ? 0.0
                             : 10.0 * std::log10(std::max(worst, 1e-300));
        realized_rate[l] = link_rate(assignments, l, realized, cfg.radio);
        if (!assignments[l].qos_exempt && cfg.r_min_bps > 0.0 &&
            realized_rate[l] < cfg.r_min_bps)
            ++rec.qos_violations;
    }

    // Delivery accounting. U2N links drain their own backlog first;
    // each U2U pair then forwards through the relay's leftover uplink
    // capacity within the slot (decode-and-forward bottleneck).
    const auto drain = [&](UavRuntime& u, double bits) {
        double moved = 0.0;
        for (SensingTask& t : u.tasks) {
            if (bits <= 0.0)
                break;
            const double take = std::min(bits, t.backlog_bits());
            if (take <= 0.0)
                continue;
            t.delivered_bits += take;
            bits -= take;
            moved += take;
        }
        return moved;
    };
    std::map<int, double> residual_capacity;  // uav id -> leftover uplink bits
    for (int l = 0; l < L; ++l) {
        if (assignments[l].mode != LinkMode::U2N)
            continue;
        UavRuntime& u = world.uavs[assignments[l].uav];
        const double capacity = realized_rate[l] * cfg.slot_duration_s;
        const double own = drain(u, capacity);
        residual_capacity[u.id] = capacity - own;
    }
    for (int l = 0; l < L; ++l) {
        if (assignments[l].mode != LinkMode::U2U)
            continue;
        UavRuntime& u = world.uavs[assignments[l].uav];
        const int relay = *assignments[l].relay;
        const double u2u_capacity = realized_rate[l] * cfg.slot_duration_s;
        double& residual = residual_capacity[relay];
        const double e2e = std::min(u2u_capacity, residual);
        residual -= drain(u, e2e);
    }
    for (UavRuntime& u : world.uavs)
        for (SensingTask& t : u.tasks)
            if (t.state == TaskState::Sensed &&
                t.delivered_bits >= t.data_volume_bits - kBitTol) {
                t.delivered_bits = t.data_volume_bits;
                t.state = TaskState::Delivered;
            }

    // --- Record ---
    for (int l = 0; l < L; ++l) {
        LinkRecord lr;
        lr.uav = assignments[l].uav;
        lr.mode = assignments[l].mode;
        lr.relay = assignments[l].relay.value_or(-1);
        lr.subchannels = assignments[l].subchannels;
        lr.tx_power_w = assignments[l].tx_power_w;
        lr.min_sinr_db = min_sinr_db[l];
        lr.realized_rate_bps = realized_rate[l];
        lr.qos_exempt = assignments[l].qos_exempt;
        lr.relay_fallback = world.uavs[assignments[l].uav].relay_fallback;
        rec.sum_rate_bps += realized_rate[l];
        rec.links.push_back(std::move(lr));
    }
    for (int i = 0; i < n; ++i) {
        const UavRuntime& u = world.uavs[i];
        UavRecord ur;
        ur.id = u.id;
        ur.position = u.position;
        ur.speed = u.speed;
        ur.sensing = sensed_flag[i];
        if (u.active_task >= 0) {
            ur.active_task = u.tasks[u.active_task].id;
            ur.task_state = to_string(u.tasks[u.active_task].state);
        }
        for (const SensingTask& t : u.tasks) {
            ur.collected_bits += t.collected_bits;
            ur.delivered_bits += t.delivered_bits;
        }
        rec.uavs.push_back(std::move(ur));
    }

    ++world.slot;
    world.now_s += cfg.slot_duration_s;
    return rec;
}

} // namespace uavsim
