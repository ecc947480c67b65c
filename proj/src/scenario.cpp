#include "uavsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Cooperative: return "cooperative";
        case Scheme::NonCooperative: return "noncooperative";
        case Scheme::Separate: return "separate";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "cooperative")
        return Scheme::Cooperative;
    if (name == "noncooperative")
        return Scheme::NonCooperative;
    if (name == "separate")
        return Scheme::Separate;
    throw ValidationError("unknown scheme '" + name +
                          "' (expected cooperative|noncooperative|separate)");
}

namespace {

void check(bool ok, const std::string& message) {
    if (!ok)
        throw ValidationError(message);
}

void check_finite(double v, const std::string& what) {
    check(std::isfinite(v), what + " must be finite");
}

} // namespace

Scenario scenario_from_config(const ConfigFile& file) {
    Scenario sc;

    static const std::set<std::string> known_sections = {"general", "bs", "radio",
                                                         "sensing", "uav", "task"};
    for (const ConfigSection& s : file.sections)
        if (!known_sections.count(s.name))
            throw ValidationError("unknown section [" + s.name + "] (line " +
                                  std::to_string(s.line) + ")");

    if (const ConfigSection* g = file.find_one("general")) {
        g->require_known_keys({"scheme", "seed", "total_slots", "slot_duration_s",
                               "completion_budget_s", "r_min_bps", "snr_threshold_db",
                               "subchannels", "v_max_mps", "bnb_node_budget"});
        sc.scheme = parse_scheme(g->get_string_or("scheme", "cooperative"));
        sc.seed = static_cast<std::uint64_t>(g->get_int_or("seed", 1));
        sc.total_slots = static_cast<int>(g->get_int_or("total_slots", 600));
        sc.slot_duration_s = g->get_double_or("slot_duration_s", 0.1);
        sc.completion_budget_s = g->get_double_or("completion_budget_s", 0.0);
        sc.r_min_bps = g->get_double_or("r_min_bps", 2e5);
        sc.snr_threshold_db = g->get_double_or("snr_threshold_db", 20.0);
        sc.subchannels = static_cast<int>(g->get_int_or("subchannels", 8));
        sc.v_max_mps = g->get_double_or("v_max_mps", 20.0);
        sc.bnb_node_budget = static_cast<std::uint64_t>(g->get_int_or("bnb_node_budget", 1000000));
    }
    if (sc.completion_budget_s <= 0.0)
        sc.completion_budget_s = sc.total_slots * sc.slot_duration_s;

    const ConfigSection* bs = file.find_one("bs");
    check(bs != nullptr, "missing section [bs]");
    bs->require_known_keys({"position"});
    check(bs->has("position"), "[bs] missing required key 'position'");
    sc.bs = bs->get_point("position");

    if (const ConfigSection* r = file.find_one("radio")) {
        r->require_known_keys({"bandwidth_per_subchannel_hz", "noise_psd_dbm_hz", "los_sigmoid_a",
                               "los_sigmoid_b", "pathloss_exponent_los", "pathloss_exponent_nlos",
                               "pathloss_intercept_los_db", "pathloss_intercept_nlos_db",
                               "rician_k_db", "u2u_pathloss_exponent", "u2u_intercept_db",
                               "p_max_w"});
        RadioParams& rp = sc.radio;
        rp.bandwidth_per_subchannel_hz =
            r->get_double_or("bandwidth_per_subchannel_hz", rp.bandwidth_per_subchannel_hz);
        rp.noise_psd_dbm_hz = r->get_double_or("noise_psd_dbm_hz", rp.noise_psd_dbm_hz);
        rp.los_sigmoid_a = r->get_double_or("los_sigmoid_a", rp.los_sigmoid_a);
        rp.los_sigmoid_b = r->get_double_or("los_sigmoid_b", rp.los_sigmoid_b);
        rp.pathloss_exponent_los =
            r->get_double_or("pathloss_exponent_los", rp.pathloss_exponent_los);
        rp.pathloss_exponent_nlos =
            r->get_double_or("pathloss_exponent_nlos", rp.pathloss_exponent_nlos);
        rp.pathloss_intercept_los_db =
            r->get_double_or("pathloss_intercept_los_db", rp.pathloss_intercept_los_db);
        rp.pathloss_intercept_nlos_db =
            r->get_double_or("pathloss_intercept_nlos_db", rp.pathloss_intercept_nlos_db);
        rp.rician_k_db = r->get_double_or("rician_k_db", rp.rician_k_db);
        rp.u2u_pathloss_exponent = r->get_double_or("u2u_pathloss_exponent", rp.u2u_pathloss_exponent);
        rp.u2u_intercept_db = r->get_double_or("u2u_intercept_db", rp.u2u_intercept_db);
        sc.p_max_w = r->get_double_or("p_max_w", sc.p_max_w);
    }

    if (const ConfigSection* s = file.find_one("sensing")) {
        s->require_known_keys({"decay_per_m", "min_altitude_m", "max_crown_radius_m"});
        sc.sensing.decay_per_m = s->get_double_or("decay_per_m", sc.sensing.decay_per_m);
        sc.sensing.min_altitude_m = s->get_double_or("min_altitude_m", sc.sensing.min_altitude_m);
        sc.sensing.max_crown_radius_m =
            s->get_double_or("max_crown_radius_m", sc.sensing.max_crown_radius_m);
    }

    for (const ConfigSection* u : file.find_all("uav")) {
        u->require_known_keys({"id", "position"});
        UavSpec spec;
        spec.id = static_cast<int>(u->get_int("id"));
        spec.position = u->get_point("position");
        sc.uavs.push_back(spec);
    }
    for (const ConfigSection* t : file.find_all("task")) {
        t->require_known_keys(
            {"id", "uav", "center", "failure_tolerance", "data_volume_bits", "sense_slots"});
        TaskSpec spec;
        spec.id = static_cast<int>(t->get_int("id"));
        spec.uav = static_cast<int>(t->get_int("uav"));
        spec.center = t->get_point("center");
        spec.failure_tolerance = t->get_double_or("failure_tolerance", spec.failure_tolerance);
        spec.data_volume_bits = t->get_double_or("data_volume_bits", spec.data_volume_bits);
        spec.sense_slots = static_cast<int>(t->get_int_or("sense_slots", spec.sense_slots));
        sc.tasks.push_back(spec);
    }

    // ---- validation ----
    check(sc.total_slots > 0, "[general] total_slots must be > 0");
    check(sc.slot_duration_s > 0.0, "[general] slot_duration_s must be > 0");
    check(sc.subchannels > 0, "[general] subchannels must be > 0");
    check_finite(sc.snr_threshold_db, "[general] snr_threshold_db");
    check(sc.r_min_bps >= 0.0, "[general] r_min_bps must be >= 0");
    check(sc.v_max_mps > 0.0, "[general] v_max_mps must be > 0");
    check(sc.p_max_w > 0.0, "[radio] p_max_w must be > 0");
    check(sc.bnb_node_budget > 0, "[general] bnb_node_budget must be > 0");

    const RadioParams& rp = sc.radio;
    check(rp.bandwidth_per_subchannel_hz > 0.0, "[radio] bandwidth_per_subchannel_hz must be > 0");
    check_finite(rp.noise_psd_dbm_hz, "[radio] noise_psd_dbm_hz");
    check(rp.los_sigmoid_a >= 0.0, "[radio] los_sigmoid_a must be >= 0");
    check(rp.los_sigmoid_b > 0.0, "[radio] los_sigmoid_b must be > 0");
    check(rp.pathloss_exponent_nlos >= rp.pathloss_exponent_los,
          "[radio] pathloss_exponent_nlos must be >= pathloss_exponent_los");
    check(rp.pathloss_intercept_nlos_db >= rp.pathloss_intercept_los_db,
          "[radio] pathloss_intercept_nlos_db must be >= pathloss_intercept_los_db");
    check(sc.sensing.decay_per_m > 0.0, "[sensing] decay_per_m must be > 0");
    check(sc.sensing.max_crown_radius_m > 0.0, "[sensing] max_crown_radius_m must be > 0");
    check(sc.sensing.min_altitude_m >= 0.0, "[sensing] min_altitude_m must be >= 0");
    check(sc.sensing.min_altitude_m > sc.bs.z,
          "[sensing] min_altitude_m must exceed the BS altitude");

    check(!sc.uavs.empty(), "scenario needs at least one [uav]");
    check(!sc.tasks.empty(), "scenario needs at least one [task]");
    std::set<int> uav_ids;
    for (const UavSpec& u : sc.uavs) {
        check(u.id >= 0, "[uav] id must be >= 0");
        check(uav_ids.insert(u.id).second, "[uav] duplicate id " + std::to_string(u.id));
        check(u.position.z >= sc.sensing.min_altitude_m,
              "[uav] id " + std::to_string(u.id) + ": initial altitude below min_altitude_m");
    }
    std::set<int> task_ids;
    for (const TaskSpec& t : sc.tasks) {
        const std::string who = "[task] id " + std::to_string(t.id);
        check(t.id >= 0, "[task] id must be >= 0");
        check(task_ids.insert(t.id).second, "[task] duplicate id " + std::to_string(t.id));
        check(uav_ids.count(t.uav) > 0, who + ": unknown uav " + std::to_string(t.uav));
        check(t.failure_tolerance > 0.0 && t.failure_tolerance < 1.0,
              who + ": failure_tolerance must be in (0,1)");
        check(t.data_volume_bits >= 0.0, who + ": data_volume_bits must be >= 0");
        check(t.sense_slots >= 1, who + ": sense_slots must be >= 1");
        check(t.center.z >= 0.0, who + ": center altitude must be >= 0");
        // Fail fast on geometrically impossible tasks.
        SensingTask probe;
        probe.id = t.id;
        probe.center = t.center;
        probe.failure_tolerance = t.failure_tolerance;
        try {
            feasible_region(sc.sensing, probe);
        } catch (const DomainError& e) {
            throw ValidationError(who + ": " + e.what());
        }
    }
    std::stable_sort(sc.uavs.begin(), sc.uavs.end(),
                     [](const UavSpec& a, const UavSpec& b) { return a.id < b.id; });
    for (size_t i = 0; i < sc.uavs.size(); ++i)
        check(sc.uavs[i].id == static_cast<int>(i),
              "[uav] ids must be consecutive starting at 0");
    return sc;
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_config(ConfigFile::parse_file(path));
}

} // namespace uavsim
