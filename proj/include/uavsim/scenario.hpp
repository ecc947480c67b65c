#ifndef UAVSIM_SCENARIO_HPP
#define UAVSIM_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/sensing.hpp"
#include "uavsim/text_config.hpp"

namespace uavsim {

enum class Scheme { Cooperative, NonCooperative, Separate };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct UavSpec {
    int id = -1;
    Point3 position;
};

struct TaskSpec {
    int id = -1;
    int uav = -1;
    Point3 center;
    double failure_tolerance = 0.5;
    double data_volume_bits = 1e7;
    int sense_slots = 20;
};

struct Scenario {
    Scheme scheme = Scheme::Cooperative;
    std::uint64_t seed = 1;
    int total_slots = 600;
    double slot_duration_s = 0.1;
    double completion_budget_s = 0.0;  // default: total_slots * slot_duration
    double r_min_bps = 2e5;
    double snr_threshold_db = 20.0;
    int subchannels = 8;
    double p_max_w = 0.02;
    double v_max_mps = 20.0;
    std::uint64_t bnb_node_budget = 1000000;

    Point3 bs;
    RadioParams radio;
    SensingModel sensing;
    std::vector<UavSpec> uavs;    // ascending id
    std::vector<TaskSpec> tasks;  // file order, grouped per UAV by the engine
};

// Parse + validate. Unknown sections or keys, dangling references and
// out-of-range values are ValidationErrors naming the offender.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_config(const ConfigFile& file);

} // namespace uavsim

#endif
