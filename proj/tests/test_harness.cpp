#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavsim/engine.hpp"
#include "uavsim/errors.hpp"
#include "uavsim/protocol.hpp"

using namespace uavsim;

namespace {

Scenario make_scenario(const std::string& text) {
    return scenario_from_config(ConfigFile::parse_string(text, "test"));
}

const char* kSmallScenario = R"(
[general]
scheme = cooperative
seed = 9
total_slots = 150
slot_duration_s = 0.25
subchannels = 3
r_min_bps = 2e5
bnb_node_budget = 3000
[bs]
position = 0 0 25
[radio]
p_max_w = 0.02
[uav]
id = 0
position = 250 0 80
[uav]
id = 1
position = 150 120 80
[task]
id = 0
uav = 0
center = 350 40 60
data_volume_bits = 5e6
sense_slots = 3
[task]
id = 1
uav = 1
center = 220 180 60
data_volume_bits = 5e6
sense_slots = 3
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("scenario defaults and validation") {
    SUBCASE("minimal file fills the documented defaults") {
        const Scenario sc = make_scenario(R"(
[bs]
position = 0 0 25
[uav]
id = 0
position = 100 0 80
[task]
id = 0
uav = 0
center = 150 0 60
)");
        CHECK(sc.snr_threshold_db == 20.0);
        CHECK(sc.scheme == Scheme::Cooperative);
        CHECK(sc.subchannels == 8);
        CHECK(sc.slot_duration_s == doctest::Approx(0.1));
        CHECK(sc.completion_budget_s == doctest::Approx(600 * 0.1));
        CHECK(sc.tasks[0].sense_slots == 20);
    }
    SUBCASE("missing bs position") {
        CHECK_THROWS_WITH_AS(make_scenario("[bs]\n"), doctest::Contains("position"),
                             ValidationError);
        CHECK_THROWS_WITH_AS(make_scenario("[uav]\nid = 0\nposition = 0 0 80\n"),
                             doctest::Contains("[bs]"), ValidationError);
    }
    SUBCASE("zero subchannels") {
        CHECK_THROWS_WITH_AS(make_scenario(R"(
[general]
subchannels = 0
[bs]
position = 0 0 25
[uav]
id = 0
position = 100 0 80
[task]
id = 0
uav = 0
center = 150 0 60
)"),
                             doctest::Contains("subchannels"), ValidationError);
    }
    SUBCASE("unknown keys are named") {
        CHECK_THROWS_WITH_AS(make_scenario(R"(
[general]
subchannnels = 4
[bs]
position = 0 0 25
)"),
                             doctest::Contains("subchannnels"), ValidationError);
    }
    SUBCASE("dangling task reference") {
        CHECK_THROWS_WITH_AS(make_scenario(R"(
[bs]
position = 0 0 25
[uav]
id = 0
position = 100 0 80
[task]
id = 0
uav = 3
center = 150 0 60
)"),
                             doctest::Contains("unknown uav"), ValidationError);
    }
    SUBCASE("ids must be dense") {
        CHECK_THROWS_WITH_AS(make_scenario(R"(
[bs]
position = 0 0 25
[uav]
id = 1
position = 100 0 80
[task]
id = 0
uav = 1
center = 150 0 60
)"),
                             doctest::Contains("consecutive"), ValidationError);
    }
    SUBCASE("geometrically impossible task fails at load time") {
        CHECK_THROWS_WITH_AS(make_scenario(R"(
[bs]
position = 0 0 25
[sensing]
min_altitude_m = 200
[uav]
id = 0
position = 100 0 220
[task]
id = 0
uav = 0
center = 150 0 0
failure_tolerance = 0.2
)"),
                             doctest::Contains("infeasible"), ValidationError);
    }
}

TEST_CASE("instance files") {
    const std::string good = R"(
[instance]
links = 2
subchannels = 2
p_max_w = 0.02
r_min_bps = 0
default_cross_gain = 1e-12
[link]
type = u2n
gain = 1e-9 2e-9
[link]
type = u2u
gain = 3e-9 1e-9
[cross]
tx = 0
rx = 1
gain = 5e-12 0
)";
    SUBCASE("parses and runs through the oracle") {
        const oracle::SmallInstance inst =
            instance_from_config(ConfigFile::parse_string(good, "test"));
        CHECK(inst.n_links == 2);
        CHECK(inst.cross_gain[0][1][1] == 0.0);       // explicit zero allowed
        CHECK(inst.cross_gain[1][0][0] == 1e-12);     // default fills the gap
        const oracle::AllocationResult res = oracle::exhaustive_allocation(inst);
        CHECK(res.feasible);
    }
    SUBCASE("unknown key is fatal") {
        const std::string bad = std::string(good) + "[instance2]\nx = 1\n";
        CHECK_THROWS_AS(instance_from_config(ConfigFile::parse_string(bad, "test")),
                        ValidationError);
    }
    SUBCASE("missing cross gains are fatal without a default") {
        const std::string bad = R"(
[instance]
links = 2
subchannels = 1
p_max_w = 0.02
[link]
type = u2n
gain = 1e-9
[link]
type = u2u
gain = 3e-9
)";
        CHECK_THROWS_WITH_AS(instance_from_config(ConfigFile::parse_string(bad, "test")),
                             doctest::Contains("cross"), ValidationError);
    }
}

TEST_CASE("run: completion, conservation, scheme rules") {
    SUBCASE("zero data volume completes on sensing alone") {
        Scenario sc = make_scenario(kSmallScenario);
        for (TaskSpec& t : sc.tasks)
            t.data_volume_bits = 0.0;
        const RunOutput out = run(sc);
        CHECK(out.summary.completion_slot > 0);
        CHECK(out.summary.bits_delivered == 0.0);
    }
    SUBCASE("cooperative run completes and conserves bits") {
        const Scenario sc = make_scenario(kSmallScenario);
        const RunOutput out = run(sc);
        REQUIRE(out.summary.completion_slot > 0);
        CHECK(out.summary.bits_delivered == doctest::Approx(1e7));
        double prev = -1.0;
        for (const SlotRecord& rec : out.records) {
            double total = 0.0;
            for (const LinkRecord& l : rec.links)
                total += l.realized_rate_bps;
            CHECK(rec.sum_rate_bps == doctest::Approx(total).epsilon(1e-9));
            double delivered = 0.0, collected = 0.0;
            for (const UavRecord& u : rec.uavs) {
                delivered += u.delivered_bits;
                collected += u.collected_bits;
            }
            CHECK(delivered <= collected + 1e-6);
            CHECK(delivered >= prev - 1e-9);
            prev = delivered;
        }
    }
    SUBCASE("noncooperative runs never assign U2U") {
        Scenario sc = make_scenario(kSmallScenario);
        sc.scheme = Scheme::NonCooperative;
        const RunOutput out = run(sc);
        for (const SlotRecord& rec : out.records)
            for (const LinkRecord& l : rec.links)
                CHECK(l.mode == LinkMode::U2N);
        CHECK(out.summary.completion_slot > 0);
    }
    SUBCASE("separate runs never sense and transmit in one slot") {
        Scenario sc = make_scenario(kSmallScenario);
        sc.scheme = Scheme::Separate;
        const RunOutput out = run(sc);
        CHECK(out.summary.completion_slot > 0);
        for (const SlotRecord& rec : out.records)
            for (const UavRecord& u : rec.uavs) {
                bool has_link = false;
                for (const LinkRecord& l : rec.links)
                    has_link = has_link || l.uav == u.id;
                CHECK_FALSE((u.sensing && has_link));
            }
    }
}

TEST_CASE("determinism: identical seeds produce byte-identical CSVs") {
    const Scenario sc = make_scenario(kSmallScenario);
    const std::string dir_a = "test_out_det_a", dir_b = "test_out_det_b";
    write_run_outputs(dir_a, sc, run(sc));
    write_run_outputs(dir_b, sc, run(sc));
    CHECK(slurp(dir_a + "/slots.csv") == slurp(dir_b + "/slots.csv"));
    CHECK(slurp(dir_a + "/summary.csv") == slurp(dir_b + "/summary.csv"));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("replicate") {
    const Scenario sc = make_scenario(kSmallScenario);
    SUBCASE("one seed equals a plain run") {
        const std::vector<RunSummary> reps = replicate(sc, {9});
        Scenario sc9 = sc;
        sc9.seed = 9;
        const RunOutput single = run(sc9);
        CHECK(reps[0].mean_sum_rate_bps == single.summary.mean_sum_rate_bps);
        const Aggregate agg = aggregate_summaries(reps);
        CHECK(agg.mean_sum_rate_mean == single.summary.mean_sum_rate_bps);
    }
    SUBCASE("identical seeds collapse the interval") {
        const std::vector<RunSummary> reps = replicate(sc, {4, 4, 4, 4});
        const Aggregate agg = aggregate_summaries(reps);
        CHECK(agg.mean_sum_rate_ci95_hi - agg.mean_sum_rate_ci95_lo ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("empty seed list is a validation error") {
        CHECK_THROWS_AS(replicate(sc, {}), ValidationError);
    }
}
