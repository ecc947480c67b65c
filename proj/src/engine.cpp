#include "uavsim/engine.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "uavsim/errors.hpp"
#include "uavsim/protocol.hpp"

namespace uavsim {

RunOutput run(const Scenario& scenario, const RunOptions& options) {
    World world = World::from_scenario(scenario);
    world.dump_search_tree = options.dump_search_tree;

    RunOutput out;
    out.summary.scheme = to_string(scenario.scheme);
    out.summary.seed = scenario.seed;

    double sum_rate_total = 0.0;
    for (int slot = 0; slot < scenario.total_slots; ++slot) {
        SlotRecord rec = run_slot(world);
        sum_rate_total += rec.sum_rate_bps;
        out.summary.qos_violations += rec.qos_violations;
        out.summary.bnb_nodes += rec.bnb_nodes;
        out.summary.bnb_budget_hits += rec.bnb_budget_hit ? 1 : 0;
        out.summary.dc_iterations += rec.dc_iterations;
        out.records.push_back(std::move(rec));
        if (world.all_delivered()) {
            out.summary.completion_slot = world.slot;
            out.summary.completion_time_s = world.now_s;
            break;
        }
    }
    out.summary.slots_run = world.slot;
    const int window = out.summary.completion_slot > 0 ? out.summary.completion_slot
                                                       : scenario.total_slots;
    out.summary.mean_sum_rate_bps = window > 0 ? sum_rate_total / window : 0.0;
    double delivered = 0.0;
    if (!out.records.empty())
        for (const UavRecord& u : out.records.back().uavs)
            delivered += u.delivered_bits;
    out.summary.bits_delivered = delivered;
    return out;
}

void write_run_outputs(const std::string& dir, const Scenario& scenario, const RunOutput& output) {
    std::filesystem::create_directories(dir);
    std::vector<int> ids;
    for (const UavSpec& u : scenario.uavs)
        ids.push_back(u.id);
    write_slots_csv(dir + "/slots.csv", ids, output.records);
    write_summary_csv(dir + "/summary.csv", output.summary);
    for (const SlotRecord& rec : output.records) {
        if (rec.bnb_dump.empty())
            continue;
        char name[64];
        std::snprintf(name, sizeof(name), "/search_tree_slot%05d.txt", rec.slot);
        std::ofstream out(dir + name, std::ios::binary);
        if (!out)
            throw SimError("cannot write search tree dump in '" + dir + "'");
        out << "slot " << rec.slot << "\n" << rec.bnb_dump;
    }
}

std::vector<RunSummary> replicate(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                  int jobs, const std::string& out_dir) {
    if (seeds.empty())
        throw ValidationError("replicate: empty seed list");
    if (jobs <= 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));

    std::vector<RunSummary> summaries(seeds.size());
    std::vector<std::string> errors(seeds.size());
    std::atomic<size_t> next{0};

    const auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= seeds.size())
                return;
            try {
                Scenario sc = scenario;
                sc.seed = seeds[i];
                RunOutput out = run(sc);
                if (!out_dir.empty())
                    write_run_outputs(out_dir + "/run_" + std::to_string(seeds[i]), sc, out);
                summaries[i] = out.summary;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();

    for (size_t i = 0; i < seeds.size(); ++i)
        if (!errors[i].empty())
            throw SimError("replicate: seed " + std::to_string(seeds[i]) + " failed: " + errors[i]);
    return summaries;
}

// ---------------------------------------------------------- instances

oracle::SmallInstance instance_from_config(const ConfigFile& file) {
    oracle::SmallInstance inst;
    const ConfigSection* head = file.find_one("instance");
    if (!head)
        throw ValidationError("instance file: missing section [instance]");
    head->require_known_keys({"links", "subchannels", "r_min_bps", "p_max_w", "bandwidth_hz",
                              "noise_psd_dbm_hz", "noise_w", "default_cross_gain"});
    inst.n_links = static_cast<int>(head->get_int("links"));
    inst.n_subchannels = static_cast<int>(head->get_int("subchannels"));
    if (inst.n_links < 1 || inst.n_links > 6)
        throw ValidationError("[instance] links must be in 1..6");
    if (inst.n_subchannels < 1 || inst.n_subchannels > 4)
        throw ValidationError("[instance] subchannels must be in 1..4");
    inst.r_min_bps = head->get_double_or("r_min_bps", 0.0);
    inst.p_max_w = head->get_double("p_max_w");
    inst.bandwidth_hz = head->get_double_or("bandwidth_hz", 180e3);
    if (head->has("noise_w"))
        inst.noise_w = head->get_double("noise_w");
    else
        inst.noise_w = std::pow(10.0, (head->get_double_or("noise_psd_dbm_hz", -174.0) - 30.0) / 10.0) *
                       inst.bandwidth_hz;
    const double default_cross = head->get_double_or("default_cross_gain", -1.0);

    const auto parse_gain_row = [&](const ConfigSection* s, const char* key, bool positive) {
        std::istringstream in(s->get_string(key));
        std::vector<double> row;
        double v;
        while (in >> v)
            row.push_back(v);
        if (static_cast<int>(row.size()) != inst.n_subchannels)
            throw ValidationError("[" + s->name + "] '" + key + "' needs exactly " +
                                  std::to_string(inst.n_subchannels) + " values");
        for (double g : row)
            if (positive ? !(g > 0.0) : !(g >= 0.0))
                throw ValidationError("[" + s->name + "] '" + key + "' entries must be " +
                                      (positive ? "> 0" : ">= 0"));
        return row;
    };

    const auto link_sections = file.find_all("link");
    if (static_cast<int>(link_sections.size()) != inst.n_links)
        throw ValidationError("instance file: expected " + std::to_string(inst.n_links) +
                              " [link] sections, found " + std::to_string(link_sections.size()));
    inst.is_u2n.resize(inst.n_links);
    inst.qos_exempt.assign(inst.n_links, false);
    inst.direct_gain.resize(inst.n_links);
    for (int l = 0; l < inst.n_links; ++l) {
        const ConfigSection* s = link_sections[l];
        s->require_known_keys({"type", "exempt", "gain"});
        const std::string type = s->get_string_or("type", "u2n");
        if (type != "u2n" && type != "u2u")
            throw ValidationError("[link] type must be u2n or u2u");
        inst.is_u2n[l] = type == "u2n";
        inst.qos_exempt[l] = s->get_int_or("exempt", 0) != 0;
        inst.direct_gain[l] = parse_gain_row(s, "gain", true);
    }

    inst.cross_gain.assign(
        inst.n_links, std::vector<std::vector<double>>(inst.n_links, std::vector<double>()));
    for (int t = 0; t < inst.n_links; ++t)
        for (int l = 0; l < inst.n_links; ++l)
            if (t != l && default_cross >= 0.0)
                inst.cross_gain[t][l].assign(inst.n_subchannels, default_cross);
    for (const ConfigSection* s : file.find_all("cross")) {
        s->require_known_keys({"tx", "rx", "gain"});
        const int tx = static_cast<int>(s->get_int("tx"));
        const int rx = static_cast<int>(s->get_int("rx"));
        if (tx < 0 || tx >= inst.n_links || rx < 0 || rx >= inst.n_links || tx == rx)
            throw ValidationError("[cross] bad pair tx=" + std::to_string(tx) +
                                  " rx=" + std::to_string(rx));
        inst.cross_gain[tx][rx] = parse_gain_row(s, "gain", false);
    }
    for (int t = 0; t < inst.n_links; ++t)
        for (int l = 0; l < inst.n_links; ++l)
            if (t != l && inst.cross_gain[t][l].empty())
                throw ValidationError("instance file: missing [cross] gains for tx=" +
                                      std::to_string(t) + " rx=" + std::to_string(l) +
                                      " (or set default_cross_gain)");
    for (const ConfigSection& s : file.sections)
        if (s.name != "instance" && s.name != "link" && s.name != "cross")
            throw ValidationError("instance file: unknown section [" + s.name + "]");
    return inst;
}

oracle::SmallInstance load_instance(const std::string& path) {
    return instance_from_config(ConfigFile::parse_file(path));
}

} // namespace uavsim
