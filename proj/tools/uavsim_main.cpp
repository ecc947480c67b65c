// Command-line front end: run / replicate / oracle / plot.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavsim/engine.hpp"
#include "uavsim/errors.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/oracle.hpp"
#include "uavsim/svg.hpp"

namespace {

using namespace uavsim;

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    // Either "N" (seeds 1..N) or a comma-separated list.
    std::vector<std::uint64_t> seeds;
    if (spec.find(',') == std::string::npos) {
        const std::uint64_t n = std::stoull(spec);
        for (std::uint64_t s = 1; s <= n; ++s)
            seeds.push_back(s);
        return seeds;
    }
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            seeds.push_back(std::stoull(item));
    return seeds;
}

Scenario load_with_overrides(const std::string& path, const std::string& scheme_override,
                             std::uint64_t seed, bool seed_set) {
    Scenario sc = load_scenario(path);
    if (!scheme_override.empty())
        sc.scheme = parse_scheme(scheme_override);
    if (seed_set)
        sc.seed = seed;
    return sc;
}

int cmd_run(const std::string& scenario_path, const std::string& scheme, std::uint64_t seed,
            bool seed_set, const std::string& out_dir, bool dump_tree) {
    const Scenario sc = load_with_overrides(scenario_path, scheme, seed, seed_set);
    RunOptions opts;
    opts.dump_search_tree = dump_tree;
    const RunOutput out = run(sc, opts);
    if (!out_dir.empty())
        write_run_outputs(out_dir, sc, out);
    std::printf("scheme=%s seed=%llu slots=%d completion_slot=%d mean_sum_rate_bps=%s "
                "qos_violations=%d\n",
                out.summary.scheme.c_str(), static_cast<unsigned long long>(out.summary.seed),
                out.summary.slots_run, out.summary.completion_slot,
                format_double(out.summary.mean_sum_rate_bps).c_str(), out.summary.qos_violations);
    if (out.summary.bnb_budget_hits > 0)
        std::printf("note: branch-and-bound node budget hit in %llu slots (allocation kept "
                    "best incumbent)\n",
                    static_cast<unsigned long long>(out.summary.bnb_budget_hits));
    return 0;
}

int cmd_replicate(const std::string& scenario_path, const std::string& scheme,
                  const std::string& seeds_spec, const std::string& out_dir, int jobs) {
    const Scenario sc = load_with_overrides(scenario_path, scheme, 0, false);
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);
    const std::vector<RunSummary> summaries = replicate(sc, seeds, jobs, out_dir);
    const Aggregate agg = aggregate_summaries(summaries);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_summaries_csv(out_dir + "/summaries.csv", summaries);
        write_aggregate_csv(out_dir + "/aggregate.csv", agg);
    }
    std::printf("scheme=%s runs=%d mean_sum_rate_bps=%s ci95=[%s, %s] completed=%d\n",
                to_string(sc.scheme), agg.n, format_double(agg.mean_sum_rate_mean).c_str(),
                format_double(agg.mean_sum_rate_ci95_lo).c_str(),
                format_double(agg.mean_sum_rate_ci95_hi).c_str(), agg.completed_runs);
    return 0;
}

int cmd_oracle(const std::string& instance_path) {
    const oracle::SmallInstance inst = load_instance(instance_path);
    const oracle::AllocationResult alloc = oracle::exhaustive_allocation(inst);
    std::printf("exhaustive_allocation: feasible=%d objective_bps=%s candidates=%llu\n",
                alloc.feasible ? 1 : 0, format_double(alloc.objective_bps).c_str(),
                static_cast<unsigned long long>(alloc.candidates_scanned));
    if (alloc.feasible) {
        for (int l = 0; l < inst.n_links; ++l) {
            std::printf("  link %d subchannels:", l);
            for (int c = 0; c < inst.n_subchannels; ++c)
                if (alloc.allocation[l][c])
                    std::printf(" %d", c);
            std::printf("\n");
        }
        if (inst.n_links <= 3) {
            const oracle::PowerResult power =
                oracle::grid_power_search(inst, alloc.allocation, 0.02 * inst.p_max_w);
            std::printf("grid_power_search (res 0.02*p_max): objective_bps=%s powers:",
                        format_double(power.objective_bps).c_str());
            for (double p : power.powers)
                std::printf(" %s", format_double(p).c_str());
            std::printf("\n");
        }
    }
    return 0;
}

int cmd_plot(const std::string& scenario_path, const std::string& seeds_spec,
             const std::string& subchannels_spec, const std::string& out_dir, int jobs) {
    const Scenario base = load_scenario(scenario_path);
    std::filesystem::create_directories(out_dir);

    std::vector<int> subchannel_counts;
    {
        std::istringstream in(subchannels_spec);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty())
                subchannel_counts.push_back(std::stoi(item));
    }
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);

    const Scheme schemes[] = {Scheme::Cooperative, Scheme::NonCooperative, Scheme::Separate};
    std::vector<SumRateSeries> series;
    for (Scheme scheme : schemes) {
        SumRateSeries s;
        s.label = to_string(scheme);
        for (int n_sub : subchannel_counts) {
            Scenario sc = base;
            sc.scheme = scheme;
            sc.subchannels = n_sub;
            const Aggregate agg = aggregate_summaries(replicate(sc, seeds, jobs));
            s.points.push_back({static_cast<double>(n_sub), agg.mean_sum_rate_mean,
                                agg.mean_sum_rate_ci95_lo, agg.mean_sum_rate_ci95_hi});
        }
        series.push_back(std::move(s));
    }
    write_sumrate_svg(out_dir + "/sum_rate_vs_subchannels.svg", series);

    for (Scheme scheme : schemes) {
        Scenario sc = base;
        sc.scheme = scheme;
        const RunOutput out = run(sc);
        write_trajectory_svg(out_dir + "/trajectories_" + to_string(scheme) + ".svg", sc,
                             out.records);
    }
    std::printf("wrote %s/sum_rate_vs_subchannels.svg and trajectory plots\n", out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative cellular UAV sensing simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, scheme_override, seeds_spec = "10", instance_path;
    std::string subchannels_spec = "4,6,8,10,12";
    std::uint64_t seed = 0;
    bool dump_tree = false;
    int jobs = 0;

    CLI::App* c_run = app.add_subcommand("run", "run one seeded simulation");
    c_run->add_option("--scenario", scenario_path, "scenario file")->required();
    bool seed_set = false;
    c_run->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    c_run->add_option("--out", out_dir, "output directory for CSVs");
    c_run->add_option("--scheme", scheme_override, "scheme override");
    c_run->add_flag("--dump-search-tree", dump_tree, "write per-slot B&B search statistics");

    CLI::App* c_rep = app.add_subcommand("replicate", "run one scenario over many seeds");
    c_rep->add_option("--scenario", scenario_path, "scenario file")->required();
    c_rep->add_option("--seeds", seeds_spec, "seed count N (seeds 1..N) or comma list");
    c_rep->add_option("--out", out_dir, "output directory");
    c_rep->add_option("--scheme", scheme_override, "scheme override");
    c_rep->add_option("--jobs", jobs, "worker threads (0 = hardware)");

    CLI::App* c_oracle = app.add_subcommand("oracle", "print brute-force reference values");
    c_oracle->add_option("--instance", instance_path, "instance file")->required();

    CLI::App* c_plot = app.add_subcommand("plot", "emit SVG plots (runs the scenario per scheme)");
    c_plot->add_option("--scenario", scenario_path, "scenario file")->required();
    c_plot->add_option("--seeds", seeds_spec, "seed count or comma list");
    c_plot->add_option("--subchannels", subchannels_spec, "comma list of subchannel counts");
    c_plot->add_option("--out", out_dir, "output directory")->required();
    c_plot->add_option("--jobs", jobs, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed())
            return cmd_run(scenario_path, scheme_override, seed, seed_set, out_dir, dump_tree);
        if (c_rep->parsed())
            return cmd_replicate(scenario_path, scheme_override, seeds_spec, out_dir, jobs);
        if (c_oracle->parsed())
            return cmd_oracle(instance_path);
        if (c_plot->parsed())
            return cmd_plot(scenario_path, seeds_spec, subchannels_spec, out_dir, jobs);
    } catch (const uavsim::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const uavsim::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
