#ifndef UAVSIM_ENGINE_HPP
#define UAVSIM_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/metrics.hpp"
#include "uavsim/oracle.hpp"
#include "uavsim/scenario.hpp"

namespace uavsim {

struct RunOutput {
    RunSummary summary;
    std::vector<SlotRecord> records;
};

struct RunOptions {
    bool dump_search_tree = false;
};

// Execute one seeded simulation. Stops after the slot in which the last
// task is delivered (later slots carry no traffic) or at total_slots.
// The mean sum-rate averages over slots 1..completion (or every slot
// when the run does not complete).
RunOutput run(const Scenario& scenario, const RunOptions& options = {});

// Independent runs, one per seed, executed on `jobs` worker threads
// (0 = hardware concurrency). Results are ordered like `seeds`; a
// failed seed aborts replication with its error.
std::vector<RunSummary> replicate(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                  int jobs = 0, const std::string& out_dir = "");

// Write slots.csv + summary.csv (and search-tree dumps when recorded)
// into `dir`, creating it if needed.
void write_run_outputs(const std::string& dir, const Scenario& scenario, const RunOutput& output);

// --- Oracle instance files ------------------------------------------

// Load a SmallInstance from the structured-text instance format (see
// README). Unknown keys are hard errors.
oracle::SmallInstance load_instance(const std::string& path);
oracle::SmallInstance instance_from_config(const ConfigFile& file);

} // namespace uavsim

#endif
