#ifndef UAVSIM_METRICS_HPP
#define UAVSIM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/geometry.hpp"
#include "uavsim/link.hpp"

namespace uavsim {

struct LinkRecord {
    int uav = -1;
    LinkMode mode = LinkMode::U2N;
    int relay = -1;                  // -1 unless mode == U2U
    std::vector<int> subchannels;
    double tx_power_w = 0.0;
    double min_sinr_db = 0.0;        // worst realized subchannel SINR
    double realized_rate_bps = 0.0;
    bool qos_exempt = false;
    bool relay_fallback = false;
};

struct UavRecord {
    int id = -1;
    Point3 position;
    double speed = 0.0;
    int active_task = -1;
    std::string task_state = "-";
    double collected_bits = 0.0;     // across all tasks
    double delivered_bits = 0.0;
    bool sensing = false;
};

struct SlotRecord {
    int slot = 0;                    // 1-based
    double time_s = 0.0;
    double sum_rate_bps = 0.0;       // sum of realized link rates
    int qos_violations = 0;          // rate misses + relay fallbacks + deadline conflicts
    std::vector<LinkRecord> links;   // ascending uav id
    std::vector<UavRecord> uavs;     // ascending id
    // solver statistics for the slot
    std::uint64_t bnb_nodes = 0;
    int dc_iterations = 0;
    int rrm_rounds = 0;
    bool bnb_budget_hit = false;
    std::string bnb_dump;            // filled only when search-tree dumping is on
};

struct RunSummary {
    std::string scheme;
    std::uint64_t seed = 0;
    int slots_run = 0;
    int completion_slot = -1;        // -1: not completed within total_slots
    double completion_time_s = -1.0;
    double mean_sum_rate_bps = 0.0;  // averaged over slots 1..completion (or all slots)
    double bits_delivered = 0.0;
    int qos_violations = 0;
    std::uint64_t bnb_nodes = 0;
    std::uint64_t bnb_budget_hits = 0;
    std::uint64_t dc_iterations = 0;
};

// CSV writers. Doubles are printed with "%.17g" so identical runs are
// byte-identical.
std::string format_double(double v);
void write_slots_csv(const std::string& path, const std::vector<int>& uav_ids,
                     const std::vector<SlotRecord>& records);
void write_summary_csv(const std::string& path, const RunSummary& summary);
void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& summaries);

struct Aggregate {
    int n = 0;
    double mean_sum_rate_mean = 0.0;
    double mean_sum_rate_ci95_lo = 0.0;
    double mean_sum_rate_ci95_hi = 0.0;
    double completion_time_mean = -1.0;  // over completed runs only
    int completed_runs = 0;
    double qos_violations_mean = 0.0;
};

Aggregate aggregate_summaries(const std::vector<RunSummary>& summaries);
void write_aggregate_csv(const std::string& path, const Aggregate& agg);

} // namespace uavsim

#endif
