#include "uavsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation anywhere
    if (!out)
        throw SimError("cannot open output file '" + path + "'");
    return out;
}

std::string join_subchannels(const std::vector<int>& subchannels) {
    if (subchannels.empty())
        return "-";
    std::ostringstream os;
    for (size_t i = 0; i < subchannels.size(); ++i) {
        if (i)
            os << '|';
        os << subchannels[i];
    }
    return os.str();
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_slots_csv(const std::string& path, const std::vector<int>& uav_ids,
                     const std::vector<SlotRecord>& records) {
    std::ofstream out = open_out(path);
    out << "slot,time_s,sum_rate_bps,qos_violations,bnb_nodes,dc_iterations,rrm_rounds";
    for (int id : uav_ids)
        out << ",u" << id << "_mode,u" << id << "_relay,u" << id << "_subch,u" << id << "_power_w,u"
            << id << "_min_sinr_db,u" << id << "_rate_bps,u" << id << "_x,u" << id << "_y,u" << id
            << "_z,u" << id << "_speed,u" << id << "_task,u" << id << "_task_state,u" << id
            << "_collected_bits,u" << id << "_delivered_bits,u" << id << "_sensing";
    out << "\n";
    for (const SlotRecord& r : records) {
        out << r.slot << ',' << format_double(r.time_s) << ',' << format_double(r.sum_rate_bps)
            << ',' << r.qos_violations << ',' << r.bnb_nodes << ',' << r.dc_iterations << ','
            << r.rrm_rounds;
        for (size_t i = 0; i < uav_ids.size(); ++i) {
            const LinkRecord* link = nullptr;
            for (const LinkRecord& l : r.links)
                if (l.uav == uav_ids[i])
                    link = &l;
            const UavRecord& u = r.uavs[i];
            if (link) {
                out << ',' << (link->mode == LinkMode::U2N ? (link->relay_fallback ? "N!" : "N") : "U")
                    << ',' << link->relay << ',' << join_subchannels(link->subchannels) << ','
                    << format_double(link->tx_power_w) << ',' << format_double(link->min_sinr_db)
                    << ',' << format_double(link->realized_rate_bps);
            } else {
                out << ",-,-1,-,0,0,0";
            }
            out << ',' << format_double(u.position.x) << ',' << format_double(u.position.y) << ','
                << format_double(u.position.z) << ',' << format_double(u.speed) << ','
                << u.active_task << ',' << u.task_state << ',' << format_double(u.collected_bits)
                << ',' << format_double(u.delivered_bits) << ',' << (u.sensing ? 1 : 0);
        }
        out << "\n";
    }
}

void write_summary_csv(const std::string& path, const RunSummary& summary) {
    std::vector<RunSummary> one{summary};
    write_summaries_csv(path, one);
}

void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& summaries) {
    std::ofstream out = open_out(path);
    out << "scheme,seed,slots_run,completion_slot,completion_time_s,mean_sum_rate_bps,"
           "bits_delivered,qos_violations,bnb_nodes,bnb_budget_hits,dc_iterations\n";
    for (const RunSummary& s : summaries)
        out << s.scheme << ',' << s.seed << ',' << s.slots_run << ',' << s.completion_slot << ','
            << format_double(s.completion_time_s) << ',' << format_double(s.mean_sum_rate_bps)
            << ',' << format_double(s.bits_delivered) << ',' << s.qos_violations << ','
            << s.bnb_nodes << ',' << s.bnb_budget_hits << ',' << s.dc_iterations << "\n";
}

Aggregate aggregate_summaries(const std::vector<RunSummary>& summaries) {
    Aggregate agg;
    agg.n = static_cast<int>(summaries.size());
    if (agg.n == 0)
        return agg;
    double sum = 0.0, sum2 = 0.0, viol = 0.0, ct = 0.0;
    for (const RunSummary& s : summaries) {
        sum += s.mean_sum_rate_bps;
        sum2 += s.mean_sum_rate_bps * s.mean_sum_rate_bps;
        viol += s.qos_violations;
        if (s.completion_slot >= 0) {
            ++agg.completed_runs;
            ct += s.completion_time_s;
        }
    }
    agg.mean_sum_rate_mean = sum / agg.n;
    const double var = agg.n > 1 ? std::max(0.0, (sum2 - sum * sum / agg.n) / (agg.n - 1)) : 0.0;
    const double half = 1.959963984540054 * std::sqrt(var / agg.n);
    agg.mean_sum_rate_ci95_lo = agg.mean_sum_rate_mean - half;
    agg.mean_sum_rate_ci95_hi = agg.mean_sum_rate_mean + half;
    agg.qos_violations_mean = viol / agg.n;
    agg.completion_time_mean = agg.completed_runs > 0 ? ct / agg.completed_runs : -1.0;
    return agg;
}

void write_aggregate_csv(const std::string& path, const Aggregate& agg) {
    std::ofstream out = open_out(path);
    out << "runs,mean_sum_rate_mean,mean_sum_rate_ci95_lo,mean_sum_rate_ci95_hi,"
           "completed_runs,completion_time_mean,qos_violations_mean\n";
    out << agg.n << ',' << format_double(agg.mean_sum_rate_mean) << ','
        << format_double(agg.mean_sum_rate_ci95_lo) << ','
        << format_double(agg.mean_sum_rate_ci95_hi) << ',' << agg.completed_runs << ','
        << format_double(agg.completion_time_mean) << ',' << format_double(agg.qos_violations_mean)
        << "\n";
}

} // namespace uavsim
