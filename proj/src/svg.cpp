#include "uavsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uavsim/errors.hpp"
#include "uavsim/sensing.hpp"

namespace uavsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::ofstream open_svg(const std::string& path, int width, int height) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SimError("cannot open '" + path + "'");
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

void write_trajectory_svg(const std::string& path, const Scenario& scenario,
                          const std::vector<SlotRecord>& records) {
    const int width = 760, height = 760, margin = 55;

    double min_x = scenario.bs.x, max_x = scenario.bs.x;
    double min_y = scenario.bs.y, max_y = scenario.bs.y;
    const auto stretch = [&](double x, double y, double pad) {
        min_x = std::min(min_x, x - pad);
        max_x = std::max(max_x, x + pad);
        min_y = std::min(min_y, y - pad);
        max_y = std::max(max_y, y + pad);
    };
    std::vector<double> crown_radius;
    for (const TaskSpec& t : scenario.tasks) {
        SensingTask probe;
        probe.center = t.center;
        probe.failure_tolerance = t.failure_tolerance;
        const double r = feasible_region(scenario.sensing, probe).radius;
        crown_radius.push_back(r);
        stretch(t.center.x, t.center.y, r);
    }
    for (const SlotRecord& rec : records)
        for (const UavRecord& u : rec.uavs)
            stretch(u.position.x, u.position.y, 0.0);
    const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
    const double scale = (width - 2.0 * margin) / span;
    const auto X = [&](double x) { return margin + (x - min_x) * scale; };
    const auto Y = [&](double y) { return height - margin - (y - min_y) * scale; };

    std::ofstream out = open_svg(path, width, height);
    // Task crowns (ground footprint) and centers.
    for (size_t i = 0; i < scenario.tasks.size(); ++i) {
        const TaskSpec& t = scenario.tasks[i];
        out << "<circle cx=\"" << fmt(X(t.center.x)) << "\" cy=\"" << fmt(Y(t.center.y))
            << "\" r=\"" << fmt(crown_radius[i] * scale)
            << "\" fill=\"#e8f0e8\" stroke=\"#88aa88\" stroke-dasharray=\"4 3\"/>\n";
        out << "<circle cx=\"" << fmt(X(t.center.x)) << "\" cy=\"" << fmt(Y(t.center.y))
            << "\" r=\"3\" fill=\"#557755\"/>\n"
            << "<text x=\"" << fmt(X(t.center.x) + 5) << "\" y=\"" << fmt(Y(t.center.y) - 5)
            << "\" font-size=\"11\" fill=\"#557755\">task " << t.id << "</text>\n";
    }
    // BS marker.
    out << "<rect x=\"" << fmt(X(scenario.bs.x) - 6) << "\" y=\"" << fmt(Y(scenario.bs.y) - 6)
        << "\" width=\"12\" height=\"12\" fill=\"black\"/>\n"
        << "<text x=\"" << fmt(X(scenario.bs.x) + 8) << "\" y=\"" << fmt(Y(scenario.bs.y) + 4)
        << "\" font-size=\"12\">BS</text>\n";
    // Per-UAV paths.
    for (size_t i = 0; i < scenario.uavs.size(); ++i) {
        const int id = scenario.uavs[i].id;
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        out << fmt(X(scenario.uavs[i].position.x)) << ',' << fmt(Y(scenario.uavs[i].position.y));
        for (const SlotRecord& rec : records)
            for (const UavRecord& u : rec.uavs)
                if (u.id == id)
                    out << ' ' << fmt(X(u.position.x)) << ',' << fmt(Y(u.position.y));
        out << "\"/>\n";
        out << "<circle cx=\"" << fmt(X(scenario.uavs[i].position.x)) << "\" cy=\""
            << fmt(Y(scenario.uavs[i].position.y)) << "\" r=\"4\" fill=\"" << color << "\"/>\n"
            << "<text x=\"" << fmt(X(scenario.uavs[i].position.x) + 6) << "\" y=\""
            << fmt(Y(scenario.uavs[i].position.y) - 6) << "\" font-size=\"11\" fill=\"" << color
            << "\">uav " << id << "</text>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"13\">top-down trajectories ("
        << to_string(scenario.scheme) << ", seed " << scenario.seed << ")</text>\n";
    out << "</svg>\n";
}

void write_sumrate_svg(const std::string& path, const std::vector<SumRateSeries>& series) {
    const int width = 720, height = 480, margin = 70;
    double min_x = 1e300, max_x = -1e300, max_y = 0.0;
    for (const SumRateSeries& s : series)
        for (const SumRatePoint& p : s.points) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.hi);
        }
    if (series.empty() || min_x > max_x)
        throw SimError("write_sumrate_svg: no data");
    if (max_x == min_x)
        max_x = min_x + 1.0;
    max_y = max_y <= 0.0 ? 1.0 : max_y * 1.08;

    const auto X = [&](double x) {
        return margin + (x - min_x) / (max_x - min_x) * (width - 2.0 * margin);
    };
    const auto Y = [&](double y) { return height - margin - y / max_y * (height - 2.0 * margin); };

    std::ofstream out = open_svg(path, width, height);
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << margin
        << "\" y2=\"" << margin << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = max_y / 1.08 * i / 5.0;
        out << "<line x1=\"" << margin - 4 << "\" y1=\"" << fmt(Y(y)) << "\" x2=\"" << margin
            << "\" y2=\"" << fmt(Y(y)) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << margin - 8 << "\" y=\"" << fmt(Y(y) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(y / 1e6) << "</text>\n";
    }
    // x ticks at each distinct subchannel count of the first series
    for (const SumRatePoint& p : series.front().points)
        out << "<line x1=\"" << fmt(X(p.x)) << "\" y1=\"" << height - margin << "\" x2=\""
            << fmt(X(p.x)) << "\" y2=\"" << height - margin + 4 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt(X(p.x)) << "\" y=\"" << height - margin + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(p.x) << "</text>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 18
        << "\" font-size=\"12\" text-anchor=\"middle\">subchannels</text>\n"
        << "<text x=\"18\" y=\"" << height / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << height / 2
        << ")\">mean sum-rate (Mbit/s)</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const SumRateSeries& s = series[si];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const SumRatePoint& p : s.points)
            out << fmt(X(p.x)) << ',' << fmt(Y(p.mean)) << ' ';
        out << "\"/>\n";
        for (const SumRatePoint& p : s.points) {
            out << "<circle cx=\"" << fmt(X(p.x)) << "\" cy=\"" << fmt(Y(p.mean))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            out << "<line x1=\"" << fmt(X(p.x)) << "\" y1=\"" << fmt(Y(p.lo)) << "\" x2=\""
                << fmt(X(p.x)) << "\" y2=\"" << fmt(Y(p.hi)) << "\" stroke=\"" << color
                << "\"/>\n";
        }
        out << "<rect x=\"" << width - margin - 170 << "\" y=\"" << margin + 20 * si
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n"
            << "<text x=\"" << width - margin - 152 << "\" y=\"" << margin + 20 * si + 10
            << "\" font-size=\"12\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace uavsim
