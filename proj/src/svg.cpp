#include "proxynas/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "proxynas/errors.hpp"

namespace proxynas {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double place(double v) const { return (v - lo) / (hi - lo); }
};

Range padded_range(double lo, double hi) {
    double pad = (hi - lo) * 0.05;
    if (pad <= 0.0) pad = std::max(1e-9, std::abs(hi) * 0.05 + 1e-9);
    return {lo - pad, hi + pad};
}

} // namespace

std::string front_svg(const std::vector<ScoredArch>& candidates, const ParetoSet& front,
                      const SvgPlotConfig& cfg) {
    if (candidates.empty() && front.members.empty())
        throw EmptyInput("nothing to plot");

    std::vector<const ScoredArch*> all;
    for (const auto& a : candidates) all.push_back(&a);
    for (const auto& a : front.members) all.push_back(&a);

    double lat_lo = all.front()->latency_ms, lat_hi = lat_lo;
    double acc_lo = all.front()->accuracy, acc_hi = acc_lo;
    for (const ScoredArch* a : all) {
        lat_lo = std::min(lat_lo, a->latency_ms);
        lat_hi = std::max(lat_hi, a->latency_ms);
        acc_lo = std::min(acc_lo, a->accuracy);
        acc_hi = std::max(acc_hi, a->accuracy);
    }
    const Range x = padded_range(lat_lo, lat_hi);
    const Range y = padded_range(acc_lo, acc_hi);

    const double left = 64, right = 16, top = cfg.title.empty() ? 16 : 36, bottom = 48;
    const double plot_w = cfg.width - left - right;
    const double plot_h = cfg.height - top - bottom;
    const auto px = [&](double lat) { return left + x.place(lat) * plot_w; };
    const auto py = [&](double acc) { return top + (1.0 - y.place(acc)) * plot_h; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(cfg.width) +
         "\" height=\"" + std::to_string(cfg.height) + "\" viewBox=\"0 0 " +
         std::to_string(cfg.width) + " " + std::to_string(cfg.height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!cfg.title.empty())
        s += "<text x=\"" + num(left + plot_w / 2) +
             "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"14\" fill=\"#333\">" + cfg.title + "</text>\n";

    // frame and ticks
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double f = static_cast<double>(i) / ticks;
        const double lat = x.lo + f * (x.hi - x.lo);
        const double acc = y.lo + f * (y.hi - y.lo);
        const double tx = left + f * plot_w;
        const double ty = top + (1.0 - f) * plot_h;
        s += "<line x1=\"" + num(tx) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(tx) +
             "\" y2=\"" + num(top + plot_h + 5) + "\" stroke=\"#999\"/>\n";
        s += "<text x=\"" + num(tx) + "\" y=\"" + num(top + plot_h + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"#333\">" + num(lat) + "</text>\n";
        s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(ty) + "\" x2=\"" + num(left) +
             "\" y2=\"" + num(ty) + "\" stroke=\"#999\"/>\n";
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(ty + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"#333\">" + num(acc) + "</text>\n";
    }
    s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(top + plot_h + 36) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#333\">latency (ms)</text>\n";
    s += "<text x=\"14\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#333\" transform=\"rotate(-90 14 " + num(top + plot_h / 2) +
         ")\">accuracy</text>\n";

    for (const auto& a : candidates)
        s += "<circle cx=\"" + num(px(a.latency_ms)) + "\" cy=\"" + num(py(a.accuracy)) +
             "\" r=\"3\" fill=\"#b0b0b0\" fill-opacity=\"0.7\"/>\n";

    std::vector<const ScoredArch*> line;
    for (const auto& a : front.members) line.push_back(&a);
    std::sort(line.begin(), line.end(), [](const ScoredArch* a, const ScoredArch* b) {
        if (a->latency_ms != b->latency_ms) return a->latency_ms < b->latency_ms;
        return a->accuracy < b->accuracy;
    });
    if (line.size() > 1) {
        std::string points;
        for (const ScoredArch* a : line) {
            if (!points.empty()) points += ' ';
            points += num(px(a->latency_ms)) + "," + num(py(a->accuracy));
        }
        s += "<polyline points=\"" + points +
             "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }
    for (const ScoredArch* a : line)
        s += "<circle cx=\"" + num(px(a->latency_ms)) + "\" cy=\"" + num(py(a->accuracy)) +
             "\" r=\"4\" fill=\"#d62728\"/>\n";

    s += "</svg>\n";
    return s;
}

} // namespace proxynas
