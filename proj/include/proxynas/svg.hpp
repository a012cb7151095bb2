#pragma once

#include <string>
#include <vector>

#include "proxynas/pareto.hpp"

namespace proxynas {

struct SvgPlotConfig {
    int width = 720;
    int height = 480;
    std::string title;
};

/// Accuracy-versus-latency scatter: every candidate in gray, front members
/// highlighted and joined by a staircase in latency order.  Self-contained
/// SVG markup, deterministic for fixed input.
std::string front_svg(const std::vector<ScoredArch>& candidates, const ParetoSet& front,
                      const SvgPlotConfig& cfg = {});

} // namespace proxynas
