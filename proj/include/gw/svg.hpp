#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gw {

struct FrontierSeries {
    std::string label;
    // (distortion = 1 - SSIM, decoder failure rate in percent)
    std::vector<std::pair<double, double>> points;
};

// Scatter/line plot of the distortion-vs-failure frontier: log-scaled x axis
// (distortion floored at 1e-6), linear y in 0..100, one colored series per
// method with a legend. Self-contained SVG, no external references.
void write_frontier_svg(const std::string& path,
                        const std::vector<FrontierSeries>& series,
                        const std::string& title);

}  // namespace gw
