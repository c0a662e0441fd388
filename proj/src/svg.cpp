#include "gw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gw {

namespace {

constexpr double FLOOR = 1e-6;
constexpr double W = 760, H = 480;
constexpr double ML = 70, MR = 180, MT = 40, MB = 55;

const char* PALETTE[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                         "#bcbd22", "#e377c2"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(int e) {
    return "1e" + std::to_string(e);
}

}  // namespace

void write_frontier_svg(const std::string& path,
                        const std::vector<FrontierSeries>& series,
                        const std::string& title) {
    double lo = 0.0, hi = -12.0;
    for (const FrontierSeries& s : series)
        for (auto& p : s.points) {
            const double lx = std::log10(std::max(p.first, FLOOR));
            lo = std::min(lo, lx);
            hi = std::max(hi, lx);
        }
    if (series.empty() || hi < lo) {
        lo = std::log10(FLOOR);
        hi = 0.0;
    }
    int e0 = static_cast<int>(std::floor(lo));
    int e1 = static_cast<int>(std::ceil(hi));
    if (e1 <= e0) e1 = e0 + 1;

    const double pw = W - ML - MR, ph = H - MT - MB;
    auto sx = [&](double v) {
        const double lx = std::log10(std::max(v, FLOOR));
        return ML + (lx - e0) / (e1 - e0) * pw;
    };
    auto sy = [&](double pct) { return MT + (100.0 - pct) / 100.0 * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) +
           "\" height=\"" + fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " +
           fmt(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(ML) + "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"15\" font-weight=\"bold\">" + title + "</text>\n";

    for (int e = e0; e <= e1; ++e) {
        const double x = ML + static_cast<double>(e - e0) / (e1 - e0) * pw;
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(MT) + "\" x2=\"" +
               fmt(x) + "\" y2=\"" + fmt(MT + ph) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(MT + ph + 20) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"middle\">" + tick_label(e) + "</text>\n";
    }
    for (int pct = 0; pct <= 100; pct += 20) {
        const double y = sy(pct);
        svg += "<line x1=\"" + fmt(ML) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
               fmt(ML + pw) + "\" y2=\"" + fmt(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt(ML - 8) + "\" y=\"" + fmt(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"end\">" + std::to_string(pct) + "</text>\n";
    }
    svg += "<rect x=\"" + fmt(ML) + "\" y=\"" + fmt(MT) + "\" width=\"" +
           fmt(pw) + "\" height=\"" + fmt(ph) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + fmt(ML + pw / 2) + "\" y=\"" + fmt(H - 12) +
           "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">1 - SSIM (log scale)</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt(MT + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " + fmt(MT + ph / 2) + ")\">"
           "decoder failure rate (%)</text>\n";

    size_t ci = 0;
    for (const FrontierSeries& s : series) {
        const char* color = PALETTE[ci % (sizeof(PALETTE) / sizeof(*PALETTE))];
        std::vector<std::pair<double, double>> pts = s.points;
        std::sort(pts.begin(), pts.end());
        if (pts.size() > 1) {
            std::string poly = "<polyline fill=\"none\" stroke=\"";
            poly += color;
            poly += "\" stroke-width=\"1.5\" points=\"";
            for (auto& p : pts)
                poly += fmt(sx(p.first)) + "," + fmt(sy(p.second)) + " ";
            poly += "\"/>\n";
            svg += poly;
        }
        for (auto& p : pts)
            svg += "<circle cx=\"" + fmt(sx(p.first)) + "\" cy=\"" +
                   fmt(sy(p.second)) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
        const double ly = MT + 16 + 18.0 * static_cast<double>(ci);
        svg += "<circle cx=\"" + fmt(ML + pw + 16) + "\" cy=\"" + fmt(ly - 4) +
               "\" r=\"4\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + fmt(ML + pw + 26) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label +
               "</text>\n";
        ++ci;
    }
    svg += "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_frontier_svg: cannot open " + path);
    f << svg;
    if (!f)
        throw std::runtime_error("write_frontier_svg: write failed for " + path);
}

}  // namespace gw
