#include "gw/quality_metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gw/diffusion_core.hpp"

namespace gw {

namespace {

constexpr double C1 = 0.01 * 0.01;
constexpr double C2 = 0.03 * 0.03;

// Valid-mode separable windowed mean of one H x W plane: returns
// (H - 2r) x (W - 2r) values.
std::vector<double> window_mean(const std::vector<double>& plane, int h, int w,
                                const std::vector<double>& k, int r) {
    const int taps = 2 * r + 1;
    const int wo = w - 2 * r;
    const int ho = h - 2 * r;
    std::vector<double> rows(static_cast<size_t>(h) * wo);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int d = 0; d < taps; ++d)
                acc += k[static_cast<size_t>(d)] *
                       plane[static_cast<size_t>(y) * w + x + d];
            rows[static_cast<size_t>(y) * wo + x] = acc;
        }
    }
    std::vector<double> out(static_cast<size_t>(ho) * wo);
    for (int y = 0; y < ho; ++y) {
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int d = 0; d < taps; ++d)
                acc += k[static_cast<size_t>(d)] *
                       rows[static_cast<size_t>(y + d) * wo + x];
            out[static_cast<size_t>(y) * wo + x] = acc;
        }
    }
    return out;
}

}  // namespace

double psnr(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "psnr");
    const size_t n = a.size();
    if (n == 0) throw std::invalid_argument("psnr: empty image");
    double mse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = (a.v[i] + 1.0) / 2.0 - (b.v[i] + 1.0) / 2.0;
        mse += d * d;
    }
    mse /= static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "ssim");
    const std::vector<double> k = gaussian_kernel(1.5);
    const int r = static_cast<int>(k.size() / 2);
    if (a.h < 2 * r + 1 || a.w < 2 * r + 1)
        throw std::invalid_argument("ssim: image smaller than the window");

    const int h = a.h, w = a.w, c = a.c;
    std::vector<double> xp(static_cast<size_t>(h) * w), yp(xp.size()),
        xx(xp.size()), yy(xp.size()), xy(xp.size());
    double total = 0.0;
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const size_t i = static_cast<size_t>(y) * w + x;
                const double xv = (a.at(y, x, ch) + 1.0) / 2.0;
                const double yv = (b.at(y, x, ch) + 1.0) / 2.0;
                xp[i] = xv;
                yp[i] = yv;
                xx[i] = xv * xv;
                yy[i] = yv * yv;
                xy[i] = xv * yv;
            }
        }
        const std::vector<double> mx = window_mean(xp, h, w, k, r);
        const std::vector<double> my = window_mean(yp, h, w, k, r);
        const std::vector<double> exx = window_mean(xx, h, w, k, r);
        const std::vector<double> eyy = window_mean(yy, h, w, k, r);
        const std::vector<double> exy = window_mean(xy, h, w, k, r);
        double acc = 0.0;
        const size_t n = mx.size();
        for (size_t i = 0; i < n; ++i) {
            const double vx = exx[i] - mx[i] * mx[i];
            const double vy = eyy[i] - my[i] * my[i];
            const double cxy = exy[i] - mx[i] * my[i];
            const double num = (2.0 * mx[i] * my[i] + C1) * (2.0 * cxy + C2);
            const double den = (mx[i] * mx[i] + my[i] * my[i] + C1) * (vx + vy + C2);
            acc += num / den;
        }
        total += acc / static_cast<double>(n);
    }
    return total / static_cast<double>(c);
}

double ber(const std::vector<uint8_t>& sent, const std::vector<uint8_t>& recv) {
    if (sent.size() != recv.size())
        throw std::invalid_argument("ber: length mismatch");
    if (sent.empty()) throw std::invalid_argument("ber: empty bit vectors");
    size_t bad = 0;
    for (size_t i = 0; i < sent.size(); ++i)
        if ((sent[i] != 0) != (recv[i] != 0)) ++bad;
    return static_cast<double>(bad) / static_cast<double>(sent.size());
}

bool decode_success(double ber_value, double threshold) {
    return ber_value <= threshold;
}

double failure_rate_percent(const std::vector<double>& bers, double threshold) {
    if (bers.empty())
        throw std::invalid_argument("failure_rate_percent: no records");
    size_t failed = 0;
    for (double v : bers)
        if (!decode_success(v, threshold)) ++failed;
    return 100.0 * static_cast<double>(failed) / static_cast<double>(bers.size());
}

MetricReport evaluate_pair(const ImageTensor& reference, const ImageTensor& out,
                           const std::vector<uint8_t>& sent,
                           const std::vector<uint8_t>& received,
                           double threshold) {
    MetricReport rep;
    rep.psnr_db = psnr(reference, out);
    rep.ssim = ssim(reference, out);
    if (!sent.empty() || !received.empty()) {
        rep.ber = ber(sent, received);
        rep.success = decode_success(*rep.ber, threshold);
    }
    return rep;
}

}  // namespace gw
