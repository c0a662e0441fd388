#include "gw/sanitize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gw/hypercomplex.hpp"

namespace gw {

namespace {

void check_ads(const AdsConfig& cfg, const char* where) {
    if (cfg.schedule == nullptr || cfg.denoiser == nullptr)
        throw std::invalid_argument(std::string(where) +
                                    ": schedule and denoiser are required");
    if (cfg.t < 1 || cfg.t > cfg.schedule->T)
        throw std::out_of_range(std::string(where) + ": t out of range");
    if (cfg.eps_adv < 0.0)
        throw std::invalid_argument(std::string(where) + ": eps_adv must be >= 0");
    if (!(cfg.delta > 0.0))
        throw std::invalid_argument(std::string(where) + ": delta must be > 0");
}

ImageTensor blur_reflect(const ImageTensor& x, double sigma) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    if (r >= x.h || r >= x.w)
        throw std::invalid_argument("blur_reflect: kernel radius exceeds image");
    const int h = x.h, w = x.w, c = x.c;
    const int taps = 2 * r + 1;

    auto mirror = [](int i, int n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * n - 2 - i;
        return i;
    };

    ImageTensor tmp(h, w, c), out(h, w, c);
    for (int y = 0; y < h; ++y)
        for (int xo = 0; xo < w; ++xo)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int d = 0; d < taps; ++d)
                    acc += k[static_cast<size_t>(d)] *
                           x.at(y, mirror(xo + d - r, w), ch);
                tmp.at(y, xo, ch) = acc;
            }
    for (int y = 0; y < h; ++y)
        for (int xo = 0; xo < w; ++xo)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int d = 0; d < taps; ++d)
                    acc += k[static_cast<size_t>(d)] *
                           tmp.at(mirror(y + d - r, h), xo, ch);
                out.at(y, xo, ch) = acc;
            }
    return out;
}

ImageTensor resize_bilinear(const ImageTensor& x, int h2, int w2) {
    const int h = x.h, w = x.w, c = x.c;
    ImageTensor out(h2, w2, c);
    for (int y = 0; y < h2; ++y) {
        double sy = (y + 0.5) * static_cast<double>(h) / h2 - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, h - 1);
        const double wy = sy - y0;
        for (int xo = 0; xo < w2; ++xo) {
            double sx = (xo + 0.5) * static_cast<double>(w) / w2 - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
            const int x0i = static_cast<int>(sx);
            const int x1i = std::min(x0i + 1, w - 1);
            const double wx = sx - x0i;
            for (int ch = 0; ch < c; ++ch) {
                const double top = (1.0 - wx) * x.at(y0, x0i, ch) +
                                   wx * x.at(y0, x1i, ch);
                const double bot = (1.0 - wx) * x.at(y1, x0i, ch) +
                                   wx * x.at(y1, x1i, ch);
                out.at(y, xo, ch) = (1.0 - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

constexpr int JPEG_LUMA[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

ImageTensor dct_quantize(const ImageTensor& x, int quality) {
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("dct_quantize: quality must be in 1..100");
    const double S = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
    double quant[64];
    for (int i = 0; i < 64; ++i)
        quant[i] = std::max(1.0, std::floor((JPEG_LUMA[i] * S + 50.0) / 100.0));

    // Orthonormal 8x8 DCT-II basis.
    double M[8][8];
    constexpr double PI = 3.14159265358979323846;
    for (int k = 0; k < 8; ++k)
        for (int i = 0; i < 8; ++i)
            M[k][i] = std::cos(PI * (2 * i + 1) * k / 16.0) *
                      std::sqrt((k == 0 ? 1.0 : 2.0) / 8.0);

    const int h = x.h, w = x.w, c = x.c;
    ImageTensor out(h, w, c);
    for (int ch = 0; ch < c; ++ch) {
        for (int by = 0; by < h; by += 8) {
            for (int bx = 0; bx < w; bx += 8) {
                const int bh = std::min(8, h - by);
                const int bw = std::min(8, w - bx);
                double blk[8][8];
                for (int yy = 0; yy < bh; ++yy)
                    for (int xx = 0; xx < bw; ++xx)
                        blk[yy][xx] =
                            (x.at(by + yy, bx + xx, ch) + 1.0) * 127.5 - 128.0;
                for (int yy = bh; yy < 8; ++yy)
                    for (int xx = 0; xx < bw; ++xx) blk[yy][xx] = blk[bh - 1][xx];
                for (int xx = bw; xx < 8; ++xx)
                    for (int yy = 0; yy < 8; ++yy) blk[yy][xx] = blk[yy][bw - 1];

                double d[8][8], tmp[8][8];
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        double acc = 0.0;
                        for (int m = 0; m < 8; ++m) acc += M[i][m] * blk[m][j];
                        tmp[i][j] = acc;
                    }
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        double acc = 0.0;
                        for (int m = 0; m < 8; ++m) acc += tmp[i][m] * M[j][m];
                        d[i][j] = acc;
                    }
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        const double q = quant[i * 8 + j];
                        d[i][j] = std::nearbyint(d[i][j] / q) * q;
                    }
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        double acc = 0.0;
                        for (int m = 0; m < 8; ++m) acc += M[m][i] * d[m][j];
                        tmp[i][j] = acc;
                    }
                for (int yy = 0; yy < bh; ++yy)
                    for (int xx = 0; xx < bw; ++xx) {
                        double acc = 0.0;
                        for (int m = 0; m < 8; ++m) acc += tmp[yy][m] * M[m][xx];
                        out.at(by + yy, bx + xx, ch) =
                            (acc + 128.0) / 127.5 - 1.0;
                    }
            }
        }
    }
    return clamp_signed(std::move(out));
}

}  // namespace

double ads_loss(const ImageTensor& x_t, const ImageTensor& x0,
                const AdsConfig& cfg) {
    check_ads(cfg, "ads_loss");
    require_same_shape(x_t, x0, "ads_loss");
    const ImageTensor x0_hat =
        reverse_estimate(x_t, cfg.t, *cfg.denoiser, *cfg.schedule);
    double acc = 0.0;
    const size_t n = x_t.size();
    for (size_t i = 0; i < n; ++i) {
        const double d = x0_hat.v[i] - x0.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

ImageTensor ads_grad(const ImageTensor& x_t, const ImageTensor& x0,
                     const AdsConfig& cfg) {
    check_ads(cfg, "ads_grad");
    require_same_shape(x_t, x0, "ads_grad");
    const NoiseSchedule& sched = *cfg.schedule;
    const double abar = sched.abar_at(cfg.t);
    const double sn = std::sqrt(1.0 - abar);
    const double inv_sa = 1.0 / std::sqrt(abar);
    ImageTensor r = reverse_estimate(x_t, cfg.t, *cfg.denoiser, sched);
    const size_t n = r.size();
    for (size_t i = 0; i < n; ++i) r.v[i] -= x0.v[i];
    const ImageTensor back = cfg.denoiser->vjp(x_t, cfg.t, sched, r);
    const double scale = 2.0 / static_cast<double>(n);
    ImageTensor grad(x_t.h, x_t.w, x_t.c);
    for (size_t i = 0; i < n; ++i)
        grad.v[i] = scale * (r.v[i] - sn * back.v[i]) * inv_sa;
    return grad;
}

ImageTensor fgsm_update(const ImageTensor& x, const ImageTensor& grad,
                        double eps_adv) {
    require_same_shape(x, grad, "fgsm_update");
    ImageTensor out(x.h, x.w, x.c);
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
        const double g = grad.v[i];
        const double s = (g > 0.0) ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
        out.v[i] = std::clamp(x.v[i] + eps_adv * s, -1.0, 1.0);
    }
    return out;
}

ImageTensor qdir_update(const ImageTensor& x, const ImageTensor& grad,
                        double eps_adv, double delta) {
    require_same_shape(x, grad, "qdir_update");
    if (x.c != 3)
        throw std::invalid_argument("qdir_update: expected 3 channels");
    if (!(delta > 0.0))
        throw std::invalid_argument("qdir_update: delta must be > 0");
    ImageTensor out(x.h, x.w, x.c);
    for (int y = 0; y < x.h; ++y) {
        for (int xo = 0; xo < x.w; ++xo) {
            const Quat g{0.0, grad.at(y, xo, 0), grad.at(y, xo, 1),
                         grad.at(y, xo, 2)};
            const double scale = eps_adv / (quat_norm(g) + delta);
            for (int ch = 0; ch < 3; ++ch)
                out.at(y, xo, ch) = std::clamp(
                    x.at(y, xo, ch) + scale * grad.at(y, xo, ch), -1.0, 1.0);
        }
    }
    return out;
}

ImageTensor ads_sanitize(const ImageTensor& x0, const AdsConfig& cfg) {
    check_ads(cfg, "ads_sanitize");
    require_min_extent(x0, "ads_sanitize");
    const NoiseSchedule& sched = *cfg.schedule;
    const ImageTensor eps = gaussian_field(cfg.noise_stream, x0.h, x0.w, x0.c);
    ImageTensor x_t = forward_step(x0, cfg.t, eps, sched);
    if (cfg.eps_adv > 0.0) {
        const ImageTensor grad = ads_grad(x_t, x0, cfg);
        x_t = cfg.update == AdsUpdate::Fgsm
                  ? fgsm_update(x_t, grad, cfg.eps_adv)
                  : qdir_update(x_t, grad, cfg.eps_adv, cfg.delta);
    }
    return clamp_signed(reverse_estimate(x_t, cfg.t, *cfg.denoiser, sched));
}

ImageTensor baseline_apply(const ImageTensor& x0, const BaselineConfig& cfg) {
    require_min_extent(x0, "baseline_apply");
    switch (cfg.kind) {
        case BaselineKind::Identity:
            return x0;
        case BaselineKind::Blur:
            return clamp_signed(blur_reflect(x0, cfg.blur_sigma));
        case BaselineKind::Resize: {
            if (!(cfg.resize_factor > 0.0 && cfg.resize_factor <= 1.0))
                throw std::invalid_argument(
                    "baseline_apply: resize factor must be in (0, 1]");
            const int h2 = std::max(
                1, static_cast<int>(std::floor(x0.h * cfg.resize_factor)));
            const int w2 = std::max(
                1, static_cast<int>(std::floor(x0.w * cfg.resize_factor)));
            return clamp_signed(
                resize_bilinear(resize_bilinear(x0, h2, w2), x0.h, x0.w));
        }
        case BaselineKind::DctQuantize:
            return dct_quantize(x0, cfg.quality);
        case BaselineKind::Diffusion1Step: {
            AdsConfig d = cfg.diffusion;
            d.eps_adv = 0.0;
            return ads_sanitize(x0, d);
        }
    }
    throw std::invalid_argument("baseline_apply: unknown baseline");
}

}  // namespace gw
