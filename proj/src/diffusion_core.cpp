#include "gw/diffusion_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gw {

namespace {

void check_t(int t, const NoiseSchedule& sched, const char* where) {
    if (t < 1 || t > sched.T)
        throw std::out_of_range(std::string(where) + ": t out of range");
}

// out = ca * a + cb * b
ImageTensor lincomb(double ca, const ImageTensor& a, double cb,
                    const ImageTensor& b) {
    require_same_shape(a, b, "lincomb");
    ImageTensor out(a.h, a.w, a.c);
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = ca * a.v[i] + cb * b.v[i];
    return out;
}

ImageTensor scaled(double s, const ImageTensor& a) {
    ImageTensor out(a.h, a.w, a.c);
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = s * a.v[i];
    return out;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
    double m = 0.0;
    const size_t n = a.size();
    for (size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

void conv_circular_x(const ImageTensor& in, ImageTensor& out,
                     const std::vector<double>& k, int r) {
    const int h = in.h, w = in.w, c = in.c;
    const int taps = 2 * r + 1;
    std::vector<int> wrap(static_cast<size_t>(w) + 2 * r);
    for (int i = 0; i < w + 2 * r; ++i)
        wrap[static_cast<size_t>(i)] = ((i - r) % w + w) % w;
    for (int y = 0; y < h; ++y) {
        const double* row = &in.v[static_cast<size_t>(y) * w * c];
        double* orow = &out.v[static_cast<size_t>(y) * w * c];
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int d = 0; d < taps; ++d)
                    acc += k[static_cast<size_t>(d)] *
                           row[static_cast<size_t>(wrap[static_cast<size_t>(x + d)]) * c + ch];
                orow[static_cast<size_t>(x) * c + ch] = acc;
            }
        }
    }
}

void conv_circular_y(const ImageTensor& in, ImageTensor& out,
                     const std::vector<double>& k, int r) {
    const int h = in.h, w = in.w, c = in.c;
    const int taps = 2 * r + 1;
    const size_t rowlen = static_cast<size_t>(w) * c;
    std::vector<int> wrap(static_cast<size_t>(h) + 2 * r);
    for (int i = 0; i < h + 2 * r; ++i)
        wrap[static_cast<size_t>(i)] = ((i - r) % h + h) % h;
    for (int y = 0; y < h; ++y) {
        double* orow = &out.v[static_cast<size_t>(y) * rowlen];
        std::fill(orow, orow + rowlen, 0.0);
        for (int d = 0; d < taps; ++d) {
            const double kd = k[static_cast<size_t>(d)];
            const double* irow =
                &in.v[static_cast<size_t>(wrap[static_cast<size_t>(y + d)]) * rowlen];
            for (size_t j = 0; j < rowlen; ++j) orow[j] += kd * irow[j];
        }
    }
}

}  // namespace

double NoiseSchedule::abar_at(int t) const {
    if (t < 0 || t > T)
        throw std::out_of_range("NoiseSchedule::abar_at: t out of range");
    return t == 0 ? 1.0 : abar[static_cast<size_t>(t - 1)];
}

NoiseSchedule make_schedule(int T, double beta_start, double beta_end) {
    if (T < 1)
        throw std::invalid_argument("make_schedule: T must be >= 1");
    if (!(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0))
        throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.T = T;
    s.beta.resize(static_cast<size_t>(T));
    if (T == 1) {
        s.beta[0] = beta_start;
    } else {
        const double step = (beta_end - beta_start) / (T - 1);
        for (int i = 0; i < T; ++i)
            s.beta[static_cast<size_t>(i)] = beta_start + i * step;
        s.beta[static_cast<size_t>(T - 1)] = beta_end;
    }
    s.alpha.resize(static_cast<size_t>(T));
    s.abar.resize(static_cast<size_t>(T));
    double prod = 1.0;
    for (int i = 0; i < T; ++i) {
        s.alpha[static_cast<size_t>(i)] = 1.0 - s.beta[static_cast<size_t>(i)];
        prod *= s.alpha[static_cast<size_t>(i)];
        s.abar[static_cast<size_t>(i)] = prod;
    }
    return s;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double t = static_cast<double>(i) / sigma;
        k[static_cast<size_t>(i + r)] = std::exp(-0.5 * t * t);
        sum += k[static_cast<size_t>(i + r)];
    }
    for (double& v : k) v /= sum;
    return k;
}

BlurDenoiser::BlurDenoiser(double sigma)
    : sigma_(sigma), kern_(gaussian_kernel(sigma)) {
    radius_ = static_cast<int>(kern_.size() / 2);
}

ImageTensor BlurDenoiser::blur(const ImageTensor& x) const {
    ImageTensor tmp(x.h, x.w, x.c);
    ImageTensor out(x.h, x.w, x.c);
    conv_circular_x(x, tmp, kern_, radius_);
    conv_circular_y(tmp, out, kern_, radius_);
    return out;
}

ImageTensor BlurDenoiser::predict(const ImageTensor& x, int t,
                                  const NoiseSchedule& sched) const {
    check_t(t, sched, "BlurDenoiser::predict");
    const double abar = sched.abar_at(t);
    const double sa = std::sqrt(abar);
    const double inv = 1.0 / std::sqrt(1.0 - abar);
    ImageTensor out = blur(x);
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = (x.v[i] - sa * out.v[i]) * inv;
    return out;
}

ImageTensor BlurDenoiser::vjp(const ImageTensor& x, int t,
                              const NoiseSchedule& sched,
                              const ImageTensor& u) const {
    check_t(t, sched, "BlurDenoiser::vjp");
    require_same_shape(x, u, "BlurDenoiser::vjp");
    const double abar = sched.abar_at(t);
    const double sa = std::sqrt(abar);
    const double inv = 1.0 / std::sqrt(1.0 - abar);
    ImageTensor out = blur(u);
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = (u.v[i] - sa * out.v[i]) * inv;
    return out;
}

ImageTensor ZeroDenoiser::predict(const ImageTensor& x, int t,
                                  const NoiseSchedule& sched) const {
    check_t(t, sched, "ZeroDenoiser::predict");
    return ImageTensor(x.h, x.w, x.c);
}

ImageTensor ZeroDenoiser::vjp(const ImageTensor& x, int t,
                              const NoiseSchedule& sched,
                              const ImageTensor& u) const {
    check_t(t, sched, "ZeroDenoiser::vjp");
    require_same_shape(x, u, "ZeroDenoiser::vjp");
    return ImageTensor(u.h, u.w, u.c);
}

ImageTensor clamp_signed(ImageTensor x) {
    for (double& v : x.v) v = std::clamp(v, -1.0, 1.0);
    return x;
}

ImageTensor forward_step(const ImageTensor& x0, int t, const ImageTensor& eps,
                         const NoiseSchedule& sched) {
    check_t(t, sched, "forward_step");
    require_same_shape(x0, eps, "forward_step");
    const double abar = sched.abar_at(t);
    return lincomb(std::sqrt(abar), x0, std::sqrt(1.0 - abar), eps);
}

ImageTensor reverse_estimate(const ImageTensor& x_t, int t, const Denoiser& den,
                             const NoiseSchedule& sched) {
    check_t(t, sched, "reverse_estimate");
    const double abar = sched.abar_at(t);
    const double sn = std::sqrt(1.0 - abar);
    const double inv = 1.0 / std::sqrt(abar);
    ImageTensor out = den.predict(x_t, t, sched);
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = (x_t.v[i] - sn * out.v[i]) * inv;
    return out;
}

ImageTensor ddim_step(const ImageTensor& x_t, int t, const NoiseSchedule& sched,
                      const Denoiser& den) {
    check_t(t, sched, "ddim_step");
    const double abar_t = sched.abar_at(t);
    const double abar_p = sched.abar_at(t - 1);
    const ImageTensor eps = den.predict(x_t, t, sched);
    ImageTensor out(x_t.h, x_t.w, x_t.c);
    const double ca = std::sqrt(abar_p / abar_t);
    const double ce = std::sqrt(1.0 - abar_p) -
                      std::sqrt(abar_p / abar_t) * std::sqrt(1.0 - abar_t);
    const size_t n = x_t.size();
    for (size_t i = 0; i < n; ++i) out.v[i] = ca * x_t.v[i] + ce * eps.v[i];
    return out;
}

ImageTensor ddim_sample(ImageTensor x_T, const Denoiser& den,
                        const NoiseSchedule& sched) {
    for (int t = sched.T; t >= 1; --t) x_T = ddim_step(x_T, t, sched, den);
    return x_T;
}

ImageTensor step_inverse(const ImageTensor& x_prev, const ImageTensor& eps_hat,
                         int t, const NoiseSchedule& sched) {
    check_t(t, sched, "step_inverse");
    require_same_shape(x_prev, eps_hat, "step_inverse");
    const double abar_t = sched.abar_at(t);
    const double abar_p = sched.abar_at(t - 1);
    const double cr = std::sqrt(abar_t / abar_p);
    const double ce = std::sqrt(1.0 - abar_t) - cr * std::sqrt(1.0 - abar_p);
    return lincomb(cr, x_prev, ce, eps_hat);
}

InvertResult ddim_invert(const ImageTensor& x0, const Denoiser& den,
                         const NoiseSchedule& sched, int refine_iters,
                         double stop_tol) {
    if (refine_iters < 0)
        throw std::invalid_argument("ddim_invert: refine_iters must be >= 0");
    InvertResult res;
    res.latent = x0;
    for (int t = 1; t <= sched.T; ++t) {
        const ImageTensor& x_prev = res.latent;
        ImageTensor x = step_inverse(x_prev, den.predict(x_prev, t, sched), t, sched);
        for (int k = 0; k < refine_iters; ++k) {
            ImageTensor xn =
                step_inverse(x_prev, den.predict(x, t, sched), t, sched);
            const double delta = max_abs_diff(xn, x);
            x = std::move(xn);
            if (delta <= stop_tol) break;
        }
        const double resid = max_abs_diff(ddim_step(x, t, sched, den), x_prev);
        res.worst_residual = std::max(res.worst_residual, resid);
        res.latent = std::move(x);
    }
    return res;
}

}  // namespace gw
