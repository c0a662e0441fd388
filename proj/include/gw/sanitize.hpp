#pragma once

#include "gw/determinism.hpp"
#include "gw/diffusion_core.hpp"
#include "gw/image.hpp"

namespace gw {

enum class AdsUpdate { Fgsm, Qdir };

// Configuration for the one-step adversarial sanitizer. The schedule and
// denoiser are borrowed references owned by the caller.
struct AdsConfig {
    int t = 1;              // diffusion step used for the forward/reverse pass
    double eps_adv = 0.01;  // adversarial step size; 0 disables the update
    double delta = 1e-8;    // stabilizer for the direction-normalized update
    AdsUpdate update = AdsUpdate::Fgsm;
    StreamKey noise_stream;
    const NoiseSchedule* schedule = nullptr;
    const Denoiser* denoiser = nullptr;
};

// Mean squared reconstruction error (1/(3HW)) * sum((x0_hat - x0)^2) where
// x0_hat is the one-step clean-image estimate of x_t.
double ads_loss(const ImageTensor& x_t, const ImageTensor& x0,
                const AdsConfig& cfg);

// Exact gradient of ads_loss in x_t, using one predict and one vjp call.
ImageTensor ads_grad(const ImageTensor& x_t, const ImageTensor& x0,
                     const AdsConfig& cfg);

// x + eps_adv * sign(G) componentwise (sign(0) = 0), clamped to [-1, 1].
ImageTensor fgsm_update(const ImageTensor& x, const ImageTensor& grad,
                        double eps_adv);

// x + eps_adv * G / (||G(u,v)||_2 + delta) with the norm taken per pixel
// across the three channels, clamped to [-1, 1]. Per-pixel step length is
// at most eps_adv.
ImageTensor qdir_update(const ImageTensor& x, const ImageTensor& grad,
                        double eps_adv, double delta);

// One keyed forward-noise step, an optional adversarial update in diffusion
// space, and a one-step reverse transform back to image space. Consumes
// exactly 2*H*W*3 draws from cfg.noise_stream. With eps_adv == 0 this is the
// plain forward/reverse round trip (the diffusion_1step baseline).
ImageTensor ads_sanitize(const ImageTensor& x0, const AdsConfig& cfg);

enum class BaselineKind { Identity, Blur, Resize, DctQuantize, Diffusion1Step };

struct BaselineConfig {
    BaselineKind kind = BaselineKind::Identity;
    double blur_sigma = 1.0;          // reflect-padded Gaussian blur
    double resize_factor = 7.0 / 8.0; // down-and-up bilinear scale
    int quality = 90;                 // JPEG-style quantization quality 1..100
    AdsConfig diffusion;              // used by Diffusion1Step (eps_adv forced 0)
};

ImageTensor baseline_apply(const ImageTensor& x0, const BaselineConfig& cfg);

}  // namespace gw
