#pragma once

#include <vector>

#include "gw/image.hpp"

namespace gw {

// Linear beta schedule with abar[t] the running product of (1 - beta). Time
// indices run 1..T; abar_at(0) == 1 by convention.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta, alpha, abar;

    double abar_at(int t) const;
};

NoiseSchedule make_schedule(int T, double beta_start, double beta_end);

// Noise predictor interface: predict returns eps_hat(x, t); vjp applies the
// transpose of predict's Jacobian in x to the cotangent u.
struct Denoiser {
    virtual ~Denoiser() = default;
    virtual ImageTensor predict(const ImageTensor& x, int t,
                                const NoiseSchedule& sched) const = 0;
    virtual ImageTensor vjp(const ImageTensor& x, int t,
                            const NoiseSchedule& sched,
                            const ImageTensor& u) const = 0;
};

// Normalized 1-D Gaussian taps with radius ceil(3 * sigma).
std::vector<double> gaussian_kernel(double sigma);

// Training-free stand-in denoiser: treats the circular Gaussian blur of x as
// the clean-image estimate, so eps_hat = (x - sqrt(abar_t) * blur(x)) /
// sqrt(1 - abar_t). The blur is linear and self-adjoint, which makes the vjp
// the same formula applied to the cotangent.
class BlurDenoiser : public Denoiser {
  public:
    explicit BlurDenoiser(double sigma = 1.0);
    ImageTensor blur(const ImageTensor& x) const;
    ImageTensor predict(const ImageTensor& x, int t,
                        const NoiseSchedule& sched) const override;
    ImageTensor vjp(const ImageTensor& x, int t, const NoiseSchedule& sched,
                    const ImageTensor& u) const override;
    double sigma() const { return sigma_; }

  private:
    double sigma_;
    std::vector<double> kern_;
    int radius_;
};

// Predicts eps_hat = 0, so the clean-image estimate is x / sqrt(abar_t).
// Every transform built on it is a pure rescaling, which makes round trips
// exact; useful as a test denoiser.
class ZeroDenoiser : public Denoiser {
  public:
    ImageTensor predict(const ImageTensor& x, int t,
                        const NoiseSchedule& sched) const override;
    ImageTensor vjp(const ImageTensor& x, int t, const NoiseSchedule& sched,
                    const ImageTensor& u) const override;
};

ImageTensor clamp_signed(ImageTensor x);

// x_t = sqrt(abar_t) * x0 + sqrt(1 - abar_t) * eps, t in 1..T.
ImageTensor forward_step(const ImageTensor& x0, int t, const ImageTensor& eps,
                         const NoiseSchedule& sched);

// One-step clean-image estimate x0_hat = (x_t - sqrt(1 - abar_t) * eps_hat) /
// sqrt(abar_t).
ImageTensor reverse_estimate(const ImageTensor& x_t, int t, const Denoiser& den,
                             const NoiseSchedule& sched);

// Deterministic reverse update t -> t-1 (one predict call).
ImageTensor ddim_step(const ImageTensor& x_t, int t, const NoiseSchedule& sched,
                      const Denoiser& den);

// Full reverse chain x_T -> x_0. No clamping inside the loop.
ImageTensor ddim_sample(ImageTensor x_T, const Denoiser& den,
                        const NoiseSchedule& sched);

// Algebraic inverse of ddim_step given the noise estimate at level t.
ImageTensor step_inverse(const ImageTensor& x_prev, const ImageTensor& eps_hat,
                         int t, const NoiseSchedule& sched);

struct InvertResult {
    ImageTensor latent;
    // Largest |ddim_step(x_t, t) - x_{t-1}| across steps; values above 1e-3
    // mean the fixed-point refinement did not converge and the latent is
    // untrustworthy.
    double worst_residual = 0.0;

    bool converged(double tol = 1e-3) const { return worst_residual <= tol; }
};

// Forward chain x_0 -> x_T by fixed-point inversion of each ddim_step.
// refine_iters bounds the per-step iteration count; iteration stops early
// once successive iterates differ by at most stop_tol.
InvertResult ddim_invert(const ImageTensor& x0, const Denoiser& den,
                         const NoiseSchedule& sched, int refine_iters,
                         double stop_tol = 1e-13);

}  // namespace gw
