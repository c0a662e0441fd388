#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gw/image.hpp"

namespace gw {

// Peak signal-to-noise ratio in dB, computed after remapping [-1, 1] to
// [0, 1] so the peak is 1. Identical images give +inf.
double psnr(const ImageTensor& a, const ImageTensor& b);

// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5), computed per
// channel on the [0, 1] remap and averaged. Throws when either spatial
// dimension is smaller than the window.
double ssim(const ImageTensor& a, const ImageTensor& b);

// Fraction of positions where the bit vectors disagree. Throws on length
// mismatch or empty input.
double ber(const std::vector<uint8_t>& sent, const std::vector<uint8_t>& recv);

// A decode counts as successful while its BER stays at or below threshold;
// above it the recovered payload is considered destroyed.
bool decode_success(double ber_value, double threshold = 0.48);

// Percentage of images whose decode failed (BER above threshold).
double failure_rate_percent(const std::vector<double>& bers,
                            double threshold = 0.48);

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::optional<double> ber;
    bool success = false;
};

MetricReport evaluate_pair(const ImageTensor& reference, const ImageTensor& out,
                           const std::vector<uint8_t>& sent,
                           const std::vector<uint8_t>& received,
                           double threshold = 0.48);

}  // namespace gw
