#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gw/diffusion_core.hpp"
#include "gw/image.hpp"

namespace gw {

struct Payload {
    std::vector<uint8_t> bits;  // values 0/1
};

struct EccConfig {
    enum class Scheme { None, Repetition };
    Scheme scheme = Scheme::Repetition;
    int repetition_factor = 3;  // odd so majority vote is unambiguous
};

// Shared configuration for both toy codecs. The schedule and denoiser are
// borrowed references owned by the caller.
struct CodecConfig {
    enum class Kind { Sign, Stream };
    Kind kind = Kind::Sign;
    std::string key;
    EccConfig ecc;
    const NoiseSchedule* schedule = nullptr;
    const Denoiser* denoiser = nullptr;
    int height = 64;
    int width = 64;
    int payload_len = 64;
    int refine_iters = 8;
    double sigma0 = 0.005;  // stream codec injected-noise scale
};

// Effective repetition factor (1 for Scheme::None). Validates oddness.
int ecc_factor(const EccConfig& ecc);

std::vector<uint8_t> ecc_encode(const std::vector<uint8_t>& bits,
                                const EccConfig& ecc);
// Majority vote per group; input length must divide by the factor.
std::vector<uint8_t> ecc_decode(const std::vector<uint8_t>& raw,
                                const EccConfig& ecc);

struct EncodeResult {
    ImageTensor carrier;
    ImageTensor latent;  // the keyed latent the carrier was sampled from
};

struct DecodeResult {
    Payload payload;                // after ECC majority vote
    std::vector<uint8_t> raw_bits;  // before ECC
    // Sign codec: worst per-step inversion residual (above 1e-3 means the
    // latent estimate is untrustworthy).
    double worst_residual = 0.0;
    // Stream codec: per-step |correlation difference|; small margins flag a
    // marginal decision.
    std::vector<double> margins;
    // Sign codec: the estimated latent (empty for the stream codec).
    ImageTensor latent;
};

// Sign codec: forces the signs of the first n keyed-permuted latent
// positions to carry the ECC-expanded bits (magnitudes kept), then runs the
// deterministic reverse chain. Capacity: H*W*3 raw bits.
EncodeResult encode_sign(const Payload& payload, const CodecConfig& cfg);
DecodeResult decode_sign(const ImageTensor& carrier, const CodecConfig& cfg);

// Stream codec: at embedding step t = T - i the injected variance noise is
// drawn from keyed stream A (bit 0) or B (bit 1). Capacity: T - 1 raw bits.
EncodeResult encode_stream(const Payload& payload, const CodecConfig& cfg);
// swap_streams exchanges the two candidate streams (diagnostic: a clean
// carrier then decodes to the complement of every raw bit).
DecodeResult decode_stream(const ImageTensor& carrier, const CodecConfig& cfg,
                           bool swap_streams = false);

// Dispatch on cfg.kind.
EncodeResult codec_encode(const Payload& payload, const CodecConfig& cfg);
DecodeResult codec_decode(const ImageTensor& carrier, const CodecConfig& cfg);

}  // namespace gw
