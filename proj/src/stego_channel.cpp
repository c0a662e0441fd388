#include "gw/stego_channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gw/determinism.hpp"

namespace gw {

namespace {

void check_config(const CodecConfig& cfg, const char* where) {
    if (cfg.schedule == nullptr || cfg.denoiser == nullptr)
        throw std::invalid_argument(std::string(where) +
                                    ": schedule and denoiser are required");
    if (cfg.payload_len <= 0)
        throw std::invalid_argument(std::string(where) +
                                    ": payload length must be positive");
    if (cfg.height < 8 || cfg.width < 8)
        throw std::invalid_argument(std::string(where) +
                                    ": carrier must be at least 8x8");
    if (cfg.refine_iters < 0)
        throw std::invalid_argument(std::string(where) +
                                    ": refine_iters must be >= 0");
}

int raw_len(const CodecConfig& cfg) {
    return cfg.payload_len * ecc_factor(cfg.ecc);
}

void check_payload(const Payload& p, const CodecConfig& cfg, const char* where) {
    if (p.bits.size() != static_cast<size_t>(cfg.payload_len))
        throw std::invalid_argument(std::string(where) +
                                    ": payload length differs from config");
}

// Deterministic part of a stream embedding step: variance sigma0^2 is
// reserved for the injected field.
ImageTensor det_step(const ImageTensor& x, int t, const CodecConfig& cfg) {
    const NoiseSchedule& sched = *cfg.schedule;
    const double ab_t = sched.abar_at(t);
    const double ab_p = sched.abar_at(t - 1);
    const ImageTensor eps = cfg.denoiser->predict(x, t, sched);
    const double inv_sa = 1.0 / std::sqrt(ab_t);
    const double sn_t = std::sqrt(1.0 - ab_t);
    const double sa_p = std::sqrt(ab_p);
    const double c = std::sqrt(std::max(1.0 - ab_p - cfg.sigma0 * cfg.sigma0, 0.0));
    ImageTensor out(x.h, x.w, x.c);
    const size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
        const double x0 = (x.v[i] - sn_t * eps.v[i]) * inv_sa;
        out.v[i] = sa_p * x0 + c * eps.v[i];
    }
    return out;
}

ImageTensor stream_field(const CodecConfig& cfg, uint64_t sid, int index) {
    const uint64_t span = 2ULL * cfg.height * cfg.width * 3ULL;
    StreamKey k{cfg.key, sid, static_cast<uint64_t>(index) * span};
    return gaussian_field(k, cfg.height, cfg.width, 3);
}

}  // namespace

int ecc_factor(const EccConfig& ecc) {
    if (ecc.scheme == EccConfig::Scheme::None) return 1;
    if (ecc.repetition_factor <= 0 || ecc.repetition_factor % 2 == 0)
        throw std::invalid_argument(
            "ecc_factor: repetition factor must be odd and positive");
    return ecc.repetition_factor;
}

std::vector<uint8_t> ecc_encode(const std::vector<uint8_t>& bits,
                                const EccConfig& ecc) {
    const int k = ecc_factor(ecc);
    std::vector<uint8_t> out;
    out.reserve(bits.size() * static_cast<size_t>(k));
    for (uint8_t b : bits)
        for (int i = 0; i < k; ++i) out.push_back(b != 0 ? 1 : 0);
    return out;
}

std::vector<uint8_t> ecc_decode(const std::vector<uint8_t>& raw,
                                const EccConfig& ecc) {
    const int k = ecc_factor(ecc);
    if (raw.size() % static_cast<size_t>(k) != 0)
        throw std::invalid_argument(
            "ecc_decode: length not divisible by the repetition factor");
    std::vector<uint8_t> out(raw.size() / static_cast<size_t>(k));
    for (size_t g = 0; g < out.size(); ++g) {
        int sum = 0;
        for (int i = 0; i < k; ++i)
            sum += raw[g * static_cast<size_t>(k) + static_cast<size_t>(i)] != 0;
        out[g] = (2 * sum > k) ? 1 : 0;
    }
    return out;
}

EncodeResult encode_sign(const Payload& payload, const CodecConfig& cfg) {
    check_config(cfg, "encode_sign");
    check_payload(payload, cfg, "encode_sign");
    const int n_raw = raw_len(cfg);
    const int64_t capacity = static_cast<int64_t>(cfg.height) * cfg.width * 3;
    if (n_raw > capacity)
        throw std::invalid_argument("encode_sign: payload exceeds capacity");

    const std::vector<uint8_t> raw = ecc_encode(payload.bits, cfg.ecc);
    const std::vector<int64_t> perm =
        keyed_permutation(cfg.key, SID_PERM, capacity);
    StreamKey lk{cfg.key, SID_LATENT, 0};
    ImageTensor latent = gaussian_field(lk, cfg.height, cfg.width, 3);
    for (int i = 0; i < n_raw; ++i) {
        const size_t p = static_cast<size_t>(perm[static_cast<size_t>(i)]);
        const double mag = std::abs(latent.v[p]);
        latent.v[p] = raw[static_cast<size_t>(i)] != 0 ? mag : -mag;
    }
    EncodeResult res;
    res.carrier = clamp_signed(ddim_sample(latent, *cfg.denoiser, *cfg.schedule));
    res.latent = std::move(latent);
    return res;
}

DecodeResult decode_sign(const ImageTensor& carrier, const CodecConfig& cfg) {
    check_config(cfg, "decode_sign");
    if (carrier.h != cfg.height || carrier.w != cfg.width || carrier.c != 3)
        throw std::invalid_argument("decode_sign: carrier shape differs from config");
    const int n_raw = raw_len(cfg);
    const int64_t capacity = static_cast<int64_t>(cfg.height) * cfg.width * 3;
    if (n_raw > capacity)
        throw std::invalid_argument("decode_sign: payload exceeds capacity");

    const std::vector<int64_t> perm =
        keyed_permutation(cfg.key, SID_PERM, capacity);
    InvertResult inv =
        ddim_invert(carrier, *cfg.denoiser, *cfg.schedule, cfg.refine_iters);
    DecodeResult res;
    res.raw_bits.resize(static_cast<size_t>(n_raw));
    for (int i = 0; i < n_raw; ++i) {
        const size_t p = static_cast<size_t>(perm[static_cast<size_t>(i)]);
        res.raw_bits[static_cast<size_t>(i)] = inv.latent.v[p] > 0.0 ? 1 : 0;
    }
    res.payload.bits = ecc_decode(res.raw_bits, cfg.ecc);
    res.worst_residual = inv.worst_residual;
    res.latent = std::move(inv.latent);
    return res;
}

EncodeResult encode_stream(const Payload& payload, const CodecConfig& cfg) {
    check_config(cfg, "encode_stream");
    check_payload(payload, cfg, "encode_stream");
    const NoiseSchedule& sched = *cfg.schedule;
    const int n_raw = raw_len(cfg);
    if (n_raw > sched.T - 1)
        throw std::invalid_argument("encode_stream: payload exceeds capacity");

    const std::vector<uint8_t> raw = ecc_encode(payload.bits, cfg.ecc);
    StreamKey lk{cfg.key, SID_LATENT, 0};
    ImageTensor x = gaussian_field(lk, cfg.height, cfg.width, 3);
    EncodeResult res;
    res.latent = x;
    for (int t = sched.T; t >= 1; --t) {
        const int i = sched.T - t;
        if (i < n_raw) {
            const ImageTensor z = stream_field(
                cfg, raw[static_cast<size_t>(i)] != 0 ? SID_STREAM_B : SID_STREAM_A,
                i);
            x = det_step(x, t, cfg);
            const size_t n = x.size();
            for (size_t j = 0; j < n; ++j) x.v[j] += cfg.sigma0 * z.v[j];
        } else {
            x = ddim_step(x, t, sched, *cfg.denoiser);
        }
    }
    res.carrier = clamp_signed(std::move(x));
    return res;
}

DecodeResult decode_stream(const ImageTensor& carrier, const CodecConfig& cfg,
                           bool swap_streams) {
    check_config(cfg, "decode_stream");
    if (carrier.h != cfg.height || carrier.w != cfg.width || carrier.c != 3)
        throw std::invalid_argument(
            "decode_stream: carrier shape differs from config");
    const NoiseSchedule& sched = *cfg.schedule;
    const int n_raw = raw_len(cfg);
    if (n_raw > sched.T - 1)
        throw std::invalid_argument("decode_stream: payload exceeds capacity");

    // Reconstruct every level by inverting the deterministic component.
    std::vector<ImageTensor> ests;
    ests.reserve(static_cast<size_t>(sched.T) + 1);
    ests.push_back(carrier);
    for (int t = 1; t <= sched.T; ++t) {
        const ImageTensor& x_prev = ests.back();
        ImageTensor x = step_inverse(
            x_prev, cfg.denoiser->predict(x_prev, t, sched), t, sched);
        for (int k = 0; k < cfg.refine_iters; ++k) {
            ImageTensor xn = step_inverse(
                x_prev, cfg.denoiser->predict(x, t, sched), t, sched);
            double delta = 0.0;
            for (size_t j = 0; j < xn.size(); ++j)
                delta = std::max(delta, std::abs(xn.v[j] - x.v[j]));
            x = std::move(xn);
            if (delta <= 1e-13) break;
        }
        ests.push_back(std::move(x));
    }

    // Keyed reference walk down the chain, correlating residuals against the
    // two candidate fields.
    StreamKey lk{cfg.key, SID_LATENT, 0};
    ImageTensor xr = gaussian_field(lk, cfg.height, cfg.width, 3);
    const uint64_t sid_a = swap_streams ? SID_STREAM_B : SID_STREAM_A;
    const uint64_t sid_b = swap_streams ? SID_STREAM_A : SID_STREAM_B;
    DecodeResult res;
    res.raw_bits.reserve(static_cast<size_t>(n_raw));
    res.margins.reserve(static_cast<size_t>(n_raw));
    for (int t = sched.T; t > sched.T - n_raw; --t) {
        const int i = sched.T - t;
        const ImageTensor det = det_step(xr, t, cfg);
        const ImageTensor za = stream_field(cfg, sid_a, i);
        const ImageTensor zb = stream_field(cfg, sid_b, i);
        const ImageTensor& est = ests[static_cast<size_t>(t - 1)];
        double ca = 0.0, cb = 0.0;
        const size_t n = det.size();
        for (size_t j = 0; j < n; ++j) {
            const double r = est.v[j] - det.v[j];
            ca += r * za.v[j];
            cb += r * zb.v[j];
        }
        const int bit = cb > ca ? 1 : 0;
        res.raw_bits.push_back(static_cast<uint8_t>(bit));
        res.margins.push_back(std::abs(cb - ca));
        const ImageTensor& zpick = bit != 0 ? zb : za;
        xr = det;
        for (size_t j = 0; j < n; ++j) xr.v[j] += cfg.sigma0 * zpick.v[j];
    }
    res.payload.bits = ecc_decode(res.raw_bits, cfg.ecc);
    return res;
}

EncodeResult codec_encode(const Payload& payload, const CodecConfig& cfg) {
    return cfg.kind == CodecConfig::Kind::Sign ? encode_sign(payload, cfg)
                                               : encode_stream(payload, cfg);
}

DecodeResult codec_decode(const ImageTensor& carrier, const CodecConfig& cfg) {
    return cfg.kind == CodecConfig::Kind::Sign ? decode_sign(carrier, cfg)
                                               : decode_stream(carrier, cfg);
}

}  // namespace gw
