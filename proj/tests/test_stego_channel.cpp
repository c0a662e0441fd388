#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gw/determinism.hpp"
#include "gw/diffusion_core.hpp"
#include "gw/quality_metrics.hpp"
#include "gw/stego_channel.hpp"

using namespace gw;

namespace {

// Calibration anchor for the sign codec: a near-identity chain (mild blur,
// tiny beta) keeps clamping from ever flipping forced latent signs.
struct SignFixture {
    NoiseSchedule sched = make_schedule(10, 1e-5, 1e-4);
    BlurDenoiser den{0.25};
    CodecConfig cfg;

    SignFixture() {
        cfg.kind = CodecConfig::Kind::Sign;
        cfg.key = "unit-key";
        cfg.schedule = &sched;
        cfg.denoiser = &den;
        cfg.height = 64;
        cfg.width = 64;
        cfg.payload_len = 64;
        cfg.refine_iters = 8;
    }
};

struct StreamFixture {
    NoiseSchedule sched = make_schedule(32, 1e-5, 1e-3);
    BlurDenoiser den{0.6};
    CodecConfig cfg;

    StreamFixture() {
        cfg.kind = CodecConfig::Kind::Stream;
        cfg.key = "unit-stream-key";
        cfg.schedule = &sched;
        cfg.denoiser = &den;
        cfg.height = 32;
        cfg.width = 32;
        cfg.payload_len = 8;
        cfg.refine_iters = 200;
        cfg.sigma0 = 0.005;
    }
};

}  // namespace

TEST_CASE("ecc factor validation") {
    EccConfig none{EccConfig::Scheme::None, 3};
    CHECK(ecc_factor(none) == 1);
    EccConfig rep{EccConfig::Scheme::Repetition, 5};
    CHECK(ecc_factor(rep) == 5);
    EccConfig even{EccConfig::Scheme::Repetition, 4};
    CHECK_THROWS_AS(ecc_factor(even), std::invalid_argument);
    EccConfig nonpos{EccConfig::Scheme::Repetition, -3};
    CHECK_THROWS_AS(ecc_factor(nonpos), std::invalid_argument);
}

TEST_CASE("repetition ecc encodes, majority-decodes, and round trips") {
    EccConfig rep3{EccConfig::Scheme::Repetition, 3};
    CHECK(ecc_encode({1, 0}, rep3) == std::vector<uint8_t>{1, 1, 1, 0, 0, 0});
    CHECK(ecc_decode({1, 1, 0}, rep3) == std::vector<uint8_t>{1});
    CHECK(ecc_decode({1, 0, 0}, rep3) == std::vector<uint8_t>{0});
    CHECK_THROWS_AS(ecc_decode({1, 1, 0, 1}, rep3), std::invalid_argument);

    EccConfig none{EccConfig::Scheme::None, 3};
    CHECK(ecc_encode({1, 0, 1}, none) == std::vector<uint8_t>{1, 0, 1});
    CHECK(ecc_decode({1, 0, 1}, none) == std::vector<uint8_t>{1, 0, 1});

    for (int k : {1, 3, 5, 7, 9}) {
        EccConfig ecc{EccConfig::Scheme::Repetition, k};
        std::vector<uint8_t> bits = payload_bits("ecc-roundtrip", SID_PAYLOAD, 16);
        CHECK(ecc_decode(ecc_encode(bits, ecc), ecc) == bits);
    }
}

TEST_CASE("sign codec round trips at the calibration anchor") {
    SignFixture fx;
    Payload p{payload_bits("unit-key", SID_PAYLOAD, 64)};
    EncodeResult enc = encode_sign(p, fx.cfg);

    CHECK(enc.carrier.h == 64);
    CHECK(enc.carrier.w == 64);
    for (double v : enc.carrier.v) {
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }

    // The keyed latent carries each expanded bit as the sign at its permuted
    // position.
    std::vector<uint8_t> raw = ecc_encode(p.bits, fx.cfg.ecc);
    std::vector<int64_t> perm =
        keyed_permutation(fx.cfg.key, SID_PERM, 64 * 64 * 3);
    for (size_t i = 0; i < raw.size(); ++i) {
        const double v = enc.latent.v[static_cast<size_t>(perm[i])];
        CHECK((raw[i] == 1 ? v > 0.0 : v < 0.0));
    }

    DecodeResult dec = decode_sign(enc.carrier, fx.cfg);
    CHECK(dec.payload.bits.size() == 64);
    CHECK(ber(p.bits, dec.payload.bits) == 0.0);
    CHECK(ber(raw, dec.raw_bits) == 0.0);
    CHECK(dec.worst_residual <= 1e-9);

    // Clamping the carrier rescales what inversion can recover at saturated
    // positions, but it never flips a sign; the forced positions must agree.
    for (size_t i = 0; i < raw.size(); ++i) {
        const size_t pos = static_cast<size_t>(perm[i]);
        CHECK(std::signbit(dec.latent.v[pos]) == std::signbit(enc.latent.v[pos]));
    }
}

TEST_CASE("sign codec is deterministic and clamp-stable") {
    SignFixture fx;
    Payload p{payload_bits("unit-key", SID_PAYLOAD, 64)};
    EncodeResult e1 = encode_sign(p, fx.cfg);
    EncodeResult e2 = encode_sign(p, fx.cfg);
    CHECK(e1.carrier.v == e2.carrier.v);

    DecodeResult d1 = decode_sign(e1.carrier, fx.cfg);
    DecodeResult d2 = decode_sign(clamp_signed(e1.carrier), fx.cfg);
    CHECK(d1.payload.bits == d2.payload.bits);
    CHECK(d1.raw_bits == d2.raw_bits);
}

TEST_CASE("sign codec decodes at chance level with the wrong key") {
    SignFixture fx;
    Payload p{payload_bits("unit-key", SID_PAYLOAD, 64)};
    EncodeResult enc = encode_sign(p, fx.cfg);
    std::vector<uint8_t> sent_raw = ecc_encode(p.bits, fx.cfg.ecc);

    double payload_sum = 0.0, raw_sum = 0.0;
    for (int k = 0; k < 5; ++k) {
        CodecConfig wrong = fx.cfg;
        wrong.key = "unit-key-wrong-" + std::to_string(k);
        DecodeResult dw = decode_sign(enc.carrier, wrong);
        payload_sum += ber(p.bits, dw.payload.bits);
        raw_sum += ber(sent_raw, dw.raw_bits);
    }
    CHECK(payload_sum / 5.0 >= 0.35);
    CHECK(payload_sum / 5.0 <= 0.65);
    CHECK(raw_sum / 5.0 >= 0.4);
    CHECK(raw_sum / 5.0 <= 0.6);
}

TEST_CASE("sign codec decodes a non-carrier at chance level") {
    SignFixture fx;
    Payload p{payload_bits("unit-key", SID_PAYLOAD, 64)};
    StreamKey s{"noncarrier-0", 7, 0};
    ImageTensor noise = clamp_signed(gaussian_field(s, 64, 64));
    DecodeResult dec = decode_sign(noise, fx.cfg);
    const double b = ber(p.bits, dec.payload.bits);
    CHECK(b >= 0.3);
    CHECK(b <= 0.7);
}

TEST_CASE("sign codec guards capacity and payload length") {
    SignFixture fx;
    fx.cfg.height = 8;
    fx.cfg.width = 8;  // capacity 192 raw bits
    fx.cfg.payload_len = 64;
    Payload fits{payload_bits("cap", SID_PAYLOAD, 64)};  // 192 expanded
    CHECK_NOTHROW(encode_sign(fits, fx.cfg));

    fx.cfg.payload_len = 65;
    Payload over{payload_bits("cap", SID_PAYLOAD, 65)};  // 195 expanded
    CHECK_THROWS_AS(encode_sign(over, fx.cfg), std::invalid_argument);

    fx.cfg.payload_len = 0;
    CHECK_THROWS_AS(encode_sign(Payload{}, fx.cfg), std::invalid_argument);

    fx.cfg.payload_len = 64;
    CHECK_THROWS_AS(decode_sign(ImageTensor(8, 9, 3), fx.cfg),
                    std::invalid_argument);
}

TEST_CASE("stream codec round trips with positive margins") {
    StreamFixture fx;
    Payload p{payload_bits("unit-stream-key", SID_PAYLOAD, 8)};
    EncodeResult enc = encode_stream(p, fx.cfg);
    for (double v : enc.carrier.v) {
        CHECK(v <= 1.0);
        CHECK(v >= -1.0);
    }

    DecodeResult dec = decode_stream(enc.carrier, fx.cfg);
    CHECK(ber(p.bits, dec.payload.bits) == 0.0);
    CHECK(dec.raw_bits.size() == 24);
    REQUIRE(dec.margins.size() == 24);
    for (double m : dec.margins) CHECK(m > 0.0);

    EncodeResult enc2 = encode_stream(p, fx.cfg);
    CHECK(enc.carrier.v == enc2.carrier.v);
}

TEST_CASE("stream codec with swapped candidates inverts every raw bit") {
    StreamFixture fx;
    Payload p{payload_bits("unit-stream-key", SID_PAYLOAD, 8)};
    EncodeResult enc = encode_stream(p, fx.cfg);
    DecodeResult sw = decode_stream(enc.carrier, fx.cfg, true);
    CHECK(ber(ecc_encode(p.bits, fx.cfg.ecc), sw.raw_bits) == 1.0);
}

TEST_CASE("stream codec single-bit round trip without ecc") {
    StreamFixture fx;
    fx.cfg.payload_len = 1;
    fx.cfg.ecc.scheme = EccConfig::Scheme::None;
    for (uint8_t bit : {0, 1}) {
        Payload p{{bit}};
        EncodeResult enc = encode_stream(p, fx.cfg);
        DecodeResult dec = decode_stream(enc.carrier, fx.cfg);
        REQUIRE(dec.payload.bits.size() == 1);
        CHECK(dec.payload.bits[0] == bit);
    }
}

TEST_CASE("stream codec decodes at chance level with the wrong key") {
    StreamFixture fx;
    Payload p{payload_bits("unit-stream-key", SID_PAYLOAD, 8)};
    EncodeResult enc = encode_stream(p, fx.cfg);
    std::vector<uint8_t> sent_raw = ecc_encode(p.bits, fx.cfg.ecc);
    double raw_sum = 0.0;
    for (int k = 0; k < 10; ++k) {
        CodecConfig wrong = fx.cfg;
        wrong.key = "unit-stream-wrong-" + std::to_string(k);
        DecodeResult dw = decode_stream(enc.carrier, wrong);
        raw_sum += ber(sent_raw, dw.raw_bits);
    }
    CHECK(raw_sum / 10.0 >= 0.4);
    CHECK(raw_sum / 10.0 <= 0.6);
}

TEST_CASE("stream codec guards capacity") {
    StreamFixture fx;  // T = 32 allows 31 raw bits
    fx.cfg.payload_len = 10;
    Payload fits{payload_bits("scap", SID_PAYLOAD, 10)};  // 30 expanded
    CHECK_NOTHROW(encode_stream(fits, fx.cfg));

    fx.cfg.payload_len = 11;
    Payload over{payload_bits("scap", SID_PAYLOAD, 11)};  // 33 expanded
    CHECK_THROWS_AS(encode_stream(over, fx.cfg), std::invalid_argument);

    CHECK_THROWS_AS(encode_stream(Payload{}, fx.cfg), std::invalid_argument);
    CHECK_THROWS_AS(decode_stream(ImageTensor(32, 31, 3), fx.cfg),
                    std::invalid_argument);
}

TEST_CASE("codec dispatch follows the configured kind") {
    SignFixture sf;
    Payload p{payload_bits("unit-key", SID_PAYLOAD, 64)};
    CHECK(codec_encode(p, sf.cfg).carrier.v == encode_sign(p, sf.cfg).carrier.v);
    EncodeResult enc = encode_sign(p, sf.cfg);
    CHECK(codec_decode(enc.carrier, sf.cfg).payload.bits ==
          decode_sign(enc.carrier, sf.cfg).payload.bits);

    StreamFixture tf;
    Payload q{payload_bits("unit-stream-key", SID_PAYLOAD, 8)};
    CHECK(codec_encode(q, tf.cfg).carrier.v ==
          encode_stream(q, tf.cfg).carrier.v);
    EncodeResult enc2 = encode_stream(q, tf.cfg);
    CHECK(codec_decode(enc2.carrier, tf.cfg).payload.bits ==
          decode_stream(enc2.carrier, tf.cfg).payload.bits);
}
