#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gw/determinism.hpp"

using namespace gw;

namespace {

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}

TEST_CASE("mix_final reference values") {
    // First three outputs of the underlying mixer walked by its increment.
    const uint64_t golden = 0x9E3779B97F4A7C15ULL;
    CHECK(mix_final(golden) == 0xE220A8397B1DCDAFULL);
    CHECK(mix_final(2 * golden) == 0x6E789E6AA1B965F4ULL);
    CHECK(mix_final(3 * golden) == 0x06C45D188009454FULL);
}

TEST_CASE("stream_seed composes hash and mixer") {
    CHECK(stream_seed("test-key", SID_LATENT) ==
          mix_final(fnv1a64("test-key") ^ SID_LATENT));
    CHECK(stream_seed("test-key", SID_LATENT) !=
          stream_seed("test-key", SID_PERM));
    CHECK(stream_seed("test-key", SID_LATENT) !=
          stream_seed("test-key2", SID_LATENT));
}

TEST_CASE("raw u64 stream reference values") {
    const uint64_t expected[4] = {0x6C8D050734F3B4B8ULL, 0xDA485B9F73B9D6D5ULL,
                                  0x59FD7CA931DD43A6ULL, 0x6BD216BF0D29FE9EULL};
    StreamKey s{"test-key", SID_LATENT, 0};
    for (int i = 0; i < 4; ++i) {
        U64Draw d = next_u64(s);
        CHECK(d.value == expected[i]);
        CHECK(d.next.counter == s.counter + 1);
        s = d.next;
    }
}

TEST_CASE("counter addressing is random access") {
    StreamKey s3{"test-key", SID_LATENT, 3};
    CHECK(next_u64(s3).value == 0x6BD216BF0D29FE9EULL);
    StreamKey s0{"test-key", SID_LATENT, 0};
    StreamKey walked = advance(s0, 3);
    CHECK(walked.counter == 3);
    CHECK(next_u64(walked).value == 0x6BD216BF0D29FE9EULL);
}

TEST_CASE("gaussian stream reference values") {
    const double expected[4] = {0.7876046848459043, -1.272256918344743,
                                1.093148043652862, 1.0907822005242118};
    StreamKey s{"test-key", SID_LATENT, 0};
    for (int i = 0; i < 4; ++i) {
        GaussianDraw g = next_gaussian(s);
        CHECK(rel_err(g.value, expected[i]) <= 1e-15);
        CHECK(g.next.counter == s.counter + 2);
        s = g.next;
    }
}

TEST_CASE("gaussian_field equals sequential draws, row major") {
    StreamKey s{"field-key", SID_NOISE, 40};
    ImageTensor f = gaussian_field(s, 3, 4, 3);
    StreamKey walk = s;
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 4; ++x) {
            for (int c = 0; c < 3; ++c) {
                GaussianDraw g = next_gaussian(walk);
                CHECK(f.at(y, x, c) == g.value);
                walk = g.next;
            }
        }
    }
    CHECK(walk.counter == s.counter + 2ULL * 3 * 4 * 3);
}

TEST_CASE("streams with different keys or ids do not collide") {
    StreamKey a{"key-one", SID_NOISE, 0};
    StreamKey b{"key-two", SID_NOISE, 0};
    StreamKey c{"key-one", SID_PAYLOAD, 0};
    int diff_key = 0, diff_sid = 0;
    for (int i = 0; i < 16; ++i) {
        U64Draw da = next_u64(a), db = next_u64(b), dc = next_u64(c);
        if (da.value != db.value) ++diff_key;
        if (da.value != dc.value) ++diff_sid;
        a = da.next;
        b = db.next;
        c = dc.next;
    }
    CHECK(diff_key == 16);
    CHECK(diff_sid == 16);
}

TEST_CASE("replaying a key reproduces the stream bit-exactly") {
    StreamKey s{"replay", SID_STREAM_A, 123};
    ImageTensor f1 = gaussian_field(s, 4, 4, 3);
    ImageTensor f2 = gaussian_field(s, 4, 4, 3);
    for (size_t i = 0; i < f1.size(); ++i) CHECK(f1.v[i] == f2.v[i]);
}

TEST_CASE("counter exhaustion is an error, not a wrap") {
    const uint64_t maxc = std::numeric_limits<uint64_t>::max();
    StreamKey s{"exhaust", SID_NOISE, maxc};
    CHECK_THROWS_AS(next_u64(s), std::overflow_error);
    StreamKey s2{"exhaust", SID_NOISE, maxc - 1};
    CHECK_THROWS_AS(next_gaussian(s2), std::overflow_error);
    CHECK_THROWS_AS(advance(s2, 2), std::overflow_error);
    CHECK(advance(s2, 1).counter == maxc);
    StreamKey s3{"exhaust", SID_NOISE, maxc - 2};
    CHECK(next_gaussian(s3).next.counter == maxc);
}

TEST_CASE("keyed permutation reference value and permutation property") {
    std::vector<int64_t> p = keyed_permutation("test-key", SID_PERM, 8);
    const std::vector<int64_t> expected = {4, 7, 0, 2, 3, 1, 6, 5};
    CHECK(p == expected);

    std::vector<int64_t> big = keyed_permutation("test-key", SID_PERM, 1000);
    std::vector<int64_t> sorted = big;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int64_t> iota(1000);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(sorted == iota);
    CHECK(big != iota);

    CHECK(keyed_permutation("test-key", SID_PERM, 1) ==
          std::vector<int64_t>{0});
    CHECK_THROWS_AS(keyed_permutation("test-key", SID_PERM, 0),
                    std::invalid_argument);
}

TEST_CASE("payload bits are the low bits of the raw stream") {
    std::vector<uint8_t> bits = payload_bits("test-key", SID_PAYLOAD, 8);
    const std::vector<uint8_t> expected = {1, 1, 1, 1, 0, 0, 1, 0};
    CHECK(bits == expected);

    StreamKey s{"test-key", SID_PAYLOAD, 0};
    for (uint8_t b : bits) {
        U64Draw d = next_u64(s);
        CHECK(b == (d.value & 1ULL));
        s = d.next;
    }
    CHECK(payload_bits("test-key", SID_PAYLOAD, 0).empty());
    CHECK_THROWS_AS(payload_bits("test-key", SID_PAYLOAD, -1),
                    std::invalid_argument);
}

TEST_CASE("gaussian moments are roughly standard") {
    StreamKey s{"moments", SID_NOISE, 0};
    ImageTensor f = gaussian_field(s, 32, 32, 3);
    double sum = 0.0, sq = 0.0;
    for (double v : f.v) {
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(f.size());
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
}
