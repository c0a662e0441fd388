#include "gw/determinism.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gw {

namespace {

constexpr uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL;
constexpr uint64_t MIX2 = 0x94D049BB133111EBULL;
constexpr double TWO_PI = 6.283185307179586476925286766559;
constexpr double INV_2_53 = 0x1p-53;

inline uint64_t value_at(uint64_t seed, uint64_t counter) {
    return mix_final(seed + counter + GOLDEN);
}

inline double to_unit(uint64_t v) {
    return (static_cast<double>(v >> 11) + 1.0) * INV_2_53;
}

inline void check_budget(uint64_t counter, uint64_t draws, const char* where) {
    if (draws > std::numeric_limits<uint64_t>::max() - counter)
        throw std::overflow_error(std::string(where) + ": counter exhausted");
}

}  // namespace

uint64_t mix_final(uint64_t z) {
    z ^= z >> 30;
    z *= MIX1;
    z ^= z >> 27;
    z *= MIX2;
    z ^= z >> 31;
    return z;
}

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char b : data) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

uint64_t stream_seed(std::string_view key, uint64_t stream_id) {
    return mix_final(fnv1a64(key) ^ stream_id);
}

U64Draw next_u64(const StreamKey& s) {
    check_budget(s.counter, 1, "next_u64");
    U64Draw out;
    out.value = value_at(stream_seed(s.key, s.stream_id), s.counter);
    out.next = s;
    out.next.counter = s.counter + 1;
    return out;
}

GaussianDraw next_gaussian(const StreamKey& s) {
    check_budget(s.counter, 2, "next_gaussian");
    const uint64_t seed = stream_seed(s.key, s.stream_id);
    const double u1 = to_unit(value_at(seed, s.counter));
    const double u2 = to_unit(value_at(seed, s.counter + 1));
    GaussianDraw out;
    out.value = std::sqrt(-2.0 * std::log(u1)) * std::cos(TWO_PI * u2);
    out.next = s;
    out.next.counter = s.counter + 2;
    return out;
}

ImageTensor gaussian_field(const StreamKey& s, int h, int w, int c) {
    ImageTensor out(h, w, c);
    const uint64_t n = out.size();
    check_budget(s.counter, 2 * n, "gaussian_field");
    const uint64_t seed = stream_seed(s.key, s.stream_id);
    uint64_t ctr = s.counter;
    for (uint64_t i = 0; i < n; ++i) {
        const double u1 = to_unit(value_at(seed, ctr));
        const double u2 = to_unit(value_at(seed, ctr + 1));
        out.v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(TWO_PI * u2);
        ctr += 2;
    }
    return out;
}

StreamKey advance(StreamKey s, uint64_t draws) {
    check_budget(s.counter, draws, "advance");
    s.counter += draws;
    return s;
}

std::vector<int64_t> keyed_permutation(std::string_view key, uint64_t stream_id,
                                       int64_t n) {
    if (n <= 0)
        throw std::invalid_argument("keyed_permutation: n must be positive");
    std::vector<int64_t> perm(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    const uint64_t seed = stream_seed(key, stream_id);
    uint64_t ctr = 0;
    for (int64_t i = n - 1; i > 0; --i) {
        const uint64_t v = value_at(seed, ctr++);
        const int64_t j = static_cast<int64_t>(v % static_cast<uint64_t>(i + 1));
        std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
    }
    return perm;
}

std::vector<uint8_t> payload_bits(std::string_view key, uint64_t stream_id,
                                  int nbits) {
    if (nbits < 0)
        throw std::invalid_argument("payload_bits: nbits must be non-negative");
    std::vector<uint8_t> bits(static_cast<size_t>(nbits));
    const uint64_t seed = stream_seed(key, stream_id);
    for (int i = 0; i < nbits; ++i)
        bits[static_cast<size_t>(i)] =
            static_cast<uint8_t>(value_at(seed, static_cast<uint64_t>(i)) & 1ULL);
    return bits;
}

}  // namespace gw
