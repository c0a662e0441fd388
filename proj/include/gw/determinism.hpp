#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gw/image.hpp"

namespace gw {

// Stream ids partition the draw space of one key so that independent
// consumers (latent field, permutation, bit streams, noise, payload) never
// share counters.
inline constexpr uint64_t SID_LATENT = 1;
inline constexpr uint64_t SID_PERM = 2;
inline constexpr uint64_t SID_STREAM_A = 3;
inline constexpr uint64_t SID_STREAM_B = 4;
inline constexpr uint64_t SID_NOISE = 5;
inline constexpr uint64_t SID_PAYLOAD = 6;

// Counter-mode PRNG handle. Value semantics: draws return an advanced copy,
// so replaying a key always reproduces the same stream.
struct StreamKey {
    std::string key;
    uint64_t stream_id = 0;
    uint64_t counter = 0;
};

uint64_t mix_final(uint64_t z);
uint64_t fnv1a64(std::string_view data);
uint64_t stream_seed(std::string_view key, uint64_t stream_id);

struct U64Draw {
    uint64_t value;
    StreamKey next;
};

// One raw draw at the current counter. Throws std::overflow_error when the
// counter cannot advance without wrapping.
U64Draw next_u64(const StreamKey& s);

struct GaussianDraw {
    double value;
    StreamKey next;
};

// Box-Muller (cosine branch) standard normal; consumes exactly two raw draws.
GaussianDraw next_gaussian(const StreamKey& s);

// h*w*c standard normals in row-major (row, col, channel) order, consuming
// exactly 2*h*w*c raw draws starting at the key's counter.
ImageTensor gaussian_field(const StreamKey& s, int h, int w, int c = 3);

StreamKey advance(StreamKey s, uint64_t draws);

// Fisher-Yates shuffle of 0..n-1 driven by n-1 raw draws from counter 0.
std::vector<int64_t> keyed_permutation(std::string_view key, uint64_t stream_id,
                                       int64_t n);

// nbits fair bits (low bit of one raw draw each) from counter 0.
std::vector<uint8_t> payload_bits(std::string_view key, uint64_t stream_id,
                                  int nbits);

}  // namespace gw
