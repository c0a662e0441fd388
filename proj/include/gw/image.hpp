#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gw {

// Dense row-major (row, col, channel) tensor of doubles. Pipeline images are
// 3-channel and live in [-1, 1]; metric code remaps to [0, 1] internally.
struct ImageTensor {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<double> v;

    ImageTensor() = default;
    ImageTensor(int height, int width, int channels = 3)
        : h(height), w(width), c(channels) {
        if (height <= 0 || width <= 0 || channels <= 0)
            throw std::invalid_argument("ImageTensor: dimensions must be positive");
        v.assign(static_cast<size_t>(height) * width * channels, 0.0);
    }

    double& at(int y, int x, int ch) {
        return v[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    double at(int y, int x, int ch) const {
        return v[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    size_t size() const { return v.size(); }
    bool same_shape(const ImageTensor& o) const {
        return h == o.h && w == o.w && c == o.c;
    }
};

inline void require_same_shape(const ImageTensor& a, const ImageTensor& b,
                               const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch");
}

// Entry points that feed the windowed metrics and the block transforms need
// room to work with; enforce the floor where images enter the pipeline.
inline void require_min_extent(const ImageTensor& x, const char* where) {
    if (x.h < 8 || x.w < 8)
        throw std::invalid_argument(std::string(where) +
                                    ": image must be at least 8x8");
}

}  // namespace gw
