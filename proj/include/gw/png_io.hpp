#pragma once

#include <string>

#include "gw/image.hpp"

namespace gw {

// RGB PNG writers; [-1, 1] maps linearly onto the full integer range with
// round-half-to-even. 16-bit is the default interchange format: a written
// file re-read and re-written reproduces itself byte for byte.
void write_png16(const std::string& path, const ImageTensor& img);
void write_png8(const std::string& path, const ImageTensor& img);

// Reads an 8- or 16-bit RGB PNG back to [-1, 1]. Other bit depths or color
// types are rejected.
ImageTensor read_png(const std::string& path);

}  // namespace gw
