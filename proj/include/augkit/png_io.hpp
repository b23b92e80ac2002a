#pragma once

#include <string>

#include "augkit/types.hpp"

namespace augkit {

// Decodes a PNG into a 1- or 3-channel image with intensities in [0,1]
// (byte value / 255).  Palette, low-bit-depth, 16-bit and alpha inputs
// are folded down to 8-bit gray or RGB.  Failures throw IoError.
Image load_png(const std::string& path);

// Encodes 8-bit gray or RGB; intensities re-quantize as
// floor(v * 255 + 0.5).  Deterministic: identical images produce
// identical files.
void save_png(const std::string& path, const Image& img);

}  // namespace augkit
