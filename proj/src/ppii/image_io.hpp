#pragma once

#include <cstdint>
#include <filesystem>

#include "ppii/raster.hpp"

namespace ppii {

struct LoadedImage {
  Raster raster;     // intensities divided by the format maximum (255 or 65535)
  int bit_depth = 8;
};

// Single-channel PNG (1/2/4/8/16-bit gray) or binary PGM (P5, 8 or 16-bit).
// Colour or alpha images are rejected with InvalidInput.
LoadedImage load_image(const std::filesystem::path& path);

// Values are clamped to [0,1], scaled to the bit depth maximum and rounded
// half-to-even. bit_depth is 8 or 16. The .pgm extension selects P5, anything
// else writes PNG.
void save_image(const Raster& img, const std::filesystem::path& path, int bit_depth = 16);

std::uint16_t quantize(double v, int bit_depth);

}  // namespace ppii
