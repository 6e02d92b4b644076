#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "biome/config.hpp"
#include "biome/environment.hpp"

namespace biome {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Earth and Air are drawn with this many brightness levels.
inline constexpr int kBrightnessLevels = 8;

// Palette layout: one entry per non-graded cell type, then the Earth ramp,
// then the Air ramp (dark to bright).
inline constexpr int kEarthRampStart = 10;
inline constexpr int kAirRampStart = kEarthRampStart + kBrightnessLevels;
inline constexpr int kPaletteSize = kAirRampStart + kBrightnessLevels;

const std::array<Rgb, kPaletteSize>& palette();

std::uint8_t palette_index(CellType type, double nutrient_fraction);

struct IndexedFrame {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major palette indices

  friend bool operator==(const IndexedFrame&, const IndexedFrame&) = default;
};

IndexedFrame index_frame(const Environment& env, const EnvConfig& config);

struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

Image to_image(const IndexedFrame& frame, int scale = 1);
Image render_frame(const Environment& env, const EnvConfig& config, int scale = 1);

// Frames laid out left to right, wrapping after `columns`, with a 1-pixel gap.
Image filmstrip(std::span<const Image> frames, int columns);

std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace biome
