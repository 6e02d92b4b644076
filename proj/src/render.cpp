#include "biome/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biome/io.hpp"

namespace biome {
namespace {

Rgb shade(Rgb dark, Rgb bright, int level) {
  auto mix = [&](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(a + (b - a) * level / (kBrightnessLevels - 1));
  };
  return {mix(dark.r, bright.r), mix(dark.g, bright.g), mix(dark.b, bright.b)};
}

std::array<Rgb, kPaletteSize> make_palette() {
  std::array<Rgb, kPaletteSize> p{};
  p[static_cast<int>(CellType::Void)] = {16, 16, 20};
  p[static_cast<int>(CellType::Air)] = {150, 190, 230};
  p[static_cast<int>(CellType::Earth)] = {120, 80, 40};
  p[static_cast<int>(CellType::Immovable)] = {70, 70, 75};
  p[static_cast<int>(CellType::Sun)] = {255, 215, 0};
  p[static_cast<int>(CellType::OutOfBounds)] = {255, 0, 255};
  p[static_cast<int>(CellType::AgentUnspecialized)] = {220, 220, 220};
  p[static_cast<int>(CellType::AgentRoot)] = {160, 90, 190};
  p[static_cast<int>(CellType::AgentLeaf)] = {40, 170, 60};
  p[static_cast<int>(CellType::AgentFlower)] = {250, 100, 170};
  for (int l = 0; l < kBrightnessLevels; ++l) {
    p[kEarthRampStart + l] = shade({60, 38, 18}, {190, 135, 70}, l);
    p[kAirRampStart + l] = shade({95, 125, 165}, {210, 235, 255}, l);
  }
  return p;
}

}  // namespace

const std::array<Rgb, kPaletteSize>& palette() {
  static const auto p = make_palette();
  return p;
}

std::uint8_t palette_index(CellType type, double nutrient_fraction) {
  if (type != CellType::Earth && type != CellType::Air) return static_cast<std::uint8_t>(type);
  const double f = std::isfinite(nutrient_fraction) ? std::clamp(nutrient_fraction, 0.0, 1.0) : 0.0;
  const int level = std::min(kBrightnessLevels - 1, static_cast<int>(f * kBrightnessLevels));
  return static_cast<std::uint8_t>((type == CellType::Earth ? kEarthRampStart : kAirRampStart) + level);
}

IndexedFrame index_frame(const Environment& env, const EnvConfig& config) {
  IndexedFrame f{env.height(), env.width(), std::vector<std::uint8_t>(env.cell_count())};
  for (std::size_t i = 0; i < env.cell_count(); ++i) {
    const CellType t = env.type(i);
    const int channel = t == CellType::Air ? kAirNutrient : kEarthNutrient;
    f.pixels[i] = palette_index(t, env.value(i, channel) / config.max_nutrient_cell);
  }
  return f;
}

Image to_image(const IndexedFrame& frame, int scale) {
  if (scale < 1) throw std::invalid_argument("scale must be >= 1");
  Image img{frame.height * scale, frame.width * scale, {}};
  img.rgb.resize(static_cast<std::size_t>(img.height) * img.width * 3);
  const auto& pal = palette();
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      const Rgb col = pal[frame.pixels[static_cast<std::size_t>(r / scale) * frame.width + c / scale]];
      auto* px = &img.rgb[(static_cast<std::size_t>(r) * img.width + c) * 3];
      px[0] = col.r;
      px[1] = col.g;
      px[2] = col.b;
    }
  return img;
}

Image render_frame(const Environment& env, const EnvConfig& config, int scale) {
  return to_image(index_frame(env, config), scale);
}

Image filmstrip(std::span<const Image> frames, int columns) {
  if (frames.empty()) return {};
  columns = std::clamp(columns, 1, static_cast<int>(frames.size()));
  const int rows = (static_cast<int>(frames.size()) + columns - 1) / columns;
  const int fh = frames.front().height, fw = frames.front().width;
  Image out{rows * (fh + 1) - 1, columns * (fw + 1) - 1, {}};
  out.rgb.assign(static_cast<std::size_t>(out.height) * out.width * 3, 255);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Image& f = frames[i];
    if (f.height != fh || f.width != fw) throw std::invalid_argument("filmstrip frames differ in size");
    const int top = static_cast<int>(i) / columns * (fh + 1);
    const int left = static_cast<int>(i) % columns * (fw + 1);
    for (int r = 0; r < fh; ++r)
      std::copy_n(&f.rgb[static_cast<std::size_t>(r) * fw * 3], fw * 3,
                  &out.rgb[(static_cast<std::size_t>(top + r) * out.width + left) * 3]);
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width <= 0 || image.height <= 0) throw std::invalid_argument("cannot encode an empty image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
        buf->insert(buf->end(), data, data + n);
      },
      nullptr);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r)
    png_write_row(png, const_cast<png_bytep>(&image.rgb[static_cast<std::size_t>(r) * image.width * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) { write_bytes(path, encode_png(image)); }

}  // namespace biome
