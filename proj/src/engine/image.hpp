#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace photoart {

/// 8-bit sRGB interchange image, interleaved RGB rows.
class Image {
 public:
  Image() = default;
  Image(int width, int height);
  Image(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return pixel_count() == 0; }

  std::span<std::uint8_t> data() { return rgb_; }
  std::span<const std::uint8_t> data() const { return rgb_; }

  std::uint8_t* pixel(int x, int y) { return &rgb_[3 * (static_cast<std::size_t>(y) * width_ + x)]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb_[3 * (static_cast<std::size_t>(y) * width_ + x)];
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> rgb_;
};

enum class Transfer { kLinear, kGamma };

/// Float working buffer; kLinear holds scene-linear values, kGamma holds
/// sRGB-transfer-encoded values. Neither is clamped above during processing.
struct FloatImage {
  int width = 0;
  int height = 0;
  Transfer transfer = Transfer::kLinear;
  std::vector<float> rgb;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

enum class ImageFormat { kPng, kJpeg };

Image decode_image(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality = 95);

// Format chosen from the extension (.png, .jpg, .jpeg).
void save_image(const Image& image, const std::filesystem::path& path);

}  // namespace photoart

namespace photoart {

/// sha256 over the dimensions and raw RGB bytes, so it does not depend on how
/// the image was compressed.
std::string image_digest(const Image& image);

}  // namespace photoart
