#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace tipsense {

// Row-major 2D grid; (u, v) = (column, row), origin top-left.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw std::invalid_argument("image dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& at(int u, int v) noexcept { return data_[index(u, v)]; }
  const T& at(int u, int v) const noexcept { return data_[index(u, v)]; }

  std::span<T> row(int v) noexcept {
    return {data_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int v) const noexcept {
    return {data_.data() + static_cast<std::size_t>(v) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using TactileImage = Image<std::uint8_t>;
using DiffImage = Image<double>;

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

// Averages the three channels of an interleaved RGB buffer.
TactileImage grayscale_from_rgb(std::span<const std::uint8_t> rgb, int width, int height);

// Binary PGM (P5, maxval <= 255). Binary PPM (P6) input is accepted and
// converted to grayscale by channel average.
TactileImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const TactileImage& image);

}  // namespace tipsense
