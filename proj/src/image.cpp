#include "tipsense/image.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace tipsense {

TactileImage grayscale_from_rgb(std::span<const std::uint8_t> rgb, int width, int height) {
  TactileImage out(width, height);
  if (rgb.size() != out.size() * 3) {
    throw std::invalid_argument("rgb buffer size does not match image dimensions");
  }
  auto gray = out.pixels();
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const unsigned sum = rgb[3 * i] + rgb[3 * i + 1] + rgb[3 * i + 2];
    gray[i] = static_cast<std::uint8_t>((sum + 1) / 3);
  }
  return out;
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  int c = 0;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) {
        break;
      }
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int header_int(std::istream& in, const std::filesystem::path& path, const char* what) {
  const std::string token = header_token(in);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size()) {
      throw std::invalid_argument(token);
    }
    return value;
  } catch (const std::exception&) {
    throw IoError(path, std::string("bad PNM header field ") + what);
  }
}

}  // namespace

TactileImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open image");
  }
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P6") {
    throw IoError(path, "unsupported image format '" + magic + "' (expected P5 or P6)");
  }
  const int width = header_int(in, path, "width");
  const int height = header_int(in, path, "height");
  const int maxval = header_int(in, path, "maxval");
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError(path, "unsupported PNM dimensions or maxval");
  }
  const std::size_t channels = magic == "P6" ? 3 : 1;
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw IoError(path, "truncated pixel data");
  }
  if (channels == 3) {
    return grayscale_from_rgb(raw, width, height);
  }
  TactileImage out(width, height);
  std::copy(raw.begin(), raw.end(), out.pixels().begin());
  return out;
}

void write_pgm(const std::filesystem::path& path, const TactileImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(path, "cannot open for writing");
  }
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  const auto px = image.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) {
    throw IoError(path, "write failed");
  }
}

}  // namespace tipsense
