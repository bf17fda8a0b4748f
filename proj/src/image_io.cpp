#include "jgmatch/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "jgmatch/error.hpp"

namespace jgmatch {

namespace {

double luma(double r, double g, double b) {
  return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
}

// Next whitespace-delimited PNM header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

GrayImage load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open image " + path.string());
  const std::string magic = pnm_token(in);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (!(ascii || magic == "P5" || magic == "P6")) {
    throw Error(ErrorKind::Format, path.string() + ": unsupported PNM type '" + magic + "'");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(pnm_token(in));
    height = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorKind::Format, path.string() + ": malformed PNM header");
  }
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw Error(ErrorKind::Format, path.string() + ": invalid PNM header values");
  }
  const int samples_per_pixel = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height * samples_per_pixel;
  std::vector<double> raw(count);
  if (ascii) {
    for (auto& v : raw) {
      const std::string token = pnm_token(in);
      if (token.empty()) throw Error(ErrorKind::Truncation, path.string() + ": truncated PNM");
      v = std::stod(token);
    }
  } else {
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buffer(count * bytes_per_sample);
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() != static_cast<std::streamsize>(buffer.size())) {
      throw Error(ErrorKind::Truncation, path.string() + ": truncated PNM payload");
    }
    for (std::size_t i = 0; i < count; ++i) {
      raw[i] = bytes_per_sample == 1 ? buffer[i]
                                     : (buffer[2 * i] << 8) | buffer[2 * i + 1];
    }
  }
  std::vector<double> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (color) {
      pixels[i] = luma(raw[3 * i] / maxval, raw[3 * i + 1] / maxval, raw[3 * i + 2] / maxval);
    } else {
      pixels[i] = std::clamp(raw[i] / maxval, 0.0, 1.0);
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::Io, path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::Format, path.string() + ": " + message);
  }
  std::vector<double> pixels(buffer.size());
  std::transform(buffer.begin(), buffer.end(), pixels.begin(),
                 [](png_byte b) { return b / 255.0; });
  return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height),
                   std::move(pixels));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error(ErrorKind::Io, "cannot open image " + path.string());
  unsigned char signature[8] = {};
  probe.read(reinterpret_cast<char*>(signature), sizeof(signature));
  probe.close();
  if (png_sig_cmp(signature, 0, sizeof(signature)) == 0) return load_png(path);
  if (signature[0] == 'P') return load_pnm(path);
  throw Error(ErrorKind::Format,
              path.string() + ": unrecognized image format (expected PNG or PNM)");
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write image " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (double p : image.pixels()) {
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(p * 255.0))));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace jgmatch
