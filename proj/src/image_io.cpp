#include "mpis/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <png.h>

namespace mpis {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool hasSuffix(const std::string& s, const char* suffix) {
  size_t n = std::strlen(suffix);
  if (s.size() < n) return false;
  std::string tail = s.substr(s.size() - n);
  std::transform(tail.begin(), tail.end(), tail.begin(), ::tolower);
  return tail == suffix;
}

ImageBuffer readPng(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::IoError, "failed to decode PNG " + path);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bitDepth = png_get_bit_depth(png, info);
  int colorType = png_get_color_type(png, info);

  if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (colorType == PNG_COLOR_TYPE_GRAY && bitDepth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bitDepth == 16) png_set_swap(png);  // stream is big-endian
  png_read_update_info(png, info);

  int channels = png_get_channels(png, info);
  bitDepth = png_get_bit_depth(png, info);
  size_t rowBytes = png_get_rowbytes(png, info);
  std::vector<uint8_t> raw(static_cast<size_t>(h) * rowBytes);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowBytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageBuffer out(static_cast<int>(h), static_cast<int>(w), channels);
  size_t count = static_cast<size_t>(h) * w * channels;
  if (bitDepth == 16) {
    const uint16_t* p = reinterpret_cast<const uint16_t*>(raw.data());
    for (size_t i = 0; i < count; ++i) out.data[i] = p[i] / 65535.0f;
  } else {
    for (size_t i = 0; i < count; ++i) out.data[i] = raw[i] / 255.0f;
  }
  return out;
}

void writePng(const std::string& path, const ImageBuffer& image,
              int bitDepth) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoError, "failed to encode PNG " + path);
  }
  png_init_io(png, f.get());
  int colorType = image.channels == 1   ? PNG_COLOR_TYPE_GRAY
                  : image.channels == 3 ? PNG_COLOR_TYPE_RGB
                                        : PNG_COLOR_TYPE_RGBA;
  png_set_IHDR(png, info, image.width, image.height, bitDepth, colorType,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bitDepth == 16) png_set_swap(png);

  size_t rowCount = static_cast<size_t>(image.width) * image.channels;
  if (bitDepth == 16) {
    std::vector<uint16_t> row(rowCount);
    for (int y = 0; y < image.height; ++y) {
      const float* src = image.row(y);
      for (size_t i = 0; i < rowCount; ++i)
        row[i] = static_cast<uint16_t>(
            std::lround(std::clamp(src[i], 0.0f, 1.0f) * 65535.0f));
      png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
  } else {
    std::vector<uint8_t> row(rowCount);
    for (int y = 0; y < image.height; ++y) {
      const float* src = image.row(y);
      for (size_t i = 0; i < rowCount; ++i)
        row[i] = static_cast<uint8_t>(
            std::lround(std::clamp(src[i], 0.0f, 1.0f) * 255.0f));
      png_write_row(png, row.data());
    }
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// PFM: "PF"/"Pf", dims, scale (sign = endianness), rows bottom-up.
ImageBuffer readPfm(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  char tag[3] = {};
  int w = 0, h = 0;
  float scale = 0.0f;
  if (std::fscanf(f.get(), "%2s %d %d %f", tag, &w, &h, &scale) != 4 ||
      (std::strcmp(tag, "PF") != 0 && std::strcmp(tag, "Pf") != 0) || w <= 0 ||
      h <= 0)
    throw Error(ErrorKind::IoError, "bad PFM header in " + path);
  std::fgetc(f.get());  // single whitespace after header
  int channels = std::strcmp(tag, "PF") == 0 ? 3 : 1;
  bool littleEndian = scale < 0.0f;

  ImageBuffer out(h, w, channels);
  size_t rowCount = static_cast<size_t>(w) * channels;
  std::vector<float> row(rowCount);
  for (int y = h - 1; y >= 0; --y) {
    if (std::fread(row.data(), sizeof(float), rowCount, f.get()) != rowCount)
      throw Error(ErrorKind::IoError, "truncated PFM " + path);
    if (!littleEndian) {
      for (float& v : row) {
        uint32_t u;
        std::memcpy(&u, &v, 4);
        u = __builtin_bswap32(u);
        std::memcpy(&v, &u, 4);
      }
    }
    std::copy(row.begin(), row.end(), out.row(y));
  }
  return out;
}

void writePfm(const std::string& path, const ImageBuffer& image) {
  if (image.channels != 1 && image.channels != 3)
    throw Error(ErrorKind::IoError, "PFM supports 1 or 3 channels");
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
  std::fprintf(f.get(), "%s\n%d %d\n-1.0\n",
               image.channels == 3 ? "PF" : "Pf", image.width, image.height);
  size_t rowCount = static_cast<size_t>(image.width) * image.channels;
  for (int y = image.height - 1; y >= 0; --y)
    std::fwrite(image.row(y), sizeof(float), rowCount, f.get());
}

ImageBuffer readPpm(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  char tag[3] = {};
  int w = 0, h = 0, maxval = 0;
  if (std::fscanf(f.get(), "%2s %d %d %d", tag, &w, &h, &maxval) != 4 ||
      std::strcmp(tag, "P6") != 0 || w <= 0 || h <= 0 || maxval <= 0 ||
      maxval > 65535)
    throw Error(ErrorKind::IoError, "bad PPM header in " + path);
  std::fgetc(f.get());
  ImageBuffer out(h, w, 3);
  size_t count = static_cast<size_t>(h) * w * 3;
  if (maxval < 256) {
    std::vector<uint8_t> raw(count);
    if (std::fread(raw.data(), 1, count, f.get()) != count)
      throw Error(ErrorKind::IoError, "truncated PPM " + path);
    for (size_t i = 0; i < count; ++i)
      out.data[i] = raw[i] / static_cast<float>(maxval);
  } else {
    std::vector<uint8_t> raw(count * 2);  // big-endian 16-bit
    if (std::fread(raw.data(), 1, count * 2, f.get()) != count * 2)
      throw Error(ErrorKind::IoError, "truncated PPM " + path);
    for (size_t i = 0; i < count; ++i) {
      uint16_t v = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
      out.data[i] = v / static_cast<float>(maxval);
    }
  }
  return out;
}

void writePpm(const std::string& path, const ImageBuffer& image,
              int bitDepth) {
  if (image.channels != 3)
    throw Error(ErrorKind::IoError, "PPM requires 3 channels");
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path);
  int maxval = bitDepth == 16 ? 65535 : 255;
  std::fprintf(f.get(), "P6\n%d %d\n%d\n", image.width, image.height, maxval);
  size_t count = image.data.size();
  if (bitDepth == 16) {
    std::vector<uint8_t> raw(count * 2);
    for (size_t i = 0; i < count; ++i) {
      uint16_t v = static_cast<uint16_t>(
          std::lround(std::clamp(image.data[i], 0.0f, 1.0f) * 65535.0f));
      raw[2 * i] = static_cast<uint8_t>(v >> 8);
      raw[2 * i + 1] = static_cast<uint8_t>(v & 0xff);
    }
    std::fwrite(raw.data(), 1, raw.size(), f.get());
  } else {
    std::vector<uint8_t> raw(count);
    for (size_t i = 0; i < count; ++i)
      raw[i] = static_cast<uint8_t>(
          std::lround(std::clamp(image.data[i], 0.0f, 1.0f) * 255.0f));
    std::fwrite(raw.data(), 1, raw.size(), f.get());
  }
}

}  // namespace

ImageBuffer readImage(const std::string& path) {
  if (hasSuffix(path, ".png")) return readPng(path);
  if (hasSuffix(path, ".pfm")) return readPfm(path);
  if (hasSuffix(path, ".ppm")) return readPpm(path);
  throw Error(ErrorKind::IoError, "unsupported image format: " + path);
}

DepthMap readDepth(const std::string& path, bool normalize) {
  ImageBuffer img = readImage(path);
  DepthMap depth(img.height, img.width);
  if (img.channels == 1) {
    depth.data = std::move(img.data);
  } else {
    // collapse to luminance-free average
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        float acc = 0.0f;
        for (int c = 0; c < img.channels; ++c) acc += img.at(y, x, c);
        depth.at(y, x) = acc / img.channels;
      }
  }
  if (normalize && hasSuffix(path, ".pfm")) {
    float lo = depth.data[0], hi = depth.data[0];
    for (float v : depth.data) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    float range = hi - lo;
    if (range > 1e-12f)
      for (float& v : depth.data) v = (v - lo) / range;
    else
      for (float& v : depth.data) v = 0.0f;
  } else {
    for (float& v : depth.data) v = std::clamp(v, 0.0f, 1.0f);
  }
  return depth;
}

void writeImage(const std::string& path, const ImageBuffer& image,
                int bitDepth) {
  if (hasSuffix(path, ".png")) return writePng(path, image, bitDepth);
  if (hasSuffix(path, ".pfm")) return writePfm(path, image);
  if (hasSuffix(path, ".ppm")) return writePpm(path, image, bitDepth);
  throw Error(ErrorKind::IoError, "unsupported image format: " + path);
}

void writeDepth(const std::string& path, const DepthMap& depth, int bitDepth) {
  ImageBuffer img(depth.height, depth.width, 1);
  img.data = depth.data;
  writeImage(path, img, bitDepth);
}

}  // namespace mpis
