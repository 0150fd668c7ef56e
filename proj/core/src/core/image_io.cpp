/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "fog/core/image_io.hpp"

#include <png.h>

#include <fstream>
#include <iterator>

#include "fog/core/errors.hpp"

namespace fog::core {

std::vector<std::uint8_t> encode_png(const RgbBuffer& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw InvalidArgument("encode_png: pixel buffer does not match dimensions");
  }
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width);
  desc.height = static_cast<png_uint_32>(img.height);
  desc.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
    throw IoError(std::string("png size query failed: ") + desc.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + desc.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  return encode_png(RgbBuffer{Image::kWidth, Image::kHeight, img.bytes()});
}

RgbBuffer decode_png(std::span<const std::uint8_t> data) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, data.data(), data.size())) {
    throw IoError(std::string("png decode failed: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  RgbBuffer out;
  out.width = static_cast<int>(desc.width);
  out.height = static_cast<int>(desc.height);
  out.pixels.resize(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&desc);
    throw IoError(std::string("png decode failed: ") + desc.message);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RgbBuffer& img) {
  const auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

void write_png(const std::filesystem::path& path, const Image& img) {
  write_png(path, RgbBuffer{Image::kWidth, Image::kHeight, img.bytes()});
}

RgbBuffer read_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

Image read_frame_png(const std::filesystem::path& path) {
  RgbBuffer buf = read_png(path);
  if (buf.width != Image::kWidth || buf.height != Image::kHeight) {
    throw InvalidArgument("frame " + path.string() + " is not 64x64");
  }
  return Image(std::move(buf.pixels));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < data.size(); i += 3) {
    const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i < data.size()) {
    std::uint32_t v = data[i] << 16;
    if (i + 1 < data.size()) v |= data[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += (i + 1 < data.size()) ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

}  // namespace fog::core
