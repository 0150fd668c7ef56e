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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fog/core/types.hpp"

namespace fog::core {

/// Arbitrary-size interleaved RGB buffer (plots, decoded files).
struct RgbBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

std::vector<std::uint8_t> encode_png(const RgbBuffer& img);
std::vector<std::uint8_t> encode_png(const Image& img);
RgbBuffer decode_png(std::span<const std::uint8_t> data);

void write_png(const std::filesystem::path& path, const RgbBuffer& img);
void write_png(const std::filesystem::path& path, const Image& img);
RgbBuffer read_png(const std::filesystem::path& path);
/// Reads a PNG that must decode to exactly 64x64 RGB.
Image read_frame_png(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> data);

}  // namespace fog::core
