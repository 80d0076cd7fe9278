#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strokeforge/geometry.hpp"
#include "strokeforge/image.hpp"

namespace strokeforge::io {

// PNG/JPEG decoding. Throws DomainError when the data cannot be decoded.
RgbImage read_rgb(const std::filesystem::path& path);
RgbImage decode_rgb(const std::vector<std::uint8_t>& bytes);

// Any non-zero pixel (of any channel) counts as set.
RegionMask read_mask(const std::filesystem::path& path, int region_id, std::string label = {});
RegionMask decode_mask(const std::vector<std::uint8_t>& bytes, int region_id, std::string label = {});

std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const RgbImage& image);
std::vector<std::uint8_t> encode_png(const RegionMask& mask);
void write_png(const std::filesystem::path& path, const GrayImage& image);
void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const RegionMask& mask);

// Area-averaging downscale / bilinear upscale.
GrayImage resize(const GrayImage& src, int width, int height);
RgbImage resize(const RgbImage& src, int width, int height);
// Nearest-neighbour; keeps masks binary.
RegionMask resize(const RegionMask& src, int width, int height);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace strokeforge::io
