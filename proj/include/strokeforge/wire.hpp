#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "strokeforge/image.hpp"

namespace strokeforge::wire {

// Binary frame exchanged with the perceptual service:
//
//   u32 little-endian  header length N
//   N bytes            UTF-8 JSON header
//   payload            section bytes, concatenated
//
// The header carries {"width", "height", "channels", "sections": [...]} plus
// request/response fields. Each section entry is
// {"name", "dtype": "float32", "shape": [H, W, 3], "offset", "bytes"} with
// offset relative to the start of the payload. Tensors are row-major,
// little-endian float32, RGB.
inline constexpr const char* kContentType = "application/x-strokeforge-frame";

struct Section {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
};

struct Frame {
    nlohmann::json header = nlohmann::json::object();
    std::vector<Section> sections;

    const Section* find(std::string_view name) const;
};

std::string encode(const Frame& frame);
// Throws DomainError on truncated or inconsistent frames.
Frame decode(std::string_view bytes);

// Gray images travel as H x W x 3 with the value replicated per channel.
Section rgb_section(std::string name, const RgbImage& image);
Section gray_section(std::string name, const GrayImage& image);
RgbImage section_to_rgb(const Section& s);
// Sums channels: the adjoint of replicating a gray value into RGB.
GrayImage section_channel_sum(const Section& s);

}  // namespace strokeforge::wire
