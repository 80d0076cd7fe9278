#include "strokeforge/wire.hpp"

#include <bit>
#include <cstring>

#include "strokeforge/error.hpp"

namespace strokeforge::wire {
namespace {

static_assert(std::endian::native == std::endian::little, "wire encoding assumes a little-endian host");

std::size_t element_count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw DomainError("negative tensor dimension");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

}  // namespace

const Section* Frame::find(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::string encode(const Frame& frame) {
    nlohmann::json header = frame.header;
    header["sections"] = nlohmann::json::array();
    std::size_t offset = 0;
    for (const auto& s : frame.sections) {
        if (element_count(s.shape) != s.data.size()) throw DomainError("section '" + s.name + "' shape mismatch");
        const std::size_t bytes = s.data.size() * sizeof(float);
        header["sections"].push_back(
            {{"name", s.name}, {"dtype", "float32"}, {"shape", s.shape}, {"offset", offset}, {"bytes", bytes}});
        offset += bytes;
    }
    const std::string h = header.dump();
    const auto n = static_cast<std::uint32_t>(h.size());
    std::string out;
    out.reserve(4 + h.size() + offset);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xFF));
    out += h;
    for (const auto& s : frame.sections) {
        out.append(reinterpret_cast<const char*>(s.data.data()), s.data.size() * sizeof(float));
    }
    return out;
}

Frame decode(std::string_view bytes) {
    if (bytes.size() < 4) throw DomainError("frame shorter than its length prefix");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
    if (bytes.size() < 4 + static_cast<std::size_t>(n)) throw DomainError("frame header truncated");

    Frame f;
    try {
        f.header = nlohmann::json::parse(bytes.substr(4, n));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("frame header is not JSON: ") + e.what());
    }
    if (!f.header.is_object()) throw DomainError("frame header must be a JSON object");

    const auto payload = bytes.substr(4 + n);
    if (f.header.contains("sections")) {
        try {
            for (const auto& s : f.header.at("sections")) {
                if (s.at("dtype").get<std::string>() != "float32") throw DomainError("unsupported dtype");
                Section sec;
                sec.name = s.at("name").get<std::string>();
                sec.shape = s.at("shape").get<std::vector<int>>();
                const auto offset = s.at("offset").get<std::size_t>();
                const auto len = s.at("bytes").get<std::size_t>();
                if (len != element_count(sec.shape) * sizeof(float)) throw DomainError("section byte count mismatch");
                if (offset > payload.size() || len > payload.size() - offset) throw DomainError("section out of range");
                sec.data.resize(len / sizeof(float));
                std::memcpy(sec.data.data(), payload.data() + offset, len);
                f.sections.push_back(std::move(sec));
            }
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("malformed section table: ") + e.what());
        }
    }
    return f;
}

Section rgb_section(std::string name, const RgbImage& image) {
    Section s{std::move(name), {image.height, image.width, 3}, {}};
    s.data.assign(image.pixels.begin(), image.pixels.end());
    return s;
}

Section gray_section(std::string name, const GrayImage& image) {
    Section s{std::move(name), {image.height, image.width, 3}, {}};
    s.data.reserve(image.size() * 3);
    for (double v : image.pixels) s.data.insert(s.data.end(), 3, static_cast<float>(v));
    return s;
}

RgbImage section_to_rgb(const Section& s) {
    if (s.shape.size() != 3 || s.shape[2] != 3) throw DomainError("section '" + s.name + "' is not H x W x 3");
    RgbImage img(s.shape[1], s.shape[0]);
    img.pixels.assign(s.data.begin(), s.data.end());
    return img;
}

GrayImage section_channel_sum(const Section& s) {
    if (s.shape.size() != 3 || s.shape[2] != 3) throw DomainError("section '" + s.name + "' is not H x W x 3");
    GrayImage g(s.shape[1], s.shape[0]);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.pixels[i] = static_cast<double>(s.data[3 * i]) + s.data[3 * i + 1] + s.data[3 * i + 2];
    }
    return g;
}

}  // namespace strokeforge::wire
