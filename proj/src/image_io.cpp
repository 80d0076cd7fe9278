#include "strokeforge/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "strokeforge/error.hpp"

namespace strokeforge::io {
namespace {

RgbImage from_mat(const cv::Mat& decoded) {
    cv::Mat bgr;
    if (decoded.channels() == 1) {
        cv::cvtColor(decoded, bgr, cv::COLOR_GRAY2BGR);
    } else if (decoded.channels() == 4) {
        cv::cvtColor(decoded, bgr, cv::COLOR_BGRA2BGR);
    } else {
        bgr = decoded;
    }
    const double scale = decoded.depth() == CV_16U ? 1.0 / 65535.0 : 1.0 / 255.0;
    cv::Mat f;
    bgr.convertTo(f, CV_64FC3, scale);
    RgbImage out(f.cols, f.rows);
    for (int y = 0; y < f.rows; ++y) {
        const auto* row = f.ptr<cv::Vec3d>(y);
        for (int x = 0; x < f.cols; ++x) {
            out.at(x, y, 0) = row[x][2];
            out.at(x, y, 1) = row[x][1];
            out.at(x, y, 2) = row[x][0];
        }
    }
    return out;
}

RegionMask mask_from_mat(const cv::Mat& decoded, int region_id, std::string label) {
    RegionMask m;
    m.width = decoded.cols;
    m.height = decoded.rows;
    m.region_id = region_id;
    m.label = std::move(label);
    m.bits.assign(static_cast<std::size_t>(m.width) * m.height, 0);
    cv::Mat u8;
    decoded.convertTo(u8, CV_8U);
    const int ch = u8.channels();
    for (int y = 0; y < u8.rows; ++y) {
        const auto* row = u8.ptr<std::uint8_t>(y);
        for (int x = 0; x < u8.cols; ++x) {
            bool set = false;
            for (int c = 0; c < std::min(ch, 3); ++c) set = set || row[x * ch + c] != 0;
            m.bits[static_cast<std::size_t>(y) * m.width + x] = set ? 1 : 0;
        }
    }
    return m;
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

cv::Mat to_mat(const GrayImage& g) {
    cv::Mat m(g.height, g.width, CV_8UC1);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) m.at<std::uint8_t>(y, x) = to_byte(g.at(x, y));
    }
    return m;
}

cv::Mat to_mat(const RgbImage& g) {
    cv::Mat m(g.height, g.width, CV_8UC3);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            m.at<cv::Vec3b>(y, x) = {to_byte(g.at(x, y, 2)), to_byte(g.at(x, y, 1)), to_byte(g.at(x, y, 0))};
        }
    }
    return m;
}

std::vector<std::uint8_t> encode(const cv::Mat& m) {
    std::vector<std::uint8_t> buf;
    if (!cv::imencode(".png", m, buf)) throw DomainError("PNG encoding failed");
    return buf;
}

int interpolation_for(int src_w, int src_h, int w, int h) {
    return (w <= src_w && h <= src_h) ? cv::INTER_AREA : cv::INTER_LINEAR;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path.string());
    out << contents;
}

RgbImage decode_rgb(const std::vector<std::uint8_t>& bytes) {
    if (bytes.empty()) throw DomainError("empty image data");
    cv::Mat decoded = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    if (decoded.empty()) throw DomainError("image data is not a decodable PNG/JPEG");
    return from_mat(decoded);
}

RgbImage read_rgb(const std::filesystem::path& path) {
    try {
        return decode_rgb(read_file(path));
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

RegionMask decode_mask(const std::vector<std::uint8_t>& bytes, int region_id, std::string label) {
    if (bytes.empty()) throw DomainError("empty mask data");
    cv::Mat decoded = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    if (decoded.empty()) throw DomainError("mask data is not a decodable PNG/JPEG");
    return mask_from_mat(decoded, region_id, std::move(label));
}

RegionMask read_mask(const std::filesystem::path& path, int region_id, std::string label) {
    try {
        return decode_mask(read_file(path), region_id, std::move(label));
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) { return encode(to_mat(image)); }
std::vector<std::uint8_t> encode_png(const RgbImage& image) { return encode(to_mat(image)); }

std::vector<std::uint8_t> encode_png(const RegionMask& mask) {
    cv::Mat m(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) m.at<std::uint8_t>(y, x) = mask.test(x, y) ? 255 : 0;
    }
    return encode(m);
}

namespace {
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    write_file(path, std::string(bytes.begin(), bytes.end()));
}
}  // namespace

void write_png(const std::filesystem::path& path, const GrayImage& image) { write_bytes(path, encode_png(image)); }
void write_png(const std::filesystem::path& path, const RgbImage& image) { write_bytes(path, encode_png(image)); }
void write_png(const std::filesystem::path& path, const RegionMask& mask) { write_bytes(path, encode_png(mask)); }

GrayImage resize(const GrayImage& src, int width, int height) {
    if (src.width == width && src.height == height) return src;
    cv::Mat in(src.height, src.width, CV_64FC1, const_cast<double*>(src.pixels.data()));
    cv::Mat out;
    cv::resize(in, out, cv::Size(width, height), 0, 0, interpolation_for(src.width, src.height, width, height));
    GrayImage g(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) g.at(x, y) = std::clamp(out.at<double>(y, x), 0.0, 1.0);
    }
    return g;
}

RgbImage resize(const RgbImage& src, int width, int height) {
    if (src.width == width && src.height == height) return src;
    cv::Mat in(src.height, src.width, CV_64FC3, const_cast<double*>(src.pixels.data()));
    cv::Mat out;
    cv::resize(in, out, cv::Size(width, height), 0, 0, interpolation_for(src.width, src.height, width, height));
    RgbImage g(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto v = out.at<cv::Vec3d>(y, x);
            for (int c = 0; c < 3; ++c) g.at(x, y, c) = std::clamp(v[c], 0.0, 1.0);
        }
    }
    return g;
}

RegionMask resize(const RegionMask& src, int width, int height) {
    if (src.width == width && src.height == height) return src;
    RegionMask m = src;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, 0);
    for (int y = 0; y < height; ++y) {
        const int sy = std::min(src.height - 1, static_cast<int>((y + 0.5) * src.height / height));
        for (int x = 0; x < width; ++x) {
            const int sx = std::min(src.width - 1, static_cast<int>((x + 0.5) * src.width / width));
            m.bits[static_cast<std::size_t>(y) * width + x] = src.test(sx, sy) ? 1 : 0;
        }
    }
    return m;
}

}  // namespace strokeforge::io
