#pragma once

#include <cstdint>
#include <string>

#include "strokeforge/geometry.hpp"
#include "strokeforge/optimize.hpp"

namespace strokeforge {

struct SvgMetadata {
    std::uint64_t seed = 0;
    std::string config_hash;  // 16 hex digits
};

// Canonical JSON of every setting that affects the result.
std::string config_json(const SessionConfig& config);
// FNV-1a 64 over config_json.
std::string config_hash(const SessionConfig& config);

// One <path d="M x y C x y x y x y"> per stroke in canvas pixels, grouped
// into <g id="round-k">. Output is a pure function of the inputs.
std::string export_svg(const Sketch& sketch, const SvgMetadata& meta = {});

struct ParsedSvg {
    Sketch sketch;
    SvgMetadata meta;
};

// Reads documents written by export_svg. Throws DomainError otherwise.
ParsedSvg parse_svg(const std::string& document);

}  // namespace strokeforge
