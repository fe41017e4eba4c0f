#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshpress/raster.hpp"

namespace meshpress::service {

/// External image-to-image stage: POST a PNG, receive a PNG of identical size.
struct StylizerContract {
    std::string endpoint;
    int timeout_ms = 10000;
};

struct StylizeOutcome {
    std::optional<RasterImage> image;
    std::string failure;  // empty on success

    bool ok() const noexcept { return image.has_value(); }
};

/// Calls the endpoint. Non-200 replies, transport errors, timeouts, undecodable
/// bodies and size mismatches are all reported as failures, never thrown.
StylizeOutcome call_stylizer(const StylizerContract& contract, std::span<const std::uint8_t> png,
                             const RasterImage& original);

/// Per-channel posterization to four levels: floor(v / 64) * 85.
RasterImage posterize(const RasterImage& img);

/// Deterministic stand-in for a stylization model. Throws Error(BadImage) on undecodable input.
std::vector<std::uint8_t> stub_stylizer(std::span<const std::uint8_t> png);

} // namespace meshpress::service
