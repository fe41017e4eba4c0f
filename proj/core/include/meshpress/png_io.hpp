#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "meshpress/raster.hpp"

namespace meshpress {

/// Decodes any PNG colour type to RGB8. Alpha is composited over white and an
/// eXIf orientation tag, if present, is applied. Throws Error(BadImage) on
/// undecodable data and Error(ImageTooLarge) when a dimension exceeds
/// kMaxDimension (checked from the header, before pixel data is inflated).
RasterImage decode_png(std::span<const std::uint8_t> bytes);

RasterImage read_png_file(const std::string& path);

/// 8-bit RGB PNG.
std::vector<std::uint8_t> encode_png(const RasterImage& img);

/// 1-bit grayscale PNG; open bits are black.
std::vector<std::uint8_t> encode_stencil_png(const BitStencil& s);

/// Inverse of encode_stencil_png. Any grayscale PNG is accepted; a pixel is
/// open when its luma is below one half.
BitStencil decode_stencil_png(std::span<const std::uint8_t> bytes);

} // namespace meshpress
