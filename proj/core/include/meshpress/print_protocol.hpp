#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "meshpress/config.hpp"
#include "meshpress/raster.hpp"

namespace meshpress {

// ESC/POS "GS v 0" raster image, normal density.
inline constexpr std::array<std::uint8_t, 4> kRasterCommand{0x1D, 0x76, 0x30, 0x00};
inline constexpr std::size_t kRasterHeaderSize = 8;
// ESC d n: print and feed n lines. Sent after every frame.
inline constexpr std::array<std::uint8_t, 3> kFeedCommand{0x1B, 0x64, 0x04};

/// One wire-ready raster frame: 8 header bytes then MSB-first packed rows.
struct RasterFrame {
    std::vector<std::uint8_t> bytes;

    friend bool operator==(const RasterFrame&, const RasterFrame&) = default;
};

std::size_t raster_frame_size(int width, int height) noexcept;

RasterFrame pack_raster(const BitStencil& s);

/// Inverse of pack_raster. `width` disambiguates the pad bits of the last
/// byte. Throws Error(BadImage) on a malformed frame or non-zero padding.
BitStencil unpack_raster(std::span<const std::uint8_t> frame, int width);

/// Fiducial squares for a width x height canvas. Throws Error(ImageTooSmall)
/// if the canvas is smaller than 2 * (margin + side) in either dimension.
std::vector<Fiducial> fiducial_layout(int width, int height, const PipelineConfig& cfg);

/// Opens the corner squares on all four layers. Idempotent. Throws
/// Error(ImageTooSmall) when the canvas cannot hold them.
StencilSet add_fiducials(StencilSet set, const PipelineConfig& cfg);

/// Like add_fiducials, but a too-small canvas yields the set unchanged and
/// flagged unregistered instead of throwing.
StencilSet add_fiducials_or_flag(StencilSet set, const PipelineConfig& cfg);

/// Re-opens whatever fiducials the set already records.
void restamp_fiducials(StencilSet& set) noexcept;

enum class PrintStrategy { Cmyk, AreaDescBlackLast };

std::string_view to_string(PrintStrategy s) noexcept;
/// Accepts cmyk | area (also areadescblacklast).
PrintStrategy parse_print_strategy(std::string_view text);

struct PrintPlan {
    std::array<Channel, 4> order{Channel::C, Channel::M, Channel::Y, Channel::K};
    PrintStrategy strategy = PrintStrategy::Cmyk;
};

PrintPlan plan_order(const StencilSet& set, PrintStrategy strategy);
/// Same rule applied to raw open-bit counts indexed by Channel.
PrintPlan plan_order(const std::array<std::size_t, 4>& open_counts, PrintStrategy strategy);

inline constexpr std::size_t kMaxErrorCodeLength = 16;
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kGlyphAdvance = kGlyphWidth + 1;

/// Seven rows of the 5x7 glyph; bit 4 of each row is the leftmost column.
/// Lowercase maps to uppercase; characters without a glyph render as '?'.
const std::array<std::uint8_t, kGlyphHeight>& glyph_rows(char c) noexcept;

/// Characters the built-in font covers.
std::string_view font_charset() noexcept;

/// Renders `code` centred in the 5x7 font. Throws Error(TextTooLong) when the
/// code exceeds 16 characters, width < 6 * length, or height < 8.
BitStencil render_error_stencil(std::string_view code, int width, int height);

} // namespace meshpress
