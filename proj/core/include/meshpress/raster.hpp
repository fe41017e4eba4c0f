#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshpress {

/// Largest accepted width or height. Larger inputs are rejected, never resized.
inline constexpr int kMaxDimension = 4096;

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend constexpr bool operator==(const Rgb8&, const Rgb8&) = default;
};

inline constexpr Rgb8 kWhite{255, 255, 255};

/// Ink coverage fractions for the three subtractive primaries.
struct InkCmy {
    double c = 0.0;
    double m = 0.0;
    double y = 0.0;
};

/// Rec. 709 weighted luma in [0,1].
double luma(Rgb8 p) noexcept;

/// Complement ink model: c = 1 - R/255 and likewise for m, y.
InkCmy ink_cmy(Rgb8 p) noexcept;

/// Row-major RGB8 image. Dimensions are always within 1..kMaxDimension.
class RasterImage {
public:
    /// Throws Error(ImageTooLarge) above kMaxDimension, Error(BadImage) for zero dimensions.
    RasterImage(int width, int height, Rgb8 fill = kWhite);
    RasterImage(int width, int height, std::vector<Rgb8> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    Rgb8 at(int x, int y) const noexcept { return pixels_[index(x, y)]; }
    void set(int x, int y, Rgb8 p) noexcept { pixels_[index(x, y)] = p; }

    std::span<const Rgb8> pixels() const noexcept { return pixels_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<Rgb8> pixels_;
};

/// 1-bit grid. A set bit is open mesh: ink passes and the printer fires a dot.
class BitStencil {
public:
    BitStencil(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool open) noexcept { bits_[index(x, y)] = open ? 1 : 0; }

    std::size_t open_count() const noexcept;

    friend bool operator==(const BitStencil&, const BitStencil&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

enum class Channel { C = 0, M = 1, Y = 2, K = 3 };

inline constexpr std::array<Channel, 4> kAllChannels{Channel::C, Channel::M, Channel::Y, Channel::K};

char channel_letter(Channel ch) noexcept;        // 'C'
char channel_file_letter(Channel ch) noexcept;   // 'c'
/// Accepts c|m|y|k in either case. Throws Error(BadConfig) otherwise.
Channel parse_channel(std::string_view text);

enum class RenderMode { FourColor, ContourTrim, Silhouette };

std::string_view to_string(RenderMode mode) noexcept;
/// Accepts fourcolor|trim|silhouette (also contourtrim / contour_trim).
RenderMode parse_render_mode(std::string_view text);

/// Solid square registration mark; (x, y) is its top-left corner.
struct Fiducial {
    int x = 0;
    int y = 0;
    int side = 0;

    bool contains(int px, int py) const noexcept {
        return px >= x && px < x + side && py >= y && py < y + side;
    }

    friend constexpr bool operator==(const Fiducial&, const Fiducial&) = default;
};

/// The four C, M, Y, K layers of one job.
struct StencilSet {
    std::array<BitStencil, 4> layers;
    RenderMode mode = RenderMode::FourColor;
    std::vector<Fiducial> fiducials;
    /// False when the image was too small to carry fiducials.
    bool registered = false;
    std::string config_hash;

    StencilSet(std::array<BitStencil, 4> l, RenderMode m, std::string hash);

    const BitStencil& layer(Channel ch) const noexcept { return layers[static_cast<std::size_t>(ch)]; }
    BitStencil& layer(Channel ch) noexcept { return layers[static_cast<std::size_t>(ch)]; }

    int width() const noexcept { return layers[0].width(); }
    int height() const noexcept { return layers[0].height(); }

    bool is_fiducial(int x, int y) const noexcept;

    friend bool operator==(const StencilSet&, const StencilSet&) = default;
};

} // namespace meshpress
