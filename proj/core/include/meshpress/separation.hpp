#pragma once

#include <array>
#include <vector>

#include "meshpress/config.hpp"
#include "meshpress/raster.hpp"

namespace meshpress {

enum class PixelTag { None, C, M, Y, K };

/// Which single ink a pixel receives, and how much. `tag == None` iff density is 0.
class PixelClass {
public:
    constexpr PixelClass() = default;
    /// Density is clamped to [0,1]; a None tag forces density 0 and a zero
    /// density forces the None tag.
    PixelClass(PixelTag tag, double density) noexcept;

    PixelTag tag() const noexcept { return tag_; }
    double density() const noexcept { return density_; }

private:
    PixelTag tag_ = PixelTag::None;
    double density_ = 0.0;
};

struct ClassifiedImage {
    int width = 0;
    int height = 0;
    std::vector<PixelClass> classes;

    const PixelClass& at(int x, int y) const noexcept {
        return classes[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
};

PixelTag tag_for(Channel ch) noexcept;

/// Canonical 8x8 Bayer index matrix, entries 0..63.
const std::array<std::array<int, 8>, 8>& bayer8() noexcept;

/// Threshold (v + 0.5) / 64 for the cell at (x mod 8, y mod 8).
double bayer_threshold(int x, int y) noexcept;

struct Hsv {
    double h = 0.0;  // degrees in [0,360); meaningless when s == 0
    double s = 0.0;
    double v = 0.0;
};

Hsv to_hsv(Rgb8 p) noexcept;
/// Channels rounded half up.
Rgb8 from_hsv(const Hsv& hsv) noexcept;

/// True when the pixel falls inside the configured brown-background window.
/// Achromatic pixels (max == min) are never background.
bool is_background(Rgb8 p, const PipelineConfig& cfg) noexcept;

/// Background pixels become white; every other pixel gets its saturation
/// multiplied by sat_gain (clipped to 1).
RasterImage color_correct(const RasterImage& img, const PipelineConfig& cfg);

/// Single-pixel classification, rules applied in order: near white, solid
/// black, neutral shading, then the dominant CMY ink (ties C > M > Y) unless
/// it is below tau_ink.
PixelClass classify_pixel(Rgb8 p, const PipelineConfig& cfg) noexcept;

ClassifiedImage classify(const RasterImage& img, const PipelineConfig& cfg);

/// Opens a bit where the pixel belongs to `channel` and its density exceeds the Bayer threshold.
BitStencil dither(const ClassifiedImage& cls, Channel channel);

/// color_correct, classify, dither each channel, then stamp fiducials.
/// Mode is FourColor. Images too small for fiducials come back unregistered.
StencilSet separate(const RasterImage& img, const PipelineConfig& cfg);

} // namespace meshpress
