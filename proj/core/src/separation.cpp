#include "meshpress/separation.hpp"

#include <algorithm>
#include <cmath>

#include "meshpress/print_protocol.hpp"

namespace meshpress {

PixelClass::PixelClass(PixelTag tag, double density) noexcept {
    density = std::clamp(density, 0.0, 1.0);
    if (tag == PixelTag::None || density == 0.0) {
        tag_ = PixelTag::None;
        density_ = 0.0;
    } else {
        tag_ = tag;
        density_ = density;
    }
}

PixelTag tag_for(Channel ch) noexcept {
    switch (ch) {
    case Channel::C: return PixelTag::C;
    case Channel::M: return PixelTag::M;
    case Channel::Y: return PixelTag::Y;
    case Channel::K: return PixelTag::K;
    }
    return PixelTag::None;
}

const std::array<std::array<int, 8>, 8>& bayer8() noexcept {
    static constexpr std::array<std::array<int, 8>, 8> kMatrix{{
        {0, 32, 8, 40, 2, 34, 10, 42},
        {48, 16, 56, 24, 50, 18, 58, 26},
        {12, 44, 4, 36, 14, 46, 6, 38},
        {60, 28, 52, 20, 62, 30, 54, 22},
        {3, 35, 11, 43, 1, 33, 9, 41},
        {51, 19, 59, 27, 49, 17, 57, 25},
        {15, 47, 7, 39, 13, 45, 5, 37},
        {63, 31, 55, 23, 61, 29, 53, 21},
    }};
    return kMatrix;
}

double bayer_threshold(int x, int y) noexcept {
    return (bayer8()[static_cast<std::size_t>(y & 7)][static_cast<std::size_t>(x & 7)] + 0.5) / 64.0;
}

Hsv to_hsv(Rgb8 p) noexcept {
    const int hi = std::max({p.r, p.g, p.b});
    const int lo = std::min({p.r, p.g, p.b});
    const double delta = hi - lo;
    Hsv out;
    out.v = hi / 255.0;
    out.s = hi == 0 ? 0.0 : delta / hi;
    if (delta == 0) return out;

    double h = 0.0;
    if (hi == p.r) {
        h = 60.0 * ((p.g - p.b) / delta);
    } else if (hi == p.g) {
        h = 60.0 * ((p.b - p.r) / delta + 2.0);
    } else {
        h = 60.0 * ((p.r - p.g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    out.h = h;
    return out;
}

Rgb8 from_hsv(const Hsv& hsv) noexcept {
    const double v = hsv.v * 255.0;
    const double chroma = v * hsv.s;
    const double hp = std::fmod(std::fmod(hsv.h, 360.0) + 360.0, 360.0) / 60.0;
    const double x = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    const double m = v - chroma;

    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(hp)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
    }
    auto to8 = [](double c) {
        return static_cast<std::uint8_t>(std::clamp(std::floor(c + 0.5), 0.0, 255.0));
    };
    return {to8(r + m), to8(g + m), to8(b + m)};
}

bool is_background(Rgb8 p, const PipelineConfig& cfg) noexcept {
    if (p.r == p.g && p.g == p.b) return false;
    const Hsv hsv = to_hsv(p);
    return hsv.h >= cfg.bg_hue_min && hsv.h <= cfg.bg_hue_max && hsv.s <= cfg.bg_sat_max &&
           hsv.v >= cfg.bg_val_min;
}

RasterImage color_correct(const RasterImage& img, const PipelineConfig& cfg) {
    RasterImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb8 p = img.at(x, y);
            if (is_background(p, cfg)) {
                out.set(x, y, kWhite);
                continue;
            }
            Hsv hsv = to_hsv(p);
            if (hsv.s == 0.0) {
                out.set(x, y, p);
                continue;
            }
            hsv.s = std::min(1.0, hsv.s * cfg.sat_gain);
            out.set(x, y, from_hsv(hsv));
        }
    }
    return out;
}

PixelClass classify_pixel(Rgb8 p, const PipelineConfig& cfg) noexcept {
    const double l = luma(p);
    const InkCmy ink = ink_cmy(p);
    const double chroma = (std::max({p.r, p.g, p.b}) - std::min({p.r, p.g, p.b})) / 255.0;

    if (l >= cfg.theta_white && chroma < cfg.tau_neutral) return {};
    if (l < cfg.theta_k) return {PixelTag::K, 1.0};
    if (chroma < cfg.tau_neutral) return {PixelTag::K, 1.0 - l};

    // Strict comparisons keep the earlier channel on ties: C > M > Y.
    PixelTag winner = PixelTag::C;
    double best = ink.c;
    if (ink.m > best) {
        winner = PixelTag::M;
        best = ink.m;
    }
    if (ink.y > best) {
        winner = PixelTag::Y;
        best = ink.y;
    }
    if (best < cfg.tau_ink) return {};
    return {winner, best};
}

ClassifiedImage classify(const RasterImage& img, const PipelineConfig& cfg) {
    ClassifiedImage out;
    out.width = img.width();
    out.height = img.height();
    out.classes.reserve(img.pixels().size());
    for (const Rgb8 p : img.pixels()) out.classes.push_back(classify_pixel(p, cfg));
    return out;
}

BitStencil dither(const ClassifiedImage& cls, Channel channel) {
    const PixelTag want = tag_for(channel);
    BitStencil out(cls.width, cls.height);
    for (int y = 0; y < cls.height; ++y) {
        for (int x = 0; x < cls.width; ++x) {
            const PixelClass& pc = cls.at(x, y);
            if (pc.tag() == want && pc.density() > bayer_threshold(x, y)) out.set(x, y, true);
        }
    }
    return out;
}

StencilSet separate(const RasterImage& img, const PipelineConfig& cfg) {
    cfg.validate();
    const ClassifiedImage cls = classify(color_correct(img, cfg), cfg);
    StencilSet set({dither(cls, Channel::C), dither(cls, Channel::M), dither(cls, Channel::Y),
                    dither(cls, Channel::K)},
                   RenderMode::FourColor, cfg.hash());
    return add_fiducials_or_flag(std::move(set), cfg);
}

} // namespace meshpress
