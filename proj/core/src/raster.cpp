#include "meshpress/raster.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "meshpress/error.hpp"

namespace meshpress {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::BadImage: return "BadImage";
    case ErrorCode::ImageTooLarge: return "ImageTooLarge";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::WrongMode: return "WrongMode";
    case ErrorCode::StencilTooWide: return "StencilTooWide";
    case ErrorCode::TextTooLong: return "TextTooLong";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

double luma(Rgb8 p) noexcept {
    return 0.2126 * (p.r / 255.0) + 0.7152 * (p.g / 255.0) + 0.0722 * (p.b / 255.0);
}

InkCmy ink_cmy(Rgb8 p) noexcept {
    return {1.0 - p.r / 255.0, 1.0 - p.g / 255.0, 1.0 - p.b / 255.0};
}

namespace {

void check_dimensions(int width, int height) {
    if (width > kMaxDimension || height > kMaxDimension) {
        throw Error(ErrorCode::ImageTooLarge, "image " + std::to_string(width) + "x" + std::to_string(height) +
                                                  " exceeds the " + std::to_string(kMaxDimension) + " pixel limit");
    }
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::BadImage, "image dimensions must be positive");
    }
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

RasterImage::RasterImage(int width, int height, Rgb8 fill) : width_(width), height_(height) {
    check_dimensions(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RasterImage::RasterImage(int width, int height, std::vector<Rgb8> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::BadImage, "pixel count does not match dimensions");
    }
}

BitStencil::BitStencil(int width, int height, bool fill) : width_(width), height_(height) {
    check_dimensions(width, height);
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BitStencil::open_count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

char channel_letter(Channel ch) noexcept { return "CMYK"[static_cast<int>(ch)]; }

char channel_file_letter(Channel ch) noexcept { return "cmyk"[static_cast<int>(ch)]; }

Channel parse_channel(std::string_view text) {
    const auto t = lower(text);
    if (t == "c") return Channel::C;
    if (t == "m") return Channel::M;
    if (t == "y") return Channel::Y;
    if (t == "k") return Channel::K;
    throw Error(ErrorCode::BadConfig, "unknown channel '" + std::string(text) + "'");
}

std::string_view to_string(RenderMode mode) noexcept {
    switch (mode) {
    case RenderMode::FourColor: return "fourcolor";
    case RenderMode::ContourTrim: return "trim";
    case RenderMode::Silhouette: return "silhouette";
    }
    return "fourcolor";
}

RenderMode parse_render_mode(std::string_view text) {
    const auto t = lower(text);
    if (t == "fourcolor" || t == "four_color") return RenderMode::FourColor;
    if (t == "trim" || t == "contourtrim" || t == "contour_trim") return RenderMode::ContourTrim;
    if (t == "silhouette") return RenderMode::Silhouette;
    throw Error(ErrorCode::BadConfig, "unknown mode '" + std::string(text) + "'");
}

StencilSet::StencilSet(std::array<BitStencil, 4> l, RenderMode m, std::string hash)
    : layers(std::move(l)), mode(m), config_hash(std::move(hash)) {
    for (const auto& layer : layers) {
        if (layer.width() != layers[0].width() || layer.height() != layers[0].height()) {
            throw Error(ErrorCode::DimensionMismatch, "stencil layers differ in size");
        }
    }
}

bool StencilSet::is_fiducial(int x, int y) const noexcept {
    return std::any_of(fiducials.begin(), fiducials.end(), [&](const Fiducial& f) { return f.contains(x, y); });
}

} // namespace meshpress
