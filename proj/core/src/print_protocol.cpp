#include "meshpress/print_protocol.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "meshpress/error.hpp"

namespace meshpress {

namespace {

constexpr std::size_t bytes_per_row(int width) noexcept { return (static_cast<std::size_t>(width) + 7) / 8; }

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

std::size_t raster_frame_size(int width, int height) noexcept {
    return kRasterHeaderSize + bytes_per_row(width) * static_cast<std::size_t>(height);
}

RasterFrame pack_raster(const BitStencil& s) {
    const std::size_t row_bytes = bytes_per_row(s.width());
    if (row_bytes > 0xFFFF || s.height() > 0xFFFF) {
        throw Error(ErrorCode::StencilTooWide, "stencil does not fit a GS v 0 header");
    }
    RasterFrame frame;
    frame.bytes.reserve(raster_frame_size(s.width(), s.height()));
    for (const std::uint8_t b : kRasterCommand) frame.bytes.push_back(b);
    frame.bytes.push_back(static_cast<std::uint8_t>(row_bytes & 0xFF));
    frame.bytes.push_back(static_cast<std::uint8_t>(row_bytes >> 8));
    frame.bytes.push_back(static_cast<std::uint8_t>(s.height() & 0xFF));
    frame.bytes.push_back(static_cast<std::uint8_t>(s.height() >> 8));

    for (int y = 0; y < s.height(); ++y) {
        for (std::size_t b = 0; b < row_bytes; ++b) {
            std::uint8_t byte = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int x = static_cast<int>(b * 8) + bit;
                if (x < s.width() && s.at(x, y)) byte |= static_cast<std::uint8_t>(0x80 >> bit);
            }
            frame.bytes.push_back(byte);
        }
    }
    return frame;
}

BitStencil unpack_raster(std::span<const std::uint8_t> frame, int width) {
    auto malformed = [](const std::string& why) { return Error(ErrorCode::BadImage, "malformed raster frame: " + why); };
    if (frame.size() < kRasterHeaderSize) throw malformed("shorter than header");
    if (!std::equal(kRasterCommand.begin(), kRasterCommand.end(), frame.begin())) {
        throw malformed("missing GS v 0 command");
    }
    const std::size_t row_bytes = frame[4] | (static_cast<std::size_t>(frame[5]) << 8);
    const int height = frame[6] | (frame[7] << 8);
    if (width < 1 || bytes_per_row(width) != row_bytes) throw malformed("width does not match bytes per row");
    if (height < 1) throw malformed("zero height");
    if (frame.size() != raster_frame_size(width, height)) throw malformed("length does not match header");

    BitStencil out(width, height);
    const auto* data = frame.data() + kRasterHeaderSize;
    for (int y = 0; y < height; ++y) {
        const auto* row = data + static_cast<std::size_t>(y) * row_bytes;
        for (std::size_t b = 0; b < row_bytes; ++b) {
            for (int bit = 0; bit < 8; ++bit) {
                const int x = static_cast<int>(b * 8) + bit;
                const bool set = (row[b] & (0x80 >> bit)) != 0;
                if (x >= width) {
                    if (set) throw malformed("non-zero pad bits");
                } else if (set) {
                    out.set(x, y, true);
                }
            }
        }
    }
    return out;
}

std::vector<Fiducial> fiducial_layout(int width, int height, const PipelineConfig& cfg) {
    const int m = cfg.fiducial_margin;
    const int s = cfg.fiducial_side;
    const int need = 2 * (m + s);
    if (width < need || height < need) {
        throw Error(ErrorCode::ImageTooSmall, "fiducials need at least " + std::to_string(need) + "x" +
                                                  std::to_string(need) + " pixels, image is " +
                                                  std::to_string(width) + "x" + std::to_string(height));
    }
    return {
        {m, m, s},
        {width - m - s, m, s},
        {m, height - m - s, s},
        {width - m - s, height - m - s, s},
    };
}

void restamp_fiducials(StencilSet& set) noexcept {
    for (auto& layer : set.layers) {
        for (const Fiducial& f : set.fiducials) {
            for (int y = f.y; y < f.y + f.side; ++y) {
                for (int x = f.x; x < f.x + f.side; ++x) layer.set(x, y, true);
            }
        }
    }
}

StencilSet add_fiducials(StencilSet set, const PipelineConfig& cfg) {
    set.fiducials = fiducial_layout(set.width(), set.height(), cfg);
    set.registered = true;
    restamp_fiducials(set);
    return set;
}

StencilSet add_fiducials_or_flag(StencilSet set, const PipelineConfig& cfg) {
    try {
        return add_fiducials(set, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ImageTooSmall) throw;
    }
    set.fiducials.clear();
    set.registered = false;
    return set;
}

std::string_view to_string(PrintStrategy s) noexcept {
    return s == PrintStrategy::Cmyk ? "cmyk" : "area";
}

PrintStrategy parse_print_strategy(std::string_view text) {
    const auto t = lower(text);
    if (t == "cmyk") return PrintStrategy::Cmyk;
    if (t == "area" || t == "areadescblacklast" || t == "area_desc_black_last") return PrintStrategy::AreaDescBlackLast;
    throw Error(ErrorCode::BadConfig, "unknown print strategy '" + std::string(text) + "'");
}

PrintPlan plan_order(const std::array<std::size_t, 4>& open_counts, PrintStrategy strategy) {
    PrintPlan plan;
    plan.strategy = strategy;
    if (strategy == PrintStrategy::AreaDescBlackLast) {
        std::array<Channel, 3> colors{Channel::C, Channel::M, Channel::Y};
        std::stable_sort(colors.begin(), colors.end(), [&](Channel a, Channel b) {
            return open_counts[static_cast<std::size_t>(a)] > open_counts[static_cast<std::size_t>(b)];
        });
        plan.order = {colors[0], colors[1], colors[2], Channel::K};
    }
    return plan;
}

PrintPlan plan_order(const StencilSet& set, PrintStrategy strategy) {
    std::array<std::size_t, 4> counts{};
    for (const Channel ch : kAllChannels) counts[static_cast<std::size_t>(ch)] = set.layer(ch).open_count();
    return plan_order(counts, strategy);
}

BitStencil render_error_stencil(std::string_view code, int width, int height) {
    const int n = static_cast<int>(code.size());
    if (code.size() > kMaxErrorCodeLength || width < kGlyphAdvance * n || height < kGlyphHeight + 1) {
        throw Error(ErrorCode::TextTooLong, "error code '" + std::string(code) + "' does not fit " +
                                                std::to_string(width) + "x" + std::to_string(height));
    }
    BitStencil out(width, height);
    if (n == 0) return out;

    const int text_width = kGlyphAdvance * n - 1;
    const int x0 = (width - text_width) / 2;
    const int y0 = (height - kGlyphHeight) / 2;
    for (int i = 0; i < n; ++i) {
        const auto& rows = glyph_rows(code[static_cast<std::size_t>(i)]);
        for (int r = 0; r < kGlyphHeight; ++r) {
            for (int c = 0; c < kGlyphWidth; ++c) {
                if (rows[static_cast<std::size_t>(r)] & (0x10 >> c)) out.set(x0 + i * kGlyphAdvance + c, y0 + r, true);
            }
        }
    }
    return out;
}

} // namespace meshpress
