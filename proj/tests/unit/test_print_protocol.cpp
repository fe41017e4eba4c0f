#include <gtest/gtest.h>

#include <random>
#include <set>

#include "meshpress/error.hpp"
#include "meshpress/print_protocol.hpp"
#include "test_support.hpp"

using namespace meshpress;
using namespace meshpress::testing;

using Bytes = std::vector<std::uint8_t>;

TEST(PackRaster, GoldenExamples) {
    BitStencil ends(8, 1);
    ends.set(0, 0, true);
    ends.set(7, 0, true);
    EXPECT_EQ(pack_raster(ends).bytes, (Bytes{0x1D, 0x76, 0x30, 0x00, 0x01, 0x00, 0x01, 0x00, 0x81}));

    EXPECT_EQ(pack_raster(BitStencil(8, 1)).bytes, (Bytes{0x1D, 0x76, 0x30, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00}));

    EXPECT_EQ(pack_raster(BitStencil(10, 2, true)).bytes,
              (Bytes{0x1D, 0x76, 0x30, 0x00, 0x02, 0x00, 0x02, 0x00, 0xFF, 0xC0, 0xFF, 0xC0}));
}

TEST(PackRaster, LittleEndianHeaderForLargeFrames) {
    const RasterFrame f = pack_raster(BitStencil(4096, 300));
    EXPECT_EQ(f.bytes[4], 0x00);  // 512 bytes per row
    EXPECT_EQ(f.bytes[5], 0x02);
    EXPECT_EQ(f.bytes[6], 0x2C);  // 300 rows
    EXPECT_EQ(f.bytes[7], 0x01);
    EXPECT_EQ(f.bytes.size(), 8u + 512u * 300u);
}

TEST(PackRaster, RoundTripAndLengthOverAllSmallShapes) {
    std::mt19937 rng(2024);
    for (int w = 1; w <= 64; ++w) {
        for (int h = 1; h <= 16; ++h) {
            const BitStencil s = random_stencil(w, h, rng);
            const RasterFrame f = pack_raster(s);
            ASSERT_EQ(f.bytes.size(), 8u + ((w + 7) / 8) * static_cast<std::size_t>(h));
            ASSERT_EQ(f.bytes.size(), raster_frame_size(w, h));
            ASSERT_EQ(unpack_raster(f.bytes, w), s) << w << "x" << h;
        }
    }
}

TEST(UnpackRaster, RejectsMalformedFrames) {
    const Bytes good{0x1D, 0x76, 0x30, 0x00, 0x02, 0x00, 0x01, 0x00, 0xFF, 0xC0};
    EXPECT_NO_THROW(unpack_raster(good, 10));
    EXPECT_THROW(unpack_raster(good, 8), Error);    // wrong bytes-per-row
    EXPECT_THROW(unpack_raster(good, 17), Error);
    Bytes padded = good;
    padded.back() = 0xE0;  // bit beyond column 9
    EXPECT_THROW(unpack_raster(padded, 10), Error);
    Bytes wrong_cmd = good;
    wrong_cmd[0] = 0x1B;
    EXPECT_THROW(unpack_raster(wrong_cmd, 10), Error);
    EXPECT_THROW(unpack_raster(Bytes(good.begin(), good.end() - 1), 10), Error);
    EXPECT_THROW(unpack_raster(Bytes{0x1D, 0x76}, 10), Error);
}

namespace {

StencilSet closed_set(int w, int h) {
    return StencilSet({BitStencil(w, h), BitStencil(w, h), BitStencil(w, h), BitStencil(w, h)}, RenderMode::FourColor,
                      "h");
}

} // namespace

TEST(Fiducials, CornerSquares) {
    const PipelineConfig cfg;
    const StencilSet s = add_fiducials(closed_set(64, 64), cfg);
    EXPECT_TRUE(s.registered);
    ASSERT_EQ(s.fiducials.size(), 4u);
    EXPECT_EQ(s.fiducials[0], (Fiducial{8, 8, 6}));
    EXPECT_EQ(s.fiducials[1], (Fiducial{50, 8, 6}));
    EXPECT_EQ(s.fiducials[2], (Fiducial{8, 50, 6}));
    EXPECT_EQ(s.fiducials[3], (Fiducial{50, 50, 6}));
    for (const Channel ch : kAllChannels) {
        EXPECT_EQ(s.layer(ch).open_count(), 4u * 36u);
        EXPECT_TRUE(s.layer(ch).at(8, 8));
        EXPECT_TRUE(s.layer(ch).at(13, 13));
        EXPECT_FALSE(s.layer(ch).at(14, 13));
        EXPECT_FALSE(s.layer(ch).at(7, 8));
        EXPECT_TRUE(s.layer(ch).at(55, 55));
        EXPECT_FALSE(s.layer(ch).at(56, 55));
    }
}

TEST(Fiducials, IdempotentAndLayerUniform) {
    std::mt19937 rng(4);
    const PipelineConfig cfg;
    StencilSet s({random_stencil(40, 30, rng), random_stencil(40, 30, rng), random_stencil(40, 30, rng),
                  random_stencil(40, 30, rng)},
                 RenderMode::FourColor, "h");
    const StencilSet once = add_fiducials(s, cfg);
    EXPECT_EQ(add_fiducials(once, cfg), once);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            if (once.is_fiducial(x, y)) {
                for (const Channel ch : kAllChannels) EXPECT_TRUE(once.layer(ch).at(x, y));
            } else {
                for (const Channel ch : kAllChannels) EXPECT_EQ(once.layer(ch).at(x, y), s.layer(ch).at(x, y));
            }
        }
    }
}

TEST(Fiducials, TooSmall) {
    const PipelineConfig cfg;
    try {
        add_fiducials(closed_set(20, 20), cfg);
        FAIL() << "expected ImageTooSmall";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ImageTooSmall);
    }
    EXPECT_NO_THROW(add_fiducials(closed_set(28, 28), cfg));
    EXPECT_THROW(add_fiducials(closed_set(28, 27), cfg), Error);

    const StencilSet flagged = add_fiducials_or_flag(closed_set(20, 20), cfg);
    EXPECT_FALSE(flagged.registered);
    EXPECT_TRUE(flagged.fiducials.empty());
    for (const Channel ch : kAllChannels) EXPECT_EQ(flagged.layer(ch).open_count(), 0u);
}

TEST(PlanOrder, Examples) {
    EXPECT_EQ(plan_order(closed_set(4, 4), PrintStrategy::Cmyk).order,
              (std::array{Channel::C, Channel::M, Channel::Y, Channel::K}));
    EXPECT_EQ(plan_order({10, 40, 20, 99}, PrintStrategy::AreaDescBlackLast).order,
              (std::array{Channel::M, Channel::Y, Channel::C, Channel::K}));
    EXPECT_EQ(plan_order({5, 5, 5, 5}, PrintStrategy::AreaDescBlackLast).order,
              (std::array{Channel::C, Channel::M, Channel::Y, Channel::K}));
    EXPECT_EQ(plan_order({1, 9, 9, 0}, PrintStrategy::AreaDescBlackLast).order,
              (std::array{Channel::M, Channel::Y, Channel::C, Channel::K}));
}

TEST(PlanOrder, AlwaysPermutationWithBlackLast) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<std::size_t> count(0, 50);
    for (int i = 0; i < 2000; ++i) {
        const std::array<std::size_t, 4> counts{count(rng), count(rng), count(rng), count(rng)};
        for (const auto strategy : {PrintStrategy::Cmyk, PrintStrategy::AreaDescBlackLast}) {
            const PrintPlan plan = plan_order(counts, strategy);
            EXPECT_EQ(plan.strategy, strategy);
            EXPECT_EQ(plan.order[3], Channel::K);
            EXPECT_EQ(std::set<Channel>(plan.order.begin(), plan.order.end()).size(), 4u);
            if (strategy == PrintStrategy::AreaDescBlackLast) {
                for (int j = 0; j < 2; ++j) {
                    EXPECT_GE(counts[static_cast<std::size_t>(plan.order[j])],
                              counts[static_cast<std::size_t>(plan.order[j + 1])]);
                }
            }
        }
    }
}

TEST(PlanOrder, ParseStrategy) {
    EXPECT_EQ(parse_print_strategy("cmyk"), PrintStrategy::Cmyk);
    EXPECT_EQ(parse_print_strategy("AREA"), PrintStrategy::AreaDescBlackLast);
    EXPECT_THROW(parse_print_strategy("random"), Error);
}

TEST(Font, GlyphsAreDistinct) {
    std::set<std::array<std::uint8_t, kGlyphHeight>> seen;
    for (const char c : font_charset()) {
        EXPECT_TRUE(seen.insert(glyph_rows(c)).second) << "duplicate glyph for '" << c << "'";
        for (const auto row : glyph_rows(c)) EXPECT_LT(row, 32);
    }
    EXPECT_EQ(glyph_rows('e'), glyph_rows('E'));
    EXPECT_EQ(glyph_rows('~'), glyph_rows('?'));
}

TEST(ErrorStencil, Examples) {
    // Dot counts from the font table: E = 18, 0 = 19, 1 = 10.
    const BitStencil e01 = render_error_stencil("E01", 64, 16);
    EXPECT_EQ(e01.open_count(), 47u);
    EXPECT_EQ(e01.open_count(), font_dot_count("E01"));
    EXPECT_EQ(decode_error_stencil(e01), std::optional<std::string>("E01"));

    EXPECT_EQ(render_error_stencil("", 8, 8).open_count(), 0u);
    EXPECT_EQ(render_error_stencil("E01", 64, 16), render_error_stencil("E01", 64, 16));
}

TEST(ErrorStencil, PreconditionsAndCentering) {
    EXPECT_NO_THROW(render_error_stencil("ABC", 18, 8));
    auto too_long = [](std::string_view code, int w, int h) {
        try {
            render_error_stencil(code, w, h);
        } catch (const Error& e) {
            return e.code() == ErrorCode::TextTooLong;
        }
        return false;
    };
    EXPECT_TRUE(too_long("ABC", 17, 8));
    EXPECT_TRUE(too_long("ABC", 18, 7));
    EXPECT_TRUE(too_long("ABCDEFGHIJKLMNOPQ", 4096, 64));

    // "I" is centred: text width 5 in a 15-wide canvas starts at column 5; glyph row 0 is .###.
    const BitStencil i = render_error_stencil("I", 15, 9);
    EXPECT_FALSE(i.at(5, 1));
    EXPECT_TRUE(i.at(6, 1));
    EXPECT_TRUE(i.at(8, 1));
    EXPECT_FALSE(i.at(9, 1));
    EXPECT_FALSE(i.at(6, 0));
}

TEST(ErrorStencil, DecodesBackForRandomCodes) {
    std::mt19937 rng(31);
    const auto charset = font_charset().substr(1);  // no spaces: they are invisible at the ends
    std::uniform_int_distribution<std::size_t> pick(0, charset.size() - 1);
    std::uniform_int_distribution<int> len(1, 16);
    for (int i = 0; i < 200; ++i) {
        std::string code;
        for (int n = len(rng); n > 0; --n) code.push_back(charset[pick(rng)]);
        const BitStencil s = render_error_stencil(code, 6 * static_cast<int>(code.size()) + 7, 13);
        EXPECT_EQ(s.open_count(), font_dot_count(code));
        EXPECT_EQ(decode_error_stencil(s), std::optional<std::string>(code));
    }
}
