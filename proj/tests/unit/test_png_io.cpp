#include <gtest/gtest.h>

#include <random>

#include "meshpress/error.hpp"
#include "meshpress/png_io.hpp"
#include "test_support.hpp"

using namespace meshpress;
using namespace meshpress::testing;

TEST(PngIo, RgbRoundTrip) {
    std::mt19937 rng(3);
    const RasterImage img = random_image(37, 21, rng);
    EXPECT_EQ(decode_png(encode_png(img)), img);
}

TEST(PngIo, EncodingIsDeterministic) {
    const RasterImage img = brown_portrait(64, 64);
    EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(PngIo, AlphaCompositedOverWhite) {
    // opaque red, transparent blue, half-transparent black
    const std::vector<std::uint8_t> rgba{255, 0, 0, 255, 0, 0, 255, 0, 0, 0, 0, 128};
    const RasterImage img = decode_png(rgba_png(3, 1, rgba));
    EXPECT_EQ(img.at(0, 0), (Rgb8{255, 0, 0}));
    EXPECT_EQ(img.at(1, 0), kWhite);
    // (0*128 + 255*127 + 127) / 255 = 127
    EXPECT_EQ(img.at(2, 0), (Rgb8{127, 127, 127}));
}

TEST(PngIo, ExifOrientationApplied) {
    // 2x1 source: left red, right blue.
    const std::vector<std::uint8_t> rgba{255, 0, 0, 255, 0, 0, 255, 255};
    const RasterImage plain = decode_png(rgba_png(2, 1, rgba, 1));
    EXPECT_EQ(plain.width(), 2);
    EXPECT_EQ(plain.at(0, 0), (Rgb8{255, 0, 0}));

    const RasterImage mirrored = decode_png(rgba_png(2, 1, rgba, 2));
    EXPECT_EQ(mirrored.at(0, 0), (Rgb8{0, 0, 255}));

    // 90 degrees clockwise: top-left of the source lands top-right.
    const RasterImage cw = decode_png(rgba_png(2, 1, rgba, 6));
    ASSERT_EQ(cw.width(), 1);
    ASSERT_EQ(cw.height(), 2);
    EXPECT_EQ(cw.at(0, 0), (Rgb8{255, 0, 0}));
    EXPECT_EQ(cw.at(0, 1), (Rgb8{0, 0, 255}));

    // 90 degrees counter-clockwise: top-left of the source lands bottom-left.
    const RasterImage ccw = decode_png(rgba_png(2, 1, rgba, 8));
    ASSERT_EQ(ccw.height(), 2);
    EXPECT_EQ(ccw.at(0, 0), (Rgb8{0, 0, 255}));
    EXPECT_EQ(ccw.at(0, 1), (Rgb8{255, 0, 0}));
}

TEST(PngIo, OversizedRejectedFromHeader) {
    const auto png = blank_png(5000, 5000);
    try {
        decode_png(png);
        FAIL() << "expected ImageTooLarge";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ImageTooLarge);
    }
    EXPECT_NO_THROW(decode_png(blank_png(kMaxDimension, 1)));
}

TEST(PngIo, GarbageRejected) {
    const std::vector<std::uint8_t> junk{'n', 'o', 't', ' ', 'a', ' ', 'p', 'n', 'g'};
    EXPECT_THROW(decode_png(junk), Error);
    auto truncated = encode_png(solid(8, 8, kWhite));
    truncated.resize(truncated.size() / 2);
    try {
        decode_png(truncated);
        FAIL() << "expected BadImage";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadImage);
    }
}

TEST(PngIo, StencilExportBlackIsOpen) {
    std::mt19937 rng(11);
    const BitStencil s = random_stencil(29, 13, rng);
    const auto png = encode_stencil_png(s);
    EXPECT_EQ(decode_stencil_png(png), s);

    BitStencil one(3, 1);
    one.set(1, 0, true);
    const RasterImage img = decode_png(encode_stencil_png(one));
    EXPECT_EQ(img.at(0, 0), kWhite);
    EXPECT_EQ(img.at(1, 0), (Rgb8{0, 0, 0}));
}
