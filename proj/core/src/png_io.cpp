#include "meshpress/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include "meshpress/error.hpp"

namespace meshpress {

namespace {

// libpng reports errors through longjmp, so everything it touches lives in
// this struct owned by the caller and the setjmp frames hold no objects with
// destructors.
struct DecodeState {
    std::span<const std::uint8_t> input;
    std::size_t offset = 0;
    std::string message;
    bool too_large = false;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    std::vector<std::uint8_t> rgba;
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> exif;
};

void on_error(png_structp png, png_const_charp msg) {
    auto* st = static_cast<DecodeState*>(png_get_error_ptr(png));
    if (st && st->message.empty()) st->message = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_bytes(png_structp png, png_bytep out, png_size_t n) {
    auto* st = static_cast<DecodeState*>(png_get_io_ptr(png));
    if (st->input.size() - st->offset < n) png_error(png, "truncated PNG stream");
    std::memcpy(out, st->input.data() + st->offset, n);
    st->offset += n;
}

bool decode_rows(png_structp png, png_infop info, DecodeState& st) {
    if (setjmp(png_jmpbuf(png))) return false;

    png_set_read_fn(png, &st, read_bytes);
    png_read_info(png, info);

    st.width = png_get_image_width(png, info);
    st.height = png_get_image_height(png, info);
    if (st.width > static_cast<png_uint_32>(kMaxDimension) || st.height > static_cast<png_uint_32>(kMaxDimension)) {
        st.too_large = true;
        return false;
    }

    const int color_type = png_get_color_type(png, info);
    png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(st.width) * 4) {
        png_error(png, "unexpected row layout after conversion");
    }
    st.rgba.resize(static_cast<std::size_t>(st.width) * st.height * 4);
    st.rows.resize(st.height);
    for (png_uint_32 y = 0; y < st.height; ++y) st.rows[y] = st.rgba.data() + static_cast<std::size_t>(y) * st.width * 4;
    png_read_image(png, st.rows.data());
    png_read_end(png, info);

    png_uint_32 exif_len = 0;
    png_bytep exif = nullptr;
    if (png_get_eXIf_1(png, info, &exif_len, &exif) != 0 && exif && exif_len > 0) {
        st.exif.assign(exif, exif + exif_len);
    }
    return true;
}

int exif_orientation(std::span<const std::uint8_t> data) {
    if (data.size() >= 6 && std::memcmp(data.data(), "Exif\0\0", 6) == 0) data = data.subspan(6);
    if (data.size() < 8) return 1;
    const bool little = data[0] == 'I' && data[1] == 'I';
    const bool big = data[0] == 'M' && data[1] == 'M';
    if (!little && !big) return 1;
    auto u16 = [&](std::size_t at) -> unsigned {
        return little ? data[at] | (data[at + 1] << 8) : (data[at] << 8) | data[at + 1];
    };
    auto u32 = [&](std::size_t at) -> std::size_t {
        return little ? static_cast<std::size_t>(u16(at)) | (static_cast<std::size_t>(u16(at + 2)) << 16)
                      : (static_cast<std::size_t>(u16(at)) << 16) | u16(at + 2);
    };
    if (u16(2) != 42) return 1;
    const std::size_t ifd = u32(4);
    if (ifd + 2 > data.size()) return 1;
    const unsigned entries = u16(ifd);
    for (unsigned i = 0; i < entries; ++i) {
        const std::size_t e = ifd + 2 + static_cast<std::size_t>(i) * 12;
        if (e + 12 > data.size()) break;
        if (u16(e) == 0x0112 && u16(e + 2) == 3) {
            const unsigned v = u16(e + 8);
            return v >= 1 && v <= 8 ? static_cast<int>(v) : 1;
        }
    }
    return 1;
}

RasterImage apply_orientation(const RasterImage& in, int orientation) {
    if (orientation == 1) return in;
    const int w = in.width();
    const int h = in.height();
    const bool swaps = orientation >= 5;
    RasterImage out(swaps ? h : w, swaps ? w : h);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            int sx = x, sy = y;
            switch (orientation) {
            case 2: sx = w - 1 - x; break;
            case 3: sx = w - 1 - x; sy = h - 1 - y; break;
            case 4: sy = h - 1 - y; break;
            case 5: sx = y; sy = x; break;
            case 6: sx = y; sy = h - 1 - x; break;
            case 7: sx = w - 1 - y; sy = h - 1 - x; break;
            case 8: sx = w - 1 - y; sy = x; break;
            default: break;
            }
            out.set(x, y, in.at(sx, sy));
        }
    }
    return out;
}

struct EncodeState {
    std::vector<std::uint8_t> out;
    std::string message;
};

void write_bytes(png_structp png, png_bytep data, png_size_t n) {
    auto* st = static_cast<EncodeState*>(png_get_io_ptr(png));
    st->out.insert(st->out.end(), data, data + n);
}

void flush_noop(png_structp) {}

void on_encode_error(png_structp png, png_const_charp msg) {
    auto* st = static_cast<EncodeState*>(png_get_error_ptr(png));
    if (st && st->message.empty()) st->message = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

bool encode_rows(png_structp png, png_infop info, EncodeState& st, png_uint_32 w, png_uint_32 h, int bit_depth,
                 int color_type, std::vector<png_bytep>& rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_write_fn(png, &st, write_bytes, flush_noop);
    png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 9);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    return true;
}

std::vector<std::uint8_t> encode_packed(std::vector<std::uint8_t>& data, std::size_t stride, int w, int h,
                                        int bit_depth, int color_type) {
    EncodeState st;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st, on_encode_error, on_warning);
    if (!png) throw Error(ErrorCode::Io, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::Io, "png_create_info_struct failed");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * stride;
    const bool ok = encode_rows(png, info, st, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                                color_type, rows);
    png_destroy_write_struct(&png, &info);
    if (!ok) throw Error(ErrorCode::Io, "PNG encode failed: " + st.message);
    return std::move(st.out);
}

} // namespace

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw Error(ErrorCode::BadImage, "input is not a PNG file");
    }
    DecodeState st;
    st.input = bytes;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, on_error, on_warning);
    if (!png) throw Error(ErrorCode::BadImage, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::BadImage, "png_create_info_struct failed");
    }
    const bool ok = decode_rows(png, info, st);
    png_destroy_read_struct(&png, &info, nullptr);

    if (st.too_large) {
        throw Error(ErrorCode::ImageTooLarge, "PNG is " + std::to_string(st.width) + "x" + std::to_string(st.height) +
                                                  ", limit is " + std::to_string(kMaxDimension));
    }
    if (!ok) throw Error(ErrorCode::BadImage, "cannot decode PNG: " + st.message);

    std::vector<Rgb8> pixels;
    pixels.reserve(static_cast<std::size_t>(st.width) * st.height);
    for (std::size_t i = 0; i < st.rgba.size(); i += 4) {
        const unsigned a = st.rgba[i + 3];
        auto over_white = [a](unsigned c) {
            return static_cast<std::uint8_t>((c * a + 255u * (255u - a) + 127u) / 255u);
        };
        pixels.push_back({over_white(st.rgba[i]), over_white(st.rgba[i + 1]), over_white(st.rgba[i + 2])});
    }
    RasterImage img(static_cast<int>(st.width), static_cast<int>(st.height), std::move(pixels));
    return apply_orientation(img, st.exif.empty() ? 1 : exif_orientation(st.exif));
}

RasterImage read_png_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::BadImage, "cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    std::vector<std::uint8_t> data;
    data.reserve(img.pixels().size() * 3);
    for (const Rgb8 p : img.pixels()) {
        data.push_back(p.r);
        data.push_back(p.g);
        data.push_back(p.b);
    }
    return encode_packed(data, static_cast<std::size_t>(img.width()) * 3, img.width(), img.height(), 8,
                         PNG_COLOR_TYPE_RGB);
}

std::vector<std::uint8_t> encode_stencil_png(const BitStencil& s) {
    const std::size_t stride = (static_cast<std::size_t>(s.width()) + 7) / 8;
    std::vector<std::uint8_t> data(stride * static_cast<std::size_t>(s.height()), 0);
    for (int y = 0; y < s.height(); ++y) {
        for (int x = 0; x < s.width(); ++x) {
            // Gray sample 1 is white (closed), 0 is black (open).
            if (!s.at(x, y)) {
                data[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x / 8)] |=
                    static_cast<std::uint8_t>(0x80 >> (x % 8));
            }
        }
    }
    return encode_packed(data, stride, s.width(), s.height(), 1, PNG_COLOR_TYPE_GRAY);
}

BitStencil decode_stencil_png(std::span<const std::uint8_t> bytes) {
    const RasterImage img = decode_png(bytes);
    BitStencil out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (luma(img.at(x, y)) < 0.5) out.set(x, y, true);
        }
    }
    return out;
}

} // namespace meshpress
