#include "meshpress/service/stylizer.hpp"

#include <httplib.h>

#include "meshpress/error.hpp"
#include "meshpress/png_io.hpp"

namespace meshpress::service {

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return ParsedUrl{url, "/"};
    return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

StylizeOutcome call_stylizer(const StylizerContract& contract, std::span<const std::uint8_t> png,
                             const RasterImage& original) {
    StylizeOutcome out;
    const auto url = parse_url(contract.endpoint);
    if (!url) {
        out.failure = "invalid stylizer endpoint '" + contract.endpoint + "'";
        return out;
    }

    httplib::Client client(url->origin);
    const auto sec = contract.timeout_ms / 1000;
    const auto usec = (contract.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    const auto res = client.Post(url->path, reinterpret_cast<const char*>(png.data()), png.size(), "image/png");
    if (!res) {
        out.failure = "stylizer request failed: " + httplib::to_string(res.error());
        return out;
    }
    if (res->status != 200) {
        out.failure = "stylizer returned HTTP " + std::to_string(res->status);
        return out;
    }
    try {
        const auto* body = reinterpret_cast<const std::uint8_t*>(res->body.data());
        RasterImage styled = decode_png({body, res->body.size()});
        if (styled.width() != original.width() || styled.height() != original.height()) {
            out.failure = "stylizer changed dimensions to " + std::to_string(styled.width()) + "x" +
                          std::to_string(styled.height());
            return out;
        }
        out.image = std::move(styled);
    } catch (const Error& e) {
        out.failure = std::string("stylizer reply is not a usable PNG: ") + e.what();
    }
    return out;
}

RasterImage posterize(const RasterImage& img) {
    RasterImage out(img.width(), img.height());
    auto level = [](std::uint8_t v) { return static_cast<std::uint8_t>((v / 64) * 85); };
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb8 p = img.at(x, y);
            out.set(x, y, {level(p.r), level(p.g), level(p.b)});
        }
    }
    return out;
}

std::vector<std::uint8_t> stub_stylizer(std::span<const std::uint8_t> png) {
    return encode_png(posterize(decode_png(png)));
}

} // namespace meshpress::service
