#include "meshpress/render_modes.hpp"

#include <vector>

#include "meshpress/error.hpp"
#include "meshpress/print_protocol.hpp"
#include "meshpress/separation.hpp"

namespace meshpress {

RegionMask outside_mask(const BitStencil& k_layer) {
    const int w = k_layer.width();
    const int h = k_layer.height();
    RegionMask mask{BitStencil(w, h)};
    std::vector<std::pair<int, int>> stack;

    auto seed = [&](int x, int y) {
        if (!k_layer.at(x, y) && !mask.bits.at(x, y)) {
            mask.bits.set(x, y, true);
            stack.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }

    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        if (x > 0) seed(x - 1, y);
        if (x + 1 < w) seed(x + 1, y);
        if (y > 0) seed(x, y - 1);
        if (y + 1 < h) seed(x, y + 1);
    }
    return mask;
}

StencilSet contour_trim(const StencilSet& set) {
    if (set.mode != RenderMode::FourColor) {
        throw Error(ErrorCode::WrongMode, "contour trim needs a fourcolor stencil set, got " +
                                              std::string(to_string(set.mode)));
    }
    StencilSet out = set;
    const RegionMask outside = outside_mask(set.layer(Channel::K));
    for (const Channel ch : {Channel::C, Channel::M, Channel::Y}) {
        BitStencil& layer = out.layer(ch);
        for (int y = 0; y < layer.height(); ++y) {
            for (int x = 0; x < layer.width(); ++x) {
                if (outside.outside(x, y)) layer.set(x, y, false);
            }
        }
    }
    restamp_fiducials(out);
    out.mode = RenderMode::ContourTrim;
    return out;
}

StencilSet silhouette(const RasterImage& img, const PipelineConfig& cfg) {
    cfg.validate();
    const ClassifiedImage cls = classify(color_correct(img, cfg), cfg);
    BitStencil object(cls.width, cls.height);
    for (int y = 0; y < cls.height; ++y) {
        for (int x = 0; x < cls.width; ++x) {
            if (cls.at(x, y).tag() != PixelTag::None) object.set(x, y, true);
        }
    }
    StencilSet set({object, object, object, object}, RenderMode::Silhouette, cfg.hash());
    return add_fiducials_or_flag(std::move(set), cfg);
}

} // namespace meshpress
