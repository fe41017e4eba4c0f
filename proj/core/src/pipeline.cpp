#include "meshpress/pipeline.hpp"

#include <nlohmann/json.hpp>

#include "meshpress/png_io.hpp"
#include "meshpress/render_modes.hpp"
#include "meshpress/separation.hpp"

namespace meshpress {

StencilSet render_stencils(const RasterImage& img, const PipelineConfig& cfg, RenderMode mode) {
    switch (mode) {
    case RenderMode::Silhouette: return silhouette(img, cfg);
    case RenderMode::ContourTrim: return contour_trim(separate(img, cfg));
    case RenderMode::FourColor: break;
    }
    return separate(img, cfg);
}

std::string plan_json(const StencilSet& set, const PrintPlan& plan) {
    nlohmann::json j;
    nlohmann::json order = nlohmann::json::array();
    for (const Channel ch : plan.order) order.push_back(std::string(1, channel_letter(ch)));
    nlohmann::json counts = nlohmann::json::object();
    for (const Channel ch : kAllChannels) counts[std::string(1, channel_letter(ch))] = set.layer(ch).open_count();

    j["order"] = std::move(order);
    j["strategy"] = std::string(to_string(plan.strategy));
    j["open_bits"] = std::move(counts);
    j["config_hash"] = set.config_hash;
    j["mode"] = std::string(to_string(set.mode));
    j["width"] = set.width();
    j["height"] = set.height();
    j["registered"] = set.registered;
    return j.dump(2) + "\n";
}

RenderArtifacts encode_artifacts(StencilSet set, PrintStrategy strategy) {
    PrintPlan plan = plan_order(set, strategy);
    std::array<RasterFrame, 4> frames;
    std::array<std::vector<std::uint8_t>, 4> pngs;
    for (const Channel ch : kAllChannels) {
        const auto i = static_cast<std::size_t>(ch);
        frames[i] = pack_raster(set.layer(ch));
        pngs[i] = encode_stencil_png(set.layer(ch));
    }
    std::string json = plan_json(set, plan);
    return {std::move(set), plan, std::move(frames), std::move(pngs), std::move(json)};
}

RenderArtifacts render_artifacts(const RasterImage& img, const PipelineConfig& cfg, RenderMode mode,
                                 PrintStrategy strategy) {
    return encode_artifacts(render_stencils(img, cfg, mode), strategy);
}

} // namespace meshpress
