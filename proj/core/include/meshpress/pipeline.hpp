#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "meshpress/config.hpp"
#include "meshpress/print_protocol.hpp"
#include "meshpress/raster.hpp"

namespace meshpress {

/// Everything one render produces. The CLI writes these bytes to disk and the
/// job service stores the same bytes, so both surfaces agree exactly.
struct RenderArtifacts {
    StencilSet stencils;
    PrintPlan plan;
    std::array<RasterFrame, 4> frames;
    std::array<std::vector<std::uint8_t>, 4> stencil_pngs;
    std::string plan_json;
};

/// separate or silhouette per mode, contour_trim for ContourTrim, fiducials,
/// packing and plan ordering.
StencilSet render_stencils(const RasterImage& img, const PipelineConfig& cfg, RenderMode mode);

/// Raster frames, stencil PNGs, plan and plan JSON for an already rendered set.
RenderArtifacts encode_artifacts(StencilSet set, PrintStrategy strategy);

RenderArtifacts render_artifacts(const RasterImage& img, const PipelineConfig& cfg, RenderMode mode,
                                 PrintStrategy strategy);

/// Serialized plan: order, strategy, open-bit counts per layer, config hash,
/// mode, dimensions and registration flag. Stable key order.
std::string plan_json(const StencilSet& set, const PrintPlan& plan);

} // namespace meshpress
