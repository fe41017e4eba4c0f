#pragma once

#include "meshpress/config.hpp"
#include "meshpress/raster.hpp"

namespace meshpress {

/// Set bits mark "outside": reachable from the frame border through pixels
/// whose K bit is closed (4-connectivity).
struct RegionMask {
    BitStencil bits;

    bool outside(int x, int y) const noexcept { return bits.at(x, y); }
};

RegionMask outside_mask(const BitStencil& k_layer);

/// Clears C/M/Y wherever outside_mask(K) is set. Throws Error(WrongMode)
/// unless the input is FourColor.
StencilSet contour_trim(const StencilSet& set);

/// All four layers carry the same object mask (every non-None pixel).
StencilSet silhouette(const RasterImage& img, const PipelineConfig& cfg);

} // namespace meshpress
