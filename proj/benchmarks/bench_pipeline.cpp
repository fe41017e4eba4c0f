#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "meshpress/pipeline.hpp"
#include "meshpress/print_protocol.hpp"
#include "meshpress/render_modes.hpp"
#include "meshpress/separation.hpp"

using namespace meshpress;

namespace {

RasterImage noise(int w, int h) {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> v(0, 255);
    RasterImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set(x, y, {static_cast<std::uint8_t>(v(rng)), static_cast<std::uint8_t>(v(rng)),
                           static_cast<std::uint8_t>(v(rng))});
        }
    }
    return img;
}

BitStencil ring(int n) {
    BitStencil s(n, n);
    const double c = n / 2.0;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double d = std::hypot(x - c, y - c);
            s.set(x, y, d > n * 0.3 && d < n * 0.33);
        }
    }
    return s;
}

void BM_Separate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const RasterImage img = noise(n, n);
    const PipelineConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(separate(img, cfg));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Separate)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_RenderArtifacts(benchmark::State& state) {
    const RasterImage img = noise(512, 512);
    const PipelineConfig cfg;
    const auto mode = static_cast<RenderMode>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(render_artifacts(img, cfg, mode, PrintStrategy::AreaDescBlackLast));
    state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_RenderArtifacts)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_PackRaster(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BitStencil s = ring(n);
    for (auto _ : state) benchmark::DoNotOptimize(pack_raster(s));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(raster_frame_size(n, n)));
}
BENCHMARK(BM_PackRaster)->Arg(512)->Arg(2048);

void BM_OutsideMask(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BitStencil s = ring(n);
    for (auto _ : state) benchmark::DoNotOptimize(outside_mask(s));
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_OutsideMask)->Arg(512)->Arg(2048);

} // namespace

BENCHMARK_MAIN();
