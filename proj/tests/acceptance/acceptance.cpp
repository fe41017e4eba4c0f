// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "meshpress/pipeline.hpp"
#include "meshpress/png_io.hpp"
#include "meshpress/render_modes.hpp"
#include "meshpress/separation.hpp"
#include "meshpress/service/http_api.hpp"
#include "meshpress/service/job_service.hpp"
#include "test_support.hpp"

using namespace meshpress;
using namespace meshpress::testing;
namespace svc = meshpress::service;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using Bytes = std::vector<std::uint8_t>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << s << " s";
    return out.str();
}

svc::JobServiceOptions service_options(const TempDir& dir) {
    svc::JobServiceOptions o;
    o.data_dir = dir / "data";
    o.device = svc::file_device_factory("capture:" + (dir / "capture.bin").string());
    return o;
}

Outcome disjointness() {
    const PipelineConfig cfg;
    std::mt19937 rng(1000);
    std::size_t overlaps = 0;
    const auto t0 = Clock::now();
    for (int i = 0; i < 1000; ++i) {
        const StencilSet s = separate(random_image(64, 64, rng), cfg);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                if (s.is_fiducial(x, y)) continue;
                int open = 0;
                for (const Channel ch : kAllChannels) open += s.layer(ch).at(x, y);
                if (open > 1) ++overlaps;
            }
        }
    }
    const double t = seconds_since(t0);
    return {overlaps == 0 && t < 30.0,
            "1000 images, " + std::to_string(overlaps) + " overlapping pixels, " + fmt_seconds(t)};
}

Outcome dither_exactness() {
    int mismatches = 0;
    for (int k = 0; k <= 64; ++k) {
        const double d = k / 64.0;
        for (const Channel ch : kAllChannels) {
            ClassifiedImage cls;
            cls.width = 8;
            cls.height = 8;
            cls.classes.assign(64, PixelClass(tag_for(ch), d));
            if (static_cast<int>(dither(cls, ch).open_count()) != analytic_open_count(d)) ++mismatches;
        }
    }
    return {mismatches == 0, "65 densities x 4 channels, " + std::to_string(mismatches) + " mismatches"};
}

Outcome flood_fill_oracle() {
    std::mt19937 rng(10000);
    std::uniform_int_distribution<int> side(1, 16);
    std::uniform_real_distribution<double> fill(0.0, 1.0);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        const BitStencil k = random_stencil(side(rng), side(rng), rng, fill(rng));
        if (!(outside_mask(k).bits == brute_force_outside(k))) ++mismatches;
    }
    return {mismatches == 0, "10000 layers, " + std::to_string(mismatches) + " mismatches"};
}

Outcome raster_round_trip() {
    std::mt19937 rng(64);
    int failures = 0;
    for (int w = 1; w <= 64; ++w) {
        for (int h = 1; h <= 16; ++h) {
            const BitStencil s = random_stencil(w, h, rng);
            const RasterFrame f = pack_raster(s);
            if (f.bytes.size() != raster_frame_size(w, h) || !(unpack_raster(f.bytes, w) == s)) ++failures;
        }
    }
    BitStencil ends(8, 1);
    ends.set(0, 0, true);
    ends.set(7, 0, true);
    const bool golden =
        pack_raster(ends).bytes == Bytes{0x1D, 0x76, 0x30, 0x00, 0x01, 0x00, 0x01, 0x00, 0x81} &&
        pack_raster(BitStencil(8, 1)).bytes == Bytes{0x1D, 0x76, 0x30, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00} &&
        pack_raster(BitStencil(10, 2, true)).bytes ==
            Bytes{0x1D, 0x76, 0x30, 0x00, 0x02, 0x00, 0x02, 0x00, 0xFF, 0xC0, 0xFF, 0xC0};
    return {failures == 0 && golden, "1024 shapes, " + std::to_string(failures) + " round-trip failures, goldens " +
                                         (golden ? "exact" : "differ")};
}

Outcome print_order() {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> side(8, 40);
    std::uniform_real_distribution<double> fill(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const int w = side(rng);
        const int h = side(rng);
        StencilSet s({random_stencil(w, h, rng, fill(rng)), random_stencil(w, h, rng, fill(rng)),
                      random_stencil(w, h, rng, fill(rng)), random_stencil(w, h, rng, fill(rng))},
                     RenderMode::FourColor, "");
        const PrintPlan area = plan_order(s, PrintStrategy::AreaDescBlackLast);
        bool ok = area.order[3] == Channel::K;
        for (int j = 0; j < 2 && ok; ++j) {
            ok = s.layer(area.order[j]).open_count() >= s.layer(area.order[j + 1]).open_count() &&
                 area.order[j] != Channel::K;
        }
        ok = ok && area.order[0] != area.order[1] && area.order[1] != area.order[2] && area.order[0] != area.order[2];
        const PrintPlan cmyk = plan_order(s, PrintStrategy::Cmyk);
        ok = ok && cmyk.order == std::array{Channel::C, Channel::M, Channel::Y, Channel::K};
        if (!ok) ++violations;
    }
    return {violations == 0, "1000 sets, " + std::to_string(violations) + " violations"};
}

/// Runs the CLI on every golden case; returns name -> file -> bytes.
std::map<std::string, std::map<std::string, Bytes>> cli_outputs(const TempDir& dir, const std::string& tag,
                                                                  std::string* error) {
    std::map<std::string, std::map<std::string, Bytes>> out;
    for (const auto& c : golden_cases()) {
        const fs::path target = dir / (tag + "_" + c.name);
        const int status = run_process({MESHPRESS_CLI, "separate", (dir / (c.fixture + ".png")).string(), "--mode",
                                        c.mode, "--strategy", c.strategy, "--out", target.string(), "--emit-frames"});
        if (status != 0) {
            *error = "CLI exited " + std::to_string(status) + " on " + c.name;
            return {};
        }
        for (const Channel ch : kAllChannels) {
            const std::string stem(1, channel_file_letter(ch));
            out[c.name][stem + ".png"] = read_bytes(target / (stem + ".png"));
            out[c.name][stem + ".escpos"] = read_bytes(target / (stem + ".escpos"));
        }
    }
    return out;
}

std::map<std::string, std::map<std::string, Bytes>> service_outputs(const TempDir& dir, const std::string& tag,
                                                                      std::string* error) {
    TempDir store;
    svc::JobService jobs(service_options(store));
    std::map<std::string, std::map<std::string, Bytes>> out;
    for (const auto& c : golden_cases()) {
        const auto job = jobs.submit(read_bytes(dir / (c.fixture + ".png")),
                                     {parse_render_mode(c.mode), parse_print_strategy(c.strategy), false, {}});
        const auto done = jobs.wait_settled(job.id);
        if (!done || done->state != svc::JobState::Ready) {
            *error = "service job for " + c.name + " did not reach Ready (" + tag + ")";
            return {};
        }
        for (const Channel ch : kAllChannels) {
            const std::string stem(1, channel_file_letter(ch));
            out[c.name][stem + ".png"] = jobs.artifact(job.id, svc::JobService::Artifact::StencilPng, ch);
            out[c.name][stem + ".escpos"] = jobs.artifact(job.id, svc::JobService::Artifact::Frame, ch);
        }
    }
    return out;
}

Outcome end_to_end_determinism() {
    TempDir dir;
    std::size_t fixtures = 0;
    for (const auto& f : fixture_corpus()) {
        write_bytes(dir / (f.name + ".png"), encode_png(f.image));
        ++fixtures;
    }
    std::string error;
    const auto cli1 = cli_outputs(dir, "a", &error);
    const auto cli2 = error.empty() ? cli_outputs(dir, "b", &error) : decltype(cli1){};
    const auto svc1 = error.empty() ? service_outputs(dir, "a", &error) : decltype(cli1){};
    const auto svc2 = error.empty() ? service_outputs(dir, "b", &error) : decltype(cli1){};
    if (!error.empty()) return {false, error};
    std::size_t files = 0;
    for (const auto& [name, bytes] : cli1) files += bytes.size();
    const bool same = cli1 == cli2 && cli1 == svc1 && svc1 == svc2;
    return {same && fixtures >= 6, std::to_string(fixtures) + " fixtures, " + std::to_string(cli1.size()) +
                                       " cases, " + std::to_string(files) + " files x 4 runs " +
                                       (same ? "identical" : "differ")};
}

Outcome stylizer_fallback() {
    int port = 0;
    {
        svc::StubStylizerServer stub;
        port = stub.start("127.0.0.1", 0);
    }
    const std::string url = "http://127.0.0.1:" + std::to_string(port) + "/stylize";

    TempDir dir;
    auto o = service_options(dir);
    o.stylizer = {url, 2000};
    o.stylizer_fallback = true;
    svc::JobService jobs(std::move(o));
    int fell_back = 0;
    const auto corpus = fixture_corpus();
    for (const auto& f : corpus) {
        const auto job = jobs.submit(encode_png(f.image), {RenderMode::FourColor, PrintStrategy::Cmyk, true, {}});
        const auto done = jobs.wait_settled(job.id);
        if (done && done->state == svc::JobState::Ready && done->stylizer_fallback) ++fell_back;
    }

    write_bytes(dir / "in.png", encode_png(half_cyan(64, 64)));
    const int strict = run_process({MESHPRESS_CLI, "separate", (dir / "in.png").string(), "--stylizer", url,
                                    "--stylizer-timeout-ms", "2000", "--strict-stylize", "--out",
                                    (dir / "out").string()});
    const bool ok = fell_back == static_cast<int>(corpus.size()) && strict == 3;
    return {ok, std::to_string(fell_back) + "/" + std::to_string(corpus.size()) +
                    " jobs Ready with fallback, strict CLI exit " + std::to_string(strict)};
}

Outcome failure_path() {
    TempDir dir;
    auto o = service_options(dir);
    o.fault_hook = [](svc::PipelineStage stage, const svc::PrintJob&) {
        if (stage == svc::PipelineStage::Separate) throw std::runtime_error("injected separation fault");
    };
    svc::JobService jobs(std::move(o));
    const auto job = jobs.submit(encode_png(brown_portrait(128, 128)), {});
    const auto done = jobs.wait_settled(job.id);
    if (!done || done->state != svc::JobState::Failed || !done->error || done->error->code != "E-SEP") {
        return {false, "job did not fail with E-SEP"};
    }
    const BitStencil frame = unpack_raster(jobs.artifact(job.id, svc::JobService::Artifact::ErrorFrame), 128);
    const BitStencil png = decode_stencil_png(jobs.artifact(job.id, svc::JobService::Artifact::ErrorPng));
    const auto decoded = decode_error_stencil(frame);
    const bool ok = decoded == std::optional<std::string>("E-SEP") && png == frame &&
                    frame.open_count() == font_dot_count("E-SEP");
    return {ok, "error stencil decodes to '" + decoded.value_or("?") + "', " + std::to_string(frame.open_count()) +
                    " dots"};
}

Outcome throughput() {
    TempDir dir;
    svc::JobService jobs(service_options(dir));
    const Bytes png = encode_png(brown_portrait(512, 512));
    const auto t0 = Clock::now();
    const auto job = jobs.submit(png, {RenderMode::FourColor, PrintStrategy::Cmyk, false, {}});
    const auto done = jobs.wait_settled(job.id, std::chrono::seconds(30));
    const double t = seconds_since(t0);
    const bool ready = done && done->state == svc::JobState::Ready;
    return {ready && t < 5.0, std::string("512x512 job ") + (ready ? "Ready" : "not Ready") + " in " + fmt_seconds(t)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"disjointness", disjointness},
        {"dither-exactness", dither_exactness},
        {"flood-fill-oracle", flood_fill_oracle},
        {"raster-round-trip", raster_round_trip},
        {"print-order", print_order},
        {"end-to-end-determinism", end_to_end_determinism},
        {"stylizer-fallback", stylizer_fallback},
        {"failure-path", failure_path},
        {"throughput", throughput},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
