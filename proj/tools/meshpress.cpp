// meshpress: offline stencil separation, the job service and the stub stylizer.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "meshpress/config.hpp"
#include "meshpress/error.hpp"
#include "meshpress/pipeline.hpp"
#include "meshpress/png_io.hpp"
#include "meshpress/service/http_api.hpp"
#include "meshpress/service/job_service.hpp"
#include "meshpress/service/service_config.hpp"
#include "meshpress/service/stylizer.hpp"

namespace fs = std::filesystem;
using namespace meshpress;

namespace {

enum ExitCode : int {
    kOk = 0,
    kBadImage = 1,
    kBadConfig = 2,
    kStylizerFailed = 3,
    kIoError = 4,
};

struct SeparateArgs {
    std::string input;
    std::string mode = "fourcolor";
    std::string strategy = "cmyk";
    std::string out_dir;
    std::string config;
    std::string stylizer;
    bool no_stylize = false;
    bool strict_stylize = false;
    int stylizer_timeout_ms = 10000;
    bool emit_frames = false;
};

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

int run_separate(const SeparateArgs& args) {
    std::vector<std::uint8_t> input;
    std::optional<RasterImage> image;
    try {
        std::ifstream in(args.input, std::ios::binary);
        if (!in) throw Error(ErrorCode::BadImage, "cannot open '" + args.input + "'");
        input.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        image = decode_png(input);
    } catch (const Error& e) {
        std::cerr << "meshpress: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kBadImage;
    }

    PipelineConfig cfg;
    RenderMode mode{};
    PrintStrategy strategy{};
    try {
        if (!args.config.empty()) cfg = load_pipeline_config(args.config);
        cfg.validate();
        mode = parse_render_mode(args.mode);
        strategy = parse_print_strategy(args.strategy);
    } catch (const Error& e) {
        std::cerr << "meshpress: BadConfig: " << e.what() << '\n';
        return kBadConfig;
    }

    if (!args.stylizer.empty() && !args.no_stylize) {
        const service::StylizerContract contract{args.stylizer, args.stylizer_timeout_ms};
        auto outcome = service::call_stylizer(contract, input, *image);
        if (outcome.ok()) {
            image = std::move(outcome.image);
        } else if (args.strict_stylize) {
            std::cerr << "meshpress: E-STY: " << outcome.failure << '\n';
            return kStylizerFailed;
        } else {
            std::cerr << "meshpress: warning: " << outcome.failure << "; continuing with the unstylized image\n";
        }
    }

    std::optional<RenderArtifacts> rendered;
    try {
        rendered = render_artifacts(*image, cfg, mode, strategy);
    } catch (const Error& e) {
        std::cerr << "meshpress: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::BadConfig ? kBadConfig : kBadImage;
    }
    const RenderArtifacts& out = *rendered;

    try {
        const fs::path dir(args.out_dir);
        fs::create_directories(dir);
        for (const Channel ch : kAllChannels) {
            const auto i = static_cast<std::size_t>(ch);
            const std::string stem(1, channel_file_letter(ch));
            write_bytes(dir / (stem + ".png"), out.stencil_pngs[i]);
            if (args.emit_frames) write_bytes(dir / (stem + ".escpos"), out.frames[i].bytes);
        }
        write_bytes(dir / "plan.json",
                    {reinterpret_cast<const std::uint8_t*>(out.plan_json.data()), out.plan_json.size()});
    } catch (const std::exception& e) {
        std::cerr << "meshpress: " << e.what() << '\n';
        return kIoError;
    }
    if (!out.stencils.registered) {
        std::cerr << "meshpress: warning: image too small for fiducials; stencils are unregistered\n";
    }
    return kOk;
}

/// Blocks SIGINT/SIGTERM for every thread started afterwards and returns the set to sigwait on.
sigset_t block_stop_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

int run_serve(const std::string& config_path, const std::string& data_dir, const std::string& static_dir) {
    service::ServiceConfig cfg;
    std::pair<std::string, int> bind;
    try {
        cfg = service::load_service_config(config_path);
        if (!data_dir.empty()) cfg.data_dir = data_dir;
        if (!static_dir.empty()) cfg.static_dir = static_dir;
        bind = service::split_bind_addr(cfg.bind_addr);
    } catch (const Error& e) {
        std::cerr << "meshpress: BadConfig: " << e.what() << '\n';
        return kBadConfig;
    }

    const sigset_t signals = block_stop_signals();

    service::JobServiceOptions options;
    options.data_dir = cfg.data_dir;
    options.pipeline = cfg.pipeline;
    options.stylizer = {cfg.stylizer_url, cfg.stylizer_timeout_ms};
    options.stylizer_fallback = cfg.stylizer_fallback;
    options.workers = cfg.workers;
    options.device = service::file_device_factory(cfg.printer_device);

    try {
        service::JobService jobs(std::move(options));
        service::HttpApi api(jobs, cfg.static_dir);
        const int port = api.start(bind.first, bind.second);
        std::cerr << "meshpress: serving on " << bind.first << ':' << port << " (printer " << cfg.printer_device
                  << ", data " << cfg.data_dir << ")\n";
        int sig = 0;
        sigwait(&signals, &sig);
        std::cerr << "meshpress: shutting down\n";
    } catch (const std::exception& e) {
        std::cerr << "meshpress: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}

int run_stylizer(const std::string& bind_addr) {
    std::pair<std::string, int> bind;
    try {
        bind = service::split_bind_addr(bind_addr);
    } catch (const Error& e) {
        std::cerr << "meshpress: BadConfig: " << e.what() << '\n';
        return kBadConfig;
    }
    const sigset_t signals = block_stop_signals();
    try {
        service::StubStylizerServer server;
        const int port = server.start(bind.first, bind.second);
        std::cerr << "meshpress: stub stylizer on " << bind.first << ':' << port << "/stylize\n";
        int sig = 0;
        sigwait(&signals, &sig);
    } catch (const std::exception& e) {
        std::cerr << "meshpress: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meshpress: photo to CMYK silkscreen stencils for thermal mesh printers"};
    app.require_subcommand(1);

    SeparateArgs sep;
    auto* separate = app.add_subcommand("separate", "Render four stencils (and optionally raster frames) from a PNG");
    separate->add_option("input", sep.input, "Input PNG")->required();
    separate->add_option("--mode", sep.mode, "fourcolor | trim | silhouette")->capture_default_str();
    separate->add_option("--strategy", sep.strategy, "Print order: cmyk | area")->capture_default_str();
    separate->add_option("--out", sep.out_dir, "Output directory")->required();
    separate->add_option("--config", sep.config, "Config file ([pipeline] section is used)");
    auto* stylizer_opt = separate->add_option("--stylizer", sep.stylizer, "Stylizer endpoint URL");
    separate->add_flag("--no-stylize", sep.no_stylize, "Skip stylization")->excludes(stylizer_opt);
    separate->add_flag("--strict-stylize", sep.strict_stylize, "Exit 3 instead of passing through on stylizer failure");
    separate->add_option("--stylizer-timeout-ms", sep.stylizer_timeout_ms, "Stylizer timeout")->capture_default_str();
    separate->add_flag("--emit-frames", sep.emit_frames, "Also write ESC/POS .escpos frames");

    std::string serve_config, serve_data, serve_static;
    auto* serve = app.add_subcommand("serve", "Run the HTTP job service");
    serve->add_option("--config", serve_config, "Service config file");
    serve->add_option("--data-dir", serve_data, "Job store directory (overrides config)");
    serve->add_option("--static-dir", serve_static, "Serve an operator console bundle at /");

    std::string stylizer_bind = "127.0.0.1:8081";
    auto* stub = app.add_subcommand("stylizer", "Run the deterministic stub stylizer (POST /stylize)");
    stub->add_option("--bind", stylizer_bind, "host:port")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*separate) return run_separate(sep);
    if (*serve) return run_serve(serve_config, serve_data, serve_static);
    if (*stub) return run_stylizer(stylizer_bind);
    return kOk;
}
