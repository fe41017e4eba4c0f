#include "meshpress/service/job_service.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "meshpress/error.hpp"
#include "meshpress/pipeline.hpp"
#include "meshpress/png_io.hpp"

namespace meshpress::service {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("cannot write " + path.string());
    }
    fs::rename(tmp, path);
}

void write_text(const fs::path& path, std::string_view text) {
    write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string stencil_name(Channel ch) { return std::string(1, channel_file_letter(ch)) + ".png"; }
std::string frame_name(Channel ch) { return std::string(1, channel_file_letter(ch)) + ".escpos"; }

std::string config_document(const PipelineConfig& cfg) { return "[pipeline]\n" + cfg.canonical_text(); }

} // namespace

PipelineConfig apply_overrides(const PipelineConfig& base, const std::map<std::string, std::string>& overrides) {
    PipelineConfig cfg = base;
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    cfg.validate();
    return cfg;
}

JobService::JobService(JobServiceOptions options)
    : options_(std::move(options)),
      printer_(options_.device ? options_.device : file_device_factory("capture:meshpress-capture.bin")) {
    options_.pipeline.validate();
    fs::create_directories(options_.data_dir / "jobs");
    load_existing();
    const int n = std::max(1, options_.workers);
    for (int i = 0; i < n; ++i) {
        workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
    }
}

JobService::~JobService() {
    for (auto& w : workers_) w.request_stop();
    queue_cv_.notify_all();
    workers_.clear();
}

fs::path JobService::job_dir(const std::string& id) const { return options_.data_dir / "jobs" / id; }

void JobService::load_existing() {
    std::vector<PrintJob> interrupted;
    for (const auto& entry : fs::directory_iterator(options_.data_dir / "jobs")) {
        const fs::path file = entry.path() / "job.json";
        if (!fs::exists(file)) continue;
        try {
            const auto bytes = read_file(file);
            PrintJob job = job_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
            if (job.state == JobState::Received) queue_.push_back(job.id);
            if (job.state == JobState::Stylizing || job.state == JobState::Separating ||
                job.state == JobState::Printing) {
                interrupted.push_back(job);
            }
            jobs_[job.id] = std::move(job);
        } catch (const std::exception&) {
            // Unreadable record: leave it on disk, do not serve it.
        }
    }
    for (auto& job : interrupted) {
        if (job.state == JobState::Printing) {
            job.error = JobError{std::string(kErrDevice), "service restarted during printing"};
            transition(job, JobState::Ready);
        } else {
            fail(job, kErrSeparate, "service restarted while the pipeline was running");
        }
    }
}

void JobService::persist(const PrintJob& job) const {
    write_text(job_dir(job.id) / "job.json", to_json(job).dump(2));
}

void JobService::publish(const PrintJob& job, JobState from) {
    {
        std::lock_guard lock(mutex_);
        jobs_[job.id] = job;
        persist(job);
    }
    changed_.notify_all();
    if (options_.on_transition) options_.on_transition(job, from, job.state);
}

void JobService::transition(PrintJob& job, JobState to) {
    const JobState from = job.state;
    if (!can_transition(from, to)) {
        throw std::logic_error("illegal job transition " + std::string(to_string(from)) + " -> " +
                               std::string(to_string(to)));
    }
    job.state = to;
    job.updated_at = utc_timestamp();
    job.history.push_back({to, job.updated_at});
    publish(job, from);
}

void JobService::fail(PrintJob& job, std::string_view code, const std::string& message) {
    job.error = JobError{std::string(code), message};
    try {
        const int w = std::max({job.width, kGlyphAdvance * static_cast<int>(code.size()), 1});
        const int h = std::max(job.height, kGlyphHeight + 1);
        const BitStencil stencil = render_error_stencil(code, w, h);
        write_file(job_dir(job.id) / "error.escpos", pack_raster(stencil).bytes);
        write_file(job_dir(job.id) / "error.png", encode_stencil_png(stencil));
        job.has_error_frame = true;
    } catch (const std::exception&) {
        job.has_error_frame = false;
    }
    transition(job, JobState::Failed);
}

PrintJob JobService::submit(std::span<const std::uint8_t> png, const JobOptions& options) {
    std::optional<RasterImage> image;
    try {
        image = decode_png(png);
    } catch (const Error& e) {
        throw ServiceError(400, "BadImage", e.what());
    }
    return enqueue(png, *image, options);
}

PrintJob JobService::resubmit(const std::string& source_id, const JobOptions& options) {
    if (!get(source_id)) throw ServiceError(404, "NotFound", "no job '" + source_id + "'");
    const auto png = read_file(job_dir(source_id) / "input.png");
    return submit(png, options);
}

PrintJob JobService::enqueue(std::span<const std::uint8_t> png, const RasterImage& image, const JobOptions& options) {
    PipelineConfig cfg;
    try {
        cfg = apply_overrides(options_.pipeline, options.config_overrides);
    } catch (const Error& e) {
        throw ServiceError(422, "BadConfig", e.what());
    }

    std::string key(reinterpret_cast<const char*>(png.data()), png.size());
    key += '\0';
    key += cfg.canonical_text();
    key += to_string(options.mode);
    key += '\0';
    key += to_string(options.strategy);
    key += '\0';
    key += options.stylize ? "stylize" : "plain";
    const std::string id = sha256_hex(key).substr(0, 32);

    PrintJob job;
    {
        std::lock_guard lock(mutex_);
        if (const auto it = jobs_.find(id); it != jobs_.end() && it->second.state != JobState::Failed) {
            return it->second;
        }
        const fs::path dir = job_dir(id);
        fs::remove_all(dir);
        fs::create_directories(dir);
        write_file(dir / "input.png", png);
        write_text(dir / "config.toml", config_document(cfg));

        job.id = id;
        job.mode = options.mode;
        job.strategy = options.strategy;
        job.stylize = options.stylize;
        job.width = image.width();
        job.height = image.height();
        job.config_hash = cfg.hash();
        job.created_at = job.updated_at = utc_timestamp();
        job.history.push_back({JobState::Received, job.created_at});
        jobs_[id] = job;
        persist(job);
        queue_.push_back(id);
    }
    changed_.notify_all();
    queue_cv_.notify_one();
    return job;
}

void JobService::worker_loop(std::stop_token stop) {
    while (!stop.stop_requested()) {
        std::string id;
        {
            std::unique_lock lock(mutex_);
            if (!queue_cv_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
            id = queue_.front();
            queue_.pop_front();
        }
        run_pipeline(id);
    }
}

void JobService::run_pipeline(const std::string& id) {
    PrintJob job;
    {
        std::lock_guard lock(mutex_);
        const auto it = jobs_.find(id);
        if (it == jobs_.end() || it->second.state != JobState::Received) return;
        job = it->second;
    }
    const fs::path dir = job_dir(id);

    std::optional<RasterImage> image;
    PipelineConfig cfg;
    std::vector<std::uint8_t> input;
    try {
        input = read_file(dir / "input.png");
        image = decode_png(input);
        const auto doc = read_file(dir / "config.toml");
        cfg = pipeline_config_from_toml(std::string(doc.begin(), doc.end()));
    } catch (const std::exception& e) {
        fail(job, kErrSeparate, std::string("cannot load job inputs: ") + e.what());
        return;
    }

    if (job.stylize) {
        transition(job, JobState::Stylizing);
        StylizeOutcome styled;
        try {
            if (options_.fault_hook) options_.fault_hook(PipelineStage::Stylize, job);
            if (options_.stylizer.endpoint.empty()) {
                styled.failure = "no stylizer endpoint configured";
            } else {
                styled = call_stylizer(options_.stylizer, input, *image);
            }
        } catch (const std::exception& e) {
            styled.failure = e.what();
        }
        if (styled.ok()) {
            image = std::move(styled.image);
            try {
                write_file(dir / "stylized.png", encode_png(*image));
                job.has_stylized = true;
            } catch (const std::exception&) {
                job.has_stylized = false;
            }
        } else if (options_.stylizer_fallback) {
            job.stylizer_fallback = true;
        } else {
            fail(job, kErrStylize, styled.failure);
            return;
        }
    }

    transition(job, JobState::Separating);
    std::optional<StencilSet> stencils;
    try {
        if (options_.fault_hook) options_.fault_hook(PipelineStage::Separate, job);
        stencils = render_stencils(*image, cfg, job.mode);
    } catch (const std::exception& e) {
        fail(job, kErrSeparate, e.what());
        return;
    }

    try {
        if (options_.fault_hook) options_.fault_hook(PipelineStage::Encode, job);
        RenderArtifacts out = encode_artifacts(std::move(*stencils), job.strategy);
        for (const Channel ch : kAllChannels) {
            const auto i = static_cast<std::size_t>(ch);
            write_file(dir / stencil_name(ch), out.stencil_pngs[i]);
            write_file(dir / frame_name(ch), out.frames[i].bytes);
        }
        write_text(dir / "plan.json", out.plan_json);
        job.plan = out.plan;
        job.config_hash = out.stencils.config_hash;
    } catch (const std::exception& e) {
        fail(job, kErrEncode, e.what());
        return;
    }
    transition(job, JobState::Ready);
}

std::optional<PrintJob> JobService::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) return std::nullopt;
    return it->second;
}

std::vector<PrintJob> JobService::list() const {
    std::vector<PrintJob> out;
    {
        std::lock_guard lock(mutex_);
        for (const auto& [id, job] : jobs_) out.push_back(job);
    }
    std::sort(out.begin(), out.end(), [](const PrintJob& a, const PrintJob& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    return out;
}

std::optional<PrintJob> JobService::wait(const std::string& id, const std::function<bool(const PrintJob&)>& done,
                                         std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    std::optional<PrintJob> last;
    changed_.wait_for(lock, timeout, [&] {
        const auto it = jobs_.find(id);
        if (it == jobs_.end()) return false;
        last = it->second;
        return done(it->second);
    });
    return last;
}

std::optional<PrintJob> JobService::wait_settled(const std::string& id, std::chrono::milliseconds timeout) const {
    return wait(
        id,
        [](const PrintJob& j) {
            return j.state == JobState::Ready || j.state == JobState::Done || j.state == JobState::Failed;
        },
        timeout);
}

std::vector<std::uint8_t> JobService::artifact(const std::string& id, Artifact kind, Channel ch) const {
    const auto job = get(id);
    if (!job) throw ServiceError(404, "NotFound", "no job '" + id + "'");

    fs::path file;
    switch (kind) {
    case Artifact::Input: file = "input.png"; break;
    case Artifact::Stylized:
        if (!job->has_stylized) throw ServiceError(404, "NotFound", "job has no stylized image");
        file = "stylized.png";
        break;
    case Artifact::StencilPng:
    case Artifact::Frame:
    case Artifact::Plan:
        if (!job->artifacts_ready()) {
            throw ServiceError(409, "NotReady", "job is " + std::string(to_string(job->state)));
        }
        file = kind == Artifact::Plan ? fs::path("plan.json")
               : kind == Artifact::Frame ? fs::path(frame_name(ch))
                                         : fs::path(stencil_name(ch));
        break;
    case Artifact::ErrorFrame:
    case Artifact::ErrorPng:
        if (!job->has_error_frame) throw ServiceError(404, "NotFound", "job has no error stencil");
        file = kind == Artifact::ErrorFrame ? "error.escpos" : "error.png";
        break;
    }
    try {
        return read_file(job_dir(id) / file);
    } catch (const std::exception& e) {
        throw ServiceError(404, "NotFound", e.what());
    }
}

PrintExecution JobService::print(const std::string& id) {
    std::lock_guard print_lock(print_mutex_);

    PrintJob job;
    {
        std::lock_guard lock(mutex_);
        const auto it = jobs_.find(id);
        if (it == jobs_.end()) throw ServiceError(404, "NotFound", "no job '" + id + "'");
        if (it->second.state != JobState::Ready || !it->second.plan) {
            throw ServiceError(409, "NotReady", "job is " + std::string(to_string(it->second.state)));
        }
        job = it->second;
    }

    std::array<std::vector<std::uint8_t>, 4> bytes;
    std::vector<LayerFrame> frames;
    for (std::size_t i = 0; i < job.plan->order.size(); ++i) {
        const Channel ch = job.plan->order[i];
        bytes[i] = read_file(job_dir(id) / frame_name(ch));
        frames.push_back({ch, bytes[i]});
    }

    transition(job, JobState::Printing);
    std::string failure;
    PrintExecution exec = printer_.execute(frames, &failure);
    job.last_print = exec;
    if (!exec.completed) {
        job.error = JobError{std::string(kErrDevice), failure};
        transition(job, JobState::Ready);
        throw ServiceError(503, std::string(kErrDevice), failure, to_json(exec));
    }
    job.error.reset();
    transition(job, JobState::Done);
    return exec;
}

PrintExecution JobService::print_error(const std::string& id) {
    std::lock_guard print_lock(print_mutex_);
    auto job = get(id);
    if (!job) throw ServiceError(404, "NotFound", "no job '" + id + "'");
    if (job->state != JobState::Failed || !job->has_error_frame) {
        throw ServiceError(409, "NotFailed", "job has no error stencil to print");
    }
    const auto bytes = read_file(job_dir(id) / "error.escpos");
    const std::array<LayerFrame, 1> frames{LayerFrame{Channel::K, bytes}};
    std::string failure;
    PrintExecution exec = printer_.execute(frames, &failure);
    job->last_print = exec;
    {
        std::lock_guard lock(mutex_);
        jobs_[id] = *job;
        persist(*job);
    }
    changed_.notify_all();
    if (!exec.completed) throw ServiceError(503, std::string(kErrDevice), failure, to_json(exec));
    return exec;
}

} // namespace meshpress::service
