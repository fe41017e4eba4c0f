#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "meshpress/config.hpp"
#include "meshpress/service/job.hpp"
#include "meshpress/service/printer.hpp"
#include "meshpress/service/stylizer.hpp"

namespace meshpress::service {

/// Failure surfaced to API callers: HTTP status plus a stable code.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message, nlohmann::json details = nullptr)
        : std::runtime_error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}

    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }
    /// Extra payload, e.g. the partial print record of an E-DEV failure.
    const nlohmann::json& details() const noexcept { return details_; }

private:
    int status_;
    std::string code_;
    nlohmann::json details_;
};

struct JobOptions {
    RenderMode mode = RenderMode::FourColor;
    PrintStrategy strategy = PrintStrategy::Cmyk;
    bool stylize = false;
    std::map<std::string, std::string> config_overrides;
};

enum class PipelineStage { Stylize, Separate, Encode };

struct JobServiceOptions {
    std::filesystem::path data_dir = "meshpress-data";
    PipelineConfig pipeline;
    StylizerContract stylizer;
    bool stylizer_fallback = true;
    int workers = 1;
    DeviceFactory device;
    /// Called at the start of each stage. An exception thrown here is treated
    /// exactly like a failure of that stage (fault injection).
    std::function<void(PipelineStage, const PrintJob&)> fault_hook;
    /// Called after every state change, under no lock.
    std::function<void(const PrintJob&, JobState from, JobState to)> on_transition;
};

/// Job store, pipeline workers and the printer session behind the HTTP API.
///
/// Jobs live under `<data_dir>/jobs/<id>/`; the id is a digest of the input
/// bytes, effective config, mode, strategy and stylize flag, so identical
/// submissions share one job. A failed job is re-run when resubmitted.
class JobService {
public:
    explicit JobService(JobServiceOptions options);
    ~JobService();
    JobService(const JobService&) = delete;
    JobService& operator=(const JobService&) = delete;

    /// Throws ServiceError 400 BadImage / 422 BadConfig.
    PrintJob submit(std::span<const std::uint8_t> png, const JobOptions& options);
    /// Resubmits the stored input of `source_id` with new options. 404 if unknown.
    PrintJob resubmit(const std::string& source_id, const JobOptions& options);

    std::optional<PrintJob> get(const std::string& id) const;
    std::vector<PrintJob> list() const;

    /// Blocks until the job satisfies `done` or the timeout expires; returns the last snapshot.
    std::optional<PrintJob> wait(const std::string& id, const std::function<bool(const PrintJob&)>& done,
                                 std::chrono::milliseconds timeout) const;
    /// Waits for Ready, Done or Failed.
    std::optional<PrintJob> wait_settled(const std::string& id,
                                         std::chrono::milliseconds timeout = std::chrono::seconds(60)) const;

    enum class Artifact { Input, Stylized, StencilPng, Frame, Plan, ErrorFrame, ErrorPng };
    /// Throws ServiceError 404 (unknown job/artifact) or 409 NotReady.
    std::vector<std::uint8_t> artifact(const std::string& id, Artifact kind, Channel ch = Channel::C) const;

    /// Sends the four frames in plan order. 404 unknown, 409 NotReady,
    /// 503 E-DEV on device failure (job returns to Ready).
    PrintExecution print(const std::string& id);
    /// Sends the error-code frame of a Failed job. 409 if the job has none.
    PrintExecution print_error(const std::string& id);

    const std::filesystem::path& data_dir() const noexcept { return options_.data_dir; }

private:
    std::filesystem::path job_dir(const std::string& id) const;
    PrintJob enqueue(std::span<const std::uint8_t> png, const RasterImage& image, const JobOptions& options);
    void transition(PrintJob& job, JobState to);
    void persist(const PrintJob& job) const;
    void publish(const PrintJob& job, JobState from);
    void fail(PrintJob& job, std::string_view code, const std::string& message);
    void run_pipeline(const std::string& id);
    void worker_loop(std::stop_token stop);
    void load_existing();

    JobServiceOptions options_;
    PrinterSession printer_;

    std::mutex print_mutex_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::string, PrintJob> jobs_;
    std::deque<std::string> queue_;
    std::condition_variable_any queue_cv_;
    std::vector<std::jthread> workers_;
};

/// Effective config for a job: base plus overrides, validated.
PipelineConfig apply_overrides(const PipelineConfig& base, const std::map<std::string, std::string>& overrides);

} // namespace meshpress::service
