#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "meshpress/print_protocol.hpp"
#include "meshpress/raster.hpp"

namespace meshpress::service {

enum class JobState { Received, Stylizing, Separating, Ready, Printing, Done, Failed };

std::string_view to_string(JobState s) noexcept;
std::optional<JobState> parse_job_state(std::string_view text) noexcept;

/// Edges of the job state machine. Printing -> Ready is the retryable
/// device-failure path; Failed is reachable from every state before Done.
bool can_transition(JobState from, JobState to) noexcept;

// Pipeline error codes, also printed on the error stencil.
inline constexpr std::string_view kErrStylize = "E-STY";
inline constexpr std::string_view kErrSeparate = "E-SEP";
inline constexpr std::string_view kErrEncode = "E-ENC";
inline constexpr std::string_view kErrDevice = "E-DEV";

struct JobError {
    std::string code;
    std::string message;
};

struct FrameRecord {
    Channel layer = Channel::C;
    std::size_t bytes = 0;
    double duration_ms = 0.0;
};

/// What one print attempt wrote, in order.
struct PrintExecution {
    std::vector<FrameRecord> frames;
    bool completed = false;
    std::string started_at;
};

struct StateChange {
    JobState state = JobState::Received;
    std::string at;
};

struct PrintJob {
    std::string id;
    JobState state = JobState::Received;
    RenderMode mode = RenderMode::FourColor;
    PrintStrategy strategy = PrintStrategy::Cmyk;
    bool stylize = false;
    bool stylizer_fallback = false;
    std::string created_at;
    std::string updated_at;
    int width = 0;
    int height = 0;
    std::string config_hash;
    std::optional<PrintPlan> plan;
    bool has_stylized = false;
    bool has_error_frame = false;
    std::optional<JobError> error;
    std::optional<PrintExecution> last_print;
    std::vector<StateChange> history;

    bool artifacts_ready() const noexcept {
        return state == JobState::Ready || state == JobState::Printing || state == JobState::Done;
    }
};

/// UTC, millisecond precision, e.g. 2026-01-02T03:04:05.678Z.
std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

nlohmann::json to_json(const PrintJob& job);
/// Inverse of to_json for the persisted fields. Throws nlohmann::json exceptions on malformed input.
PrintJob job_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PrintExecution& exec);

} // namespace meshpress::service
