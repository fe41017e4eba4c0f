#include "meshpress/service/job.hpp"

#include <array>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace meshpress::service {

using nlohmann::json;

std::string_view to_string(JobState s) noexcept {
    switch (s) {
    case JobState::Received: return "Received";
    case JobState::Stylizing: return "Stylizing";
    case JobState::Separating: return "Separating";
    case JobState::Ready: return "Ready";
    case JobState::Printing: return "Printing";
    case JobState::Done: return "Done";
    case JobState::Failed: return "Failed";
    }
    return "Failed";
}

std::optional<JobState> parse_job_state(std::string_view text) noexcept {
    for (const auto s : {JobState::Received, JobState::Stylizing, JobState::Separating, JobState::Ready,
                         JobState::Printing, JobState::Done, JobState::Failed}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

bool can_transition(JobState from, JobState to) noexcept {
    using S = JobState;
    if (to == S::Failed) return from != S::Done && from != S::Failed;
    switch (from) {
    case S::Received: return to == S::Stylizing || to == S::Separating;
    case S::Stylizing: return to == S::Separating;
    case S::Separating: return to == S::Ready;
    case S::Ready: return to == S::Printing;
    case S::Printing: return to == S::Done || to == S::Ready;
    case S::Done:
    case S::Failed: return false;
    }
    return false;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count() % 1000;
    const std::time_t secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    std::array<char, 32> buf{};
    const auto n = std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%S", &tm);
    std::array<char, 8> frac{};
    std::snprintf(frac.data(), frac.size(), ".%03dZ", static_cast<int>(ms));
    return std::string(buf.data(), n) + frac.data();
}

namespace {

json channel_json(Channel ch) { return std::string(1, channel_letter(ch)); }

std::string job_url(const std::string& id, std::string_view rest) { return "/v1/jobs/" + id + "/" + std::string(rest); }

} // namespace

json to_json(const PrintExecution& exec) {
    json frames = json::array();
    for (const auto& f : exec.frames) {
        frames.push_back({{"layer", channel_json(f.layer)}, {"bytes", f.bytes}, {"duration_ms", f.duration_ms}});
    }
    return {{"frames", frames}, {"completed", exec.completed}, {"started_at", exec.started_at}};
}

json to_json(const PrintJob& job) {
    json j;
    j["id"] = job.id;
    j["state"] = std::string(to_string(job.state));
    j["mode"] = std::string(to_string(job.mode));
    j["strategy"] = std::string(to_string(job.strategy));
    j["stylize"] = job.stylize;
    j["stylizer_fallback"] = job.stylizer_fallback;
    j["created_at"] = job.created_at;
    j["updated_at"] = job.updated_at;
    j["width"] = job.width;
    j["height"] = job.height;
    j["config_hash"] = job.config_hash;

    if (job.plan) {
        json order = json::array();
        for (const Channel ch : job.plan->order) order.push_back(channel_json(ch));
        j["plan"] = {{"order", order}, {"strategy", std::string(to_string(job.plan->strategy))}};
    } else {
        j["plan"] = nullptr;
    }

    json artifacts;
    artifacts["input"] = job_url(job.id, "input.png");
    artifacts["stylized"] = job.has_stylized ? json(job_url(job.id, "stylized.png")) : json(nullptr);
    if (job.artifacts_ready()) {
        json stencils, frames;
        for (const Channel ch : kAllChannels) {
            const std::string key(1, channel_file_letter(ch));
            stencils[key] = job_url(job.id, "stencils/" + key + ".png");
            frames[key] = job_url(job.id, "frames/" + key + ".escpos");
        }
        artifacts["stencils"] = stencils;
        artifacts["frames"] = frames;
        artifacts["plan"] = job_url(job.id, "plan.json");
    } else {
        artifacts["stencils"] = nullptr;
        artifacts["frames"] = nullptr;
        artifacts["plan"] = nullptr;
    }
    artifacts["error_frame"] = job.has_error_frame ? json(job_url(job.id, "frames/error.escpos")) : json(nullptr);
    artifacts["error_stencil"] = job.has_error_frame ? json(job_url(job.id, "stencils/error.png")) : json(nullptr);
    j["artifacts"] = artifacts;

    j["error"] = job.error ? json{{"code", job.error->code}, {"message", job.error->message}} : json(nullptr);
    j["last_print"] = job.last_print ? to_json(*job.last_print) : json(nullptr);

    json history = json::array();
    for (const auto& h : job.history) history.push_back({{"state", std::string(to_string(h.state))}, {"at", h.at}});
    j["history"] = history;
    return j;
}

PrintJob job_from_json(const json& j) {
    auto state_of = [](const json& v) {
        const auto s = parse_job_state(v.get<std::string>());
        if (!s) throw std::runtime_error("unknown job state");
        return *s;
    };

    PrintJob job;
    job.id = j.at("id").get<std::string>();
    job.state = state_of(j.at("state"));
    job.mode = parse_render_mode(j.at("mode").get<std::string>());
    job.strategy = parse_print_strategy(j.at("strategy").get<std::string>());
    job.stylize = j.at("stylize").get<bool>();
    job.stylizer_fallback = j.at("stylizer_fallback").get<bool>();
    job.created_at = j.at("created_at").get<std::string>();
    job.updated_at = j.at("updated_at").get<std::string>();
    job.width = j.at("width").get<int>();
    job.height = j.at("height").get<int>();
    job.config_hash = j.at("config_hash").get<std::string>();
    if (!j.at("plan").is_null()) {
        PrintPlan plan;
        plan.strategy = parse_print_strategy(j["plan"].at("strategy").get<std::string>());
        const auto& order = j["plan"].at("order");
        for (std::size_t i = 0; i < plan.order.size(); ++i) plan.order[i] = parse_channel(order.at(i).get<std::string>());
        job.plan = plan;
    }
    const auto& artifacts = j.at("artifacts");
    job.has_stylized = !artifacts.at("stylized").is_null();
    job.has_error_frame = !artifacts.at("error_frame").is_null();
    if (!j.at("error").is_null()) {
        job.error = JobError{j["error"].at("code").get<std::string>(), j["error"].at("message").get<std::string>()};
    }
    if (!j.at("last_print").is_null()) {
        PrintExecution exec;
        exec.completed = j["last_print"].at("completed").get<bool>();
        exec.started_at = j["last_print"].value("started_at", "");
        for (const auto& f : j["last_print"].at("frames")) {
            exec.frames.push_back({parse_channel(f.at("layer").get<std::string>()), f.at("bytes").get<std::size_t>(),
                                   f.at("duration_ms").get<double>()});
        }
        job.last_print = exec;
    }
    for (const auto& h : j.at("history")) job.history.push_back({state_of(h.at("state")), h.at("at").get<std::string>()});
    return job;
}

} // namespace meshpress::service
