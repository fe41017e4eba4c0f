#include "meshpress/service/http_api.hpp"

#include <httplib.h>

#include "meshpress/error.hpp"

namespace meshpress::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const json& details = nullptr) {
    json body{{"error", {{"code", code}, {"message", message}}}};
    if (!details.is_null()) body["details"] = details;
    send_json(res, status, body);
}

void send_bytes(httplib::Response& res, const std::vector<std::uint8_t>& bytes, const char* type) {
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), type);
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool parse_bool(const std::string& text) { return text == "1" || text == "true" || text == "yes"; }

/// Reads job options from a JSON object; throws ServiceError 400/422.
JobOptions parse_options(const json& j, std::string* source_job) {
    if (!j.is_object()) throw ServiceError(400, "BadRequest", "options must be a JSON object");
    JobOptions opts;
    try {
        if (j.contains("mode")) opts.mode = parse_render_mode(j["mode"].get<std::string>());
        if (j.contains("strategy")) opts.strategy = parse_print_strategy(j["strategy"].get<std::string>());
    } catch (const Error& e) {
        throw ServiceError(422, "BadConfig", e.what());
    } catch (const json::exception& e) {
        throw ServiceError(400, "BadRequest", e.what());
    }
    if (j.contains("stylize")) {
        if (!j["stylize"].is_boolean()) throw ServiceError(400, "BadRequest", "stylize must be a boolean");
        opts.stylize = j["stylize"].get<bool>();
    }
    if (j.contains("config")) {
        if (!j["config"].is_object()) throw ServiceError(400, "BadRequest", "config must be an object");
        for (const auto& [key, value] : j["config"].items()) opts.config_overrides[key] = value_text(value);
    }
    if (source_job && j.contains("source_job") && j["source_job"].is_string()) {
        *source_job = j["source_job"].get<std::string>();
    }
    return opts;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.status(), e.code(), e.what(), e.details());
        } catch (const std::exception& e) {
            send_error(res, 500, "Internal", e.what());
        }
    };
}

int start_server(httplib::Server& server, std::thread& thread, const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
        if (bound < 0) throw std::runtime_error("cannot bind " + host);
    } else if (!server.bind_to_port(host, port)) {
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    }
    thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return bound;
}

void stop_server(httplib::Server& server, std::thread& thread) {
    server.stop();
    if (thread.joinable()) thread.join();
}

} // namespace

HttpApi::HttpApi(JobService& jobs, std::string static_dir) : jobs_(jobs), server_(std::make_unique<httplib::Server>()) {
    server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_->set_payload_max_length(256u * 1024u * 1024u);
    if (!static_dir.empty() && !server_->set_mount_point("/", static_dir)) {
        throw std::runtime_error("static directory '" + static_dir + "' does not exist");
    }
    routes();
}

HttpApi::~HttpApi() { stop(); }

int HttpApi::start(const std::string& host, int port) { return start_server(*server_, thread_, host, port); }

void HttpApi::serve(const std::string& host, int port) {
    if (!server_->listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpApi::stop() { stop_server(*server_, thread_); }

void HttpApi::routes() {
    auto& s = *server_;
    const std::string id_re = "/v1/jobs/([0-9a-f]+)";

    s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    s.Get("/v1/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

    s.Post("/v1/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
        JobOptions opts;
        std::string source_job;
        std::string image;
        bool have_image = false;

        if (req.is_multipart_form_data()) {
            if (req.has_file("options")) {
                json j;
                try {
                    j = json::parse(req.get_file_value("options").content);
                } catch (const json::exception& e) {
                    throw ServiceError(400, "BadRequest", std::string("options is not JSON: ") + e.what());
                }
                opts = parse_options(j, &source_job);
            }
            if (req.has_file("image")) {
                image = req.get_file_value("image").content;
                have_image = true;
            }
        } else {
            if (req.has_param("mode") || req.has_param("strategy") || req.has_param("stylize")) {
                json j = json::object();
                if (req.has_param("mode")) j["mode"] = req.get_param_value("mode");
                if (req.has_param("strategy")) j["strategy"] = req.get_param_value("strategy");
                if (req.has_param("stylize")) j["stylize"] = parse_bool(req.get_param_value("stylize"));
                opts = parse_options(j, nullptr);
            }
            if (req.has_param("source_job")) source_job = req.get_param_value("source_job");
            if (!req.body.empty()) {
                image = req.body;
                have_image = true;
            }
        }

        PrintJob job;
        if (have_image) {
            job = jobs_.submit({reinterpret_cast<const std::uint8_t*>(image.data()), image.size()}, opts);
        } else if (!source_job.empty()) {
            job = jobs_.resubmit(source_job, opts);
        } else {
            throw ServiceError(400, "BadImage", "request carries no image");
        }
        send_json(res, 202, to_json(job));
    }));

    s.Get("/v1/jobs", guarded([this](const httplib::Request&, httplib::Response& res) {
        json list = json::array();
        for (const auto& job : jobs_.list()) {
            list.push_back({{"id", job.id},
                            {"state", std::string(to_string(job.state))},
                            {"mode", std::string(to_string(job.mode))},
                            {"created_at", job.created_at}});
        }
        send_json(res, 200, {{"jobs", list}});
    }));

    s.Get(id_re, guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto job = jobs_.get(req.matches[1]);
        if (!job) throw ServiceError(404, "NotFound", "no job '" + std::string(req.matches[1]) + "'");
        send_json(res, 200, to_json(*job));
    }));

    s.Get(id_re + "/input.png", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::Input), "image/png");
    }));
    s.Get(id_re + "/stylized.png", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::Stylized), "image/png");
    }));
    s.Get(id_re + "/plan.json", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::Plan), "application/json");
    }));
    s.Get(id_re + "/stencils/error.png", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::ErrorPng), "image/png");
    }));
    s.Get(id_re + "/frames/error.escpos", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::ErrorFrame), "application/octet-stream");
    }));
    s.Get(id_re + "/stencils/([cmyk])\\.png", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::StencilPng, parse_channel(req.matches[2].str())),
                   "image/png");
    }));
    s.Get(id_re + "/frames/([cmyk])\\.escpos", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_bytes(res, jobs_.artifact(req.matches[1], JobService::Artifact::Frame, parse_channel(req.matches[2].str())),
                   "application/octet-stream");
    }));

    s.Post(id_re + "/print", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const PrintExecution exec = jobs_.print(req.matches[1]);
        send_json(res, 200, to_json(exec));
    }));
    s.Post(id_re + "/print-error", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const PrintExecution exec = jobs_.print_error(req.matches[1]);
        send_json(res, 200, to_json(exec));
    }));
}

StubStylizerServer::StubStylizerServer() : server_(std::make_unique<httplib::Server>()) {
    server_->set_payload_max_length(256u * 1024u * 1024u);
    server_->Post("/stylize", [](const httplib::Request& req, httplib::Response& res) {
        try {
            const auto out = stub_stylizer({reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()});
            res.status = 200;
            res.set_content(std::string(out.begin(), out.end()), "image/png");
        } catch (const Error& e) {
            send_error(res, 400, std::string(to_string(e.code())), e.what());
        }
    });
    server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });
}

StubStylizerServer::~StubStylizerServer() { stop(); }

int StubStylizerServer::start(const std::string& host, int port) { return start_server(*server_, thread_, host, port); }

void StubStylizerServer::serve(const std::string& host, int port) {
    if (!server_->listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void StubStylizerServer::stop() { stop_server(*server_, thread_); }

} // namespace meshpress::service
