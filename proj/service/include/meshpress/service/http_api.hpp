#pragma once

#include <memory>
#include <string>
#include <thread>

#include "meshpress/service/job_service.hpp"

namespace httplib {
class Server;
}

namespace meshpress::service {

/// HTTP/JSON front end for JobService.
///
///   POST /v1/jobs                          multipart (image + options JSON) or raw image/png
///   GET  /v1/jobs                          summaries
///   GET  /v1/jobs/{id}
///   GET  /v1/jobs/{id}/stencils/{c|m|y|k|error}.png
///   GET  /v1/jobs/{id}/frames/{c|m|y|k|error}.escpos
///   GET  /v1/jobs/{id}/input.png, stylized.png, plan.json
///   POST /v1/jobs/{id}/print
///   POST /v1/jobs/{id}/print-error
///   GET  /v1/healthz
class HttpApi {
public:
    explicit HttpApi(JobService& jobs, std::string static_dir = {});
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws std::runtime_error if binding fails.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    void serve(const std::string& host, int port);
    void stop();

private:
    void routes();

    JobService& jobs_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

/// The stub stylizer endpoint (POST /stylize) on its own server.
class StubStylizerServer {
public:
    StubStylizerServer();
    ~StubStylizerServer();
    StubStylizerServer(const StubStylizerServer&) = delete;
    StubStylizerServer& operator=(const StubStylizerServer&) = delete;

    int start(const std::string& host, int port);
    void serve(const std::string& host, int port);
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

} // namespace meshpress::service
