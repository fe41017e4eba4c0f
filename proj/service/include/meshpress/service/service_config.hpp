#pragma once

#include <string>

#include "meshpress/config.hpp"

namespace meshpress::service {

struct ServiceConfig {
    std::string bind_addr = "127.0.0.1:8080";
    /// Device path or `capture:<file>`.
    std::string printer_device = "capture:meshpress-capture.bin";
    /// Empty disables stylization; jobs asking for it fall back to passthrough.
    std::string stylizer_url;
    int stylizer_timeout_ms = 10000;
    /// When false a stylizer failure fails the job with E-STY instead of passing through.
    bool stylizer_fallback = true;
    std::string data_dir = "meshpress-data";
    int workers = 1;
    /// Optional directory served at / (operator console bundle).
    std::string static_dir;
    PipelineConfig pipeline;
};

/// `[service]` and `[pipeline]` sections of a TOML-subset document.
ServiceConfig service_config_from_toml(std::string_view text);

/// Reads `path` (empty for defaults only), then applies PRINTER_DEVICE,
/// STYLIZER_URL and BIND_ADDR from the environment.
ServiceConfig load_service_config(const std::string& path);

/// Splits "host:port". Throws Error(BadConfig).
std::pair<std::string, int> split_bind_addr(const std::string& addr);

} // namespace meshpress::service
