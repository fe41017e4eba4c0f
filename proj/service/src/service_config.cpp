#include "meshpress/service/service_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "meshpress/error.hpp"

namespace meshpress::service {

namespace {

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::BadConfig, "service." + key + " must be an integer");
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw Error(ErrorCode::BadConfig, "service." + key + " must be true or false");
}

} // namespace

ServiceConfig service_config_from_toml(std::string_view text) {
    ServiceConfig cfg;
    cfg.pipeline = pipeline_config_from_toml(text);
    for (const auto& [full, value] : parse_toml_subset(text)) {
        constexpr std::string_view prefix = "service.";
        if (full.rfind(prefix, 0) != 0) continue;
        const std::string key = full.substr(prefix.size());
        if (key == "bind_addr") cfg.bind_addr = value;
        else if (key == "printer_device") cfg.printer_device = value;
        else if (key == "stylizer_url") cfg.stylizer_url = value;
        else if (key == "stylizer_timeout_ms") cfg.stylizer_timeout_ms = to_int(key, value);
        else if (key == "stylizer_fallback") cfg.stylizer_fallback = to_bool(key, value);
        else if (key == "data_dir") cfg.data_dir = value;
        else if (key == "workers") cfg.workers = to_int(key, value);
        else if (key == "static_dir") cfg.static_dir = value;
        else throw Error(ErrorCode::BadConfig, "unknown service key '" + key + "'");
    }
    if (cfg.workers < 1) throw Error(ErrorCode::BadConfig, "service.workers must be >= 1");
    if (cfg.stylizer_timeout_ms < 1) throw Error(ErrorCode::BadConfig, "service.stylizer_timeout_ms must be >= 1");
    return cfg;
}

ServiceConfig load_service_config(const std::string& path) {
    ServiceConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::BadConfig, "cannot read config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = service_config_from_toml(buf.str());
    }
    if (const char* v = std::getenv("PRINTER_DEVICE"); v && *v) cfg.printer_device = v;
    if (const char* v = std::getenv("STYLIZER_URL"); v && *v) cfg.stylizer_url = v;
    if (const char* v = std::getenv("BIND_ADDR"); v && *v) cfg.bind_addr = v;
    return cfg;
}

std::pair<std::string, int> split_bind_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0) throw Error(ErrorCode::BadConfig, "bind address must be host:port");
    const std::string host = addr.substr(0, colon);
    const int port = to_int("bind_addr", addr.substr(colon + 1));
    if (port < 0 || port > 65535) throw Error(ErrorCode::BadConfig, "port out of range in '" + addr + "'");
    return {host, port};
}

} // namespace meshpress::service
