#include "meshpress/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <system_error>

#include "meshpress/error.hpp"
#include "meshpress/raster.hpp"

namespace meshpress {

namespace {

[[noreturn]] void bad_config(const std::string& message) { throw Error(ErrorCode::BadConfig, message); }

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        bad_config("value for '" + std::string(key) + "' is not a number: '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    const double v = parse_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        bad_config("value for '" + std::string(key) + "' must be an integer");
    }
    return static_cast<int>(v);
}

void require_fraction(const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0)) bad_config(std::string(name) + " must lie in [0,1], got " + format_number(v));
}

} // namespace

void PipelineConfig::validate() const {
    if (!(bg_hue_min >= 0.0 && bg_hue_min <= bg_hue_max && bg_hue_max <= 360.0)) {
        bad_config("bg_hue_range must satisfy 0 <= min <= max <= 360");
    }
    require_fraction("bg_sat_max", bg_sat_max);
    require_fraction("bg_val_min", bg_val_min);
    require_fraction("theta_k", theta_k);
    require_fraction("theta_white", theta_white);
    require_fraction("tau_neutral", tau_neutral);
    require_fraction("tau_ink", tau_ink);
    if (!(theta_k > 0.0 && theta_k < theta_white && theta_white <= 1.0)) {
        bad_config("thresholds must satisfy 0 < theta_k < theta_white <= 1");
    }
    if (!(sat_gain >= 1.0) || !std::isfinite(sat_gain)) bad_config("sat_gain must be >= 1");
    if (fiducial_margin < 0 || fiducial_margin > kMaxDimension) bad_config("fiducial_margin out of range");
    if (fiducial_side < 1 || fiducial_side > kMaxDimension) bad_config("fiducial_side out of range");
}

std::string PipelineConfig::canonical_text() const {
    std::ostringstream out;
    out << "# meshpress pipeline config v1\n";
    out << "bg_hue_min = " << format_number(bg_hue_min) << '\n';
    out << "bg_hue_max = " << format_number(bg_hue_max) << '\n';
    out << "bg_sat_max = " << format_number(bg_sat_max) << '\n';
    out << "bg_val_min = " << format_number(bg_val_min) << '\n';
    out << "sat_gain = " << format_number(sat_gain) << '\n';
    out << "theta_k = " << format_number(theta_k) << '\n';
    out << "theta_white = " << format_number(theta_white) << '\n';
    out << "tau_neutral = " << format_number(tau_neutral) << '\n';
    out << "tau_ink = " << format_number(tau_ink) << '\n';
    out << "dither_matrix = \"bayer8\"\n";
    out << "fiducial_margin = " << fiducial_margin << '\n';
    out << "fiducial_side = " << fiducial_side << '\n';
    return out.str();
}

std::string PipelineConfig::hash() const { return sha256_hex(canonical_text()); }

void PipelineConfig::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "bg_hue_min") bg_hue_min = parse_double(key, value);
    else if (key == "bg_hue_max") bg_hue_max = parse_double(key, value);
    else if (key == "bg_hue_range") {
        // "[20, 50]" or "20-50"
        std::string_view v = value;
        if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
        auto sep = v.find(',');
        if (sep == std::string_view::npos) sep = v.find('-', 1);
        if (sep == std::string_view::npos) bad_config("bg_hue_range needs two values");
        bg_hue_min = parse_double(key, v.substr(0, sep));
        bg_hue_max = parse_double(key, v.substr(sep + 1));
    }
    else if (key == "bg_sat_max") bg_sat_max = parse_double(key, value);
    else if (key == "bg_val_min") bg_val_min = parse_double(key, value);
    else if (key == "sat_gain") sat_gain = parse_double(key, value);
    else if (key == "theta_k") theta_k = parse_double(key, value);
    else if (key == "theta_white") theta_white = parse_double(key, value);
    else if (key == "tau_neutral") tau_neutral = parse_double(key, value);
    else if (key == "tau_ink") tau_ink = parse_double(key, value);
    else if (key == "fiducial_margin") fiducial_margin = parse_int(key, value);
    else if (key == "fiducial_side") fiducial_side = parse_int(key, value);
    else if (key == "dither_matrix") {
        if (value != "bayer8") bad_config("only the bayer8 dither matrix is supported");
    }
    else bad_config("unknown config key '" + std::string(key) + "'");
}

std::map<std::string, std::string> parse_toml_subset(std::string_view text) {
    std::map<std::string, std::string> out;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        // Strip a comment that is not inside a string.
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto where = " (line " + std::to_string(line_no) + ")";
        if (line.front() == '[') {
            if (line.back() != ']') bad_config("unterminated section header" + where);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) bad_config("empty section name" + where);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) bad_config("expected key = value" + where);
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) bad_config("expected key = value" + where);

        std::string parsed;
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') bad_config("unterminated string" + where);
            value = value.substr(1, value.size() - 2);
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (value[i] == '\\' && i + 1 < value.size()) {
                    const char next = value[++i];
                    parsed.push_back(next == 'n' ? '\n' : next == 't' ? '\t' : next);
                } else {
                    parsed.push_back(value[i]);
                }
            }
        } else {
            parsed = std::string(value);
        }
        const auto full_key = section.empty() ? std::string(key) : section + "." + std::string(key);
        out[full_key] = std::move(parsed);
    }
    return out;
}

PipelineConfig pipeline_config_from_toml(std::string_view text) {
    PipelineConfig cfg;
    for (const auto& [key, value] : parse_toml_subset(text)) {
        constexpr std::string_view prefix = "pipeline.";
        if (key.rfind(prefix, 0) == 0) cfg.set(std::string_view(key).substr(prefix.size()), value);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad_config("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return pipeline_config_from_toml(buf.str());
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

} // namespace meshpress
