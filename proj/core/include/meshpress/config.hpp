#pragma once

#include <map>
#include <string>
#include <string_view>

namespace meshpress {

/// Every tunable of the separation pipeline. Validated by `validate()`; the
/// canonical text form is what `config_hash()` digests.
struct PipelineConfig {
    // Background removal: HSV hue window in degrees (inclusive), saturation
    // ceiling and value floor as fractions.
    double bg_hue_min = 20.0;
    double bg_hue_max = 50.0;
    double bg_sat_max = 0.5;
    double bg_val_min = 0.5;
    double sat_gain = 1.3;

    // Classification thresholds.
    double theta_k = 0.35;
    double theta_white = 0.95;
    double tau_neutral = 0.08;
    double tau_ink = 0.10;

    // Registration marks, in pixels.
    int fiducial_margin = 8;
    int fiducial_side = 6;

    /// Throws Error(BadConfig) naming the first violated constraint.
    void validate() const;

    /// One `key = value` line per field in a fixed order. Numbers use the
    /// shortest round-trip representation.
    std::string canonical_text() const;

    /// Lowercase hex SHA-256 of canonical_text().
    std::string hash() const;

    /// Applies one override. Unknown keys or unparsable values throw Error(BadConfig).
    void set(std::string_view key, std::string_view value);

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Minimal TOML subset: `[section]` headers, `key = value` pairs with numbers,
/// booleans or double-quoted strings, and `#` comments. Keys are returned as
/// `section.key` (or bare `key` before any header), values unquoted.
std::map<std::string, std::string> parse_toml_subset(std::string_view text);

/// Builds a config from defaults plus the `[pipeline]` section of a
/// TOML-subset document. Other sections are ignored.
PipelineConfig pipeline_config_from_toml(std::string_view text);

/// Reads a file and delegates to pipeline_config_from_toml. Throws Error(BadConfig)
/// if the file cannot be read.
PipelineConfig load_pipeline_config(const std::string& path);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

} // namespace meshpress
