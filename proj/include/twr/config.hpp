#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "twr/harness.hpp"

namespace twr {

struct SweepSpec {
    Seconds dt53_min{};
    Seconds dt53_max{};
    std::size_t points = 200;
    bool log_spaced = true;

    void validate() const;
};

/// Everything a CLI run needs. Text form is INI-like:
///
///     [scene]    tof, vbar
///     [clock_i]  offset, skew        (same for [clock_j])
///     [noise]    variance, distribution (gaussian|uniform|none), quantization_tick
///     [timing]   dt32, dt53, processing_T
///     [sweep]    dt53_min, dt53_max, points, log_spaced
///     [run]      n_measurements, seed, output_path, timestamp_log
///
/// Times are in seconds. '#' and ';' start comments.
struct RunConfig {
    TrialConfig trial{};
    std::optional<SweepSpec> sweep;
    std::string output_path;
    std::string timestamp_log;

    void validate() const;
};

/// Defaults: 1.5 m range, dt32 = 0.35 ms, dt53 = 1.9 ms,
/// T = 7.2 ms, 2500 measurements, 2.5 cm timestamp noise, +/-10 ppm skews.
RunConfig default_run_config();

/// Throws ConfigError whose message starts with "<source>:<line>: <section>.<key>:"
/// for field-level problems.
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace twr
