#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "twr/protocol.hpp"
#include "twr/timebase.hpp"

namespace twr {

/// Timestamp variance giving a 2.5 cm range standard deviation
/// (sigma = 0.025 m / c, about 83.4 ps).
inline constexpr double kDefaultTimestampVariance = 6.96e-21;

struct TrialConfig {
    std::size_t n_measurements = 2500;
    TimingConfig timing{};
    Scene scene{};
    ClockParams clock_i{};
    ClockParams clock_j{};
    NoiseModel noise{};
    std::uint64_t seed = 0;

    void validate() const;
};

/// Sample statistics of the estimation error (estimate - initial tof).
struct TrialResult {
    Seconds mean_error{};
    SquaredSeconds variance{};  ///< unbiased sample variance
    std::size_t n = 0;

    Seconds std_dev() const;
};

struct SessionResult {
    TrialResult stats;
    std::size_t measurement_count = 0;
};

struct SweepRow {
    Seconds dt53{};
    Seconds empirical_std{};
    double empirical_rate = 0.0;     ///< Hz, floor(1 / (T + dt32 + dt53))
    double empirical_r_avg = 0.0;    ///< s^3
    Seconds analytic_std{};
    double analytic_r_avg = 0.0;     ///< s^3
};

/// Optional sink for every simulated transaction of a trial.
using TimestampLog = std::vector<TimestampSet>;

/// Simulates n independent transactions with a stream seeded from cfg.seed.
TrialResult run_trial(const TrialConfig& cfg, TwrProtocol protocol, TimestampLog* log = nullptr);

/// One DS trial per dt53 value. Rows run on `workers` threads (0 = hardware
/// concurrency); row k draws from RandomStream::for_worker(seed, k) so the
/// output does not depend on the worker count.
std::vector<SweepRow> sweep_dt53(const TrialConfig& base, std::span<const Seconds> dt53_values,
                                 unsigned workers = 0);

/// Back-to-back DS transactions filling `duration`. Each occupies
/// T + dt32 + dt53. Throws ZeroMeasurements if none fit.
SessionResult run_session(Seconds duration, const TrialConfig& cfg);

/// SS trial where clock j's skew ramps linearly by `skew_drift_per_trial`
/// from the first to the last measurement (centred on the configured skew),
/// so the SS bias wanders across the trial.
TrialResult ss_drift_experiment(const TrialConfig& cfg, double skew_drift_per_trial);

/// n points from lo to hi inclusive, geometric or arithmetic spacing.
std::vector<Seconds> make_grid(Seconds lo, Seconds hi, std::size_t points, bool log_spaced);

/// Argmin of a fitted curve c0 + c1 x + c2 / x + c3 / x^2 through the sweep's
/// empirical R_avg, evaluated on the sweep grid. Reads the minimum of a noisy
/// sweep the way one reads it off a scatter plot with a trend line.
Seconds fitted_empirical_argmin(std::span<const SweepRow> rows);
/// Raw argmin of the empirical R_avg column.
Seconds raw_empirical_argmin(std::span<const SweepRow> rows);
Seconds analytic_argmin(std::span<const SweepRow> rows);

/// CSV header: dt53,empirical_std,empirical_rate,empirical_r_avg,analytic_std,analytic_r_avg
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace twr
