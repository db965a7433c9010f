#include "twr/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "twr/analytics.hpp"
#include "twr/errors.hpp"
#include "twr/optimizer.hpp"

namespace twr {

void TrialConfig::validate() const
{
    if (n_measurements < 2) {
        throw ConfigError("n_measurements must be at least 2");
    }
    timing.validate();
    scene.validate();
    clock_i.validate();
    clock_j.validate();
    noise.validate();
}

Seconds TrialResult::std_dev() const { return Seconds(std::sqrt(variance.value)); }

namespace {

// Welford accumulator over estimation errors.
class ErrorStats {
public:
    void add(Seconds error)
    {
        ++n_;
        const time_rep delta = error.count() - mean_;
        mean_ += delta / static_cast<time_rep>(n_);
        m2_ += delta * (error.count() - mean_);
    }

    TrialResult result() const
    {
        TrialResult r;
        r.n = n_;
        r.mean_error = Seconds(mean_);
        r.variance = SquaredSeconds{n_ > 1 ? static_cast<double>(m2_ / (n_ - 1)) : 0.0};
        return r;
    }

private:
    std::size_t n_ = 0;
    time_rep mean_ = 0;
    time_rep m2_ = 0;
};

TrialResult run_transactions(const TrialConfig& cfg, TwrProtocol protocol, std::size_t count,
                             RandomStream& rng, TimestampLog* log)
{
    const TwrMode mode = protocol == TwrProtocol::DS ? TwrMode::Ds : TwrMode::SsOnly;
    ErrorStats stats;
    if (log) {
        log->reserve(log->size() + count);
    }
    for (std::size_t k = 0; k < count; ++k) {
        const TimestampSet ts = simulate_transaction(cfg.scene, cfg.clock_i, cfg.clock_j,
                                                     cfg.timing, cfg.noise, rng, mode);
        stats.add(estimate(ts, protocol).tof - cfg.scene.tof_initial);
        if (log) {
            log->push_back(ts);
        }
    }
    return stats.result();
}

double measurement_rate(const TimingConfig& timing)
{
    return std::floor(1.0 / timing.cycle().to_double());
}

}  // namespace

TrialResult run_trial(const TrialConfig& cfg, TwrProtocol protocol, TimestampLog* log)
{
    cfg.validate();
    RandomStream rng(cfg.seed);
    return run_transactions(cfg, protocol, cfg.n_measurements, rng, log);
}

std::vector<SweepRow> sweep_dt53(const TrialConfig& base, std::span<const Seconds> dt53_values,
                                 unsigned workers)
{
    base.validate();
    for (const Seconds v : dt53_values) {
        if (v.count() <= 0) {
            throw ConfigError("sweep dt53 values must be positive");
        }
    }

    std::vector<SweepRow> rows(dt53_values.size());
    auto compute_row = [&](std::size_t k) {
        TrialConfig cfg = base;
        cfg.timing.dt53 = dt53_values[k];
        RandomStream rng = RandomStream::for_worker(base.seed, k);
        const TrialResult trial =
            run_transactions(cfg, TwrProtocol::DS, cfg.n_measurements, rng, nullptr);
        const double cycle = cfg.timing.cycle().to_double();
        const ObjectiveParams objective{cfg.timing.dt32, cfg.timing.processing_T,
                                        cfg.noise.variance};
        const SquaredSeconds analytic_var =
            ds_variance(cfg.noise.variance, cfg.timing.dt32, cfg.timing.dt53);

        SweepRow& row = rows[k];
        row.dt53 = cfg.timing.dt53;
        row.empirical_std = trial.std_dev();
        row.empirical_rate = measurement_rate(cfg.timing);
        row.empirical_r_avg = trial.variance.value * cycle;
        row.analytic_std = Seconds(std::sqrt(analytic_var.value));
        row.analytic_r_avg = r_avg(cfg.timing.dt53, objective);
    };

    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows.size()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            compute_row(k);
        }
        return rows;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < rows.size(); k = next++) {
                    try {
                        compute_row(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return rows;
}

SessionResult run_session(Seconds duration, const TrialConfig& cfg)
{
    if (duration.count() <= 0) {
        throw ConfigError("session duration must be positive");
    }
    cfg.timing.validate();
    const auto count = static_cast<std::size_t>(std::floor(static_cast<double>(duration / cfg.timing.cycle())));
    if (count == 0) {
        throw ZeroMeasurements("session shorter than one transaction");
    }
    RandomStream rng(cfg.seed);
    SessionResult out;
    out.stats = run_transactions(cfg, TwrProtocol::DS, count, rng, nullptr);
    out.measurement_count = count;
    return out;
}

TrialResult ss_drift_experiment(const TrialConfig& cfg, double skew_drift_per_trial)
{
    cfg.validate();
    RandomStream rng(cfg.seed);
    ErrorStats stats;
    TrialConfig step = cfg;
    const std::size_t n = cfg.n_measurements;
    for (std::size_t k = 0; k < n; ++k) {
        const double progress = static_cast<double>(k) / static_cast<double>(n - 1) - 0.5;
        step.clock_j.skew = cfg.clock_j.skew + skew_drift_per_trial * progress;
        const TimestampSet ts = simulate_transaction(step.scene, step.clock_i, step.clock_j,
                                                     step.timing, step.noise, rng,
                                                     TwrMode::SsOnly);
        stats.add(estimate_ss(ts).tof - cfg.scene.tof_initial);
    }
    return stats.result();
}

std::vector<Seconds> make_grid(Seconds lo, Seconds hi, std::size_t points, bool log_spaced)
{
    if (points == 0) {
        throw ConfigError("grid needs at least one point");
    }
    if (!(lo.count() > 0) || !(hi > lo || (points == 1 && hi >= lo))) {
        throw ConfigError("grid bounds must satisfy 0 < min < max");
    }
    std::vector<Seconds> grid;
    grid.reserve(points);
    if (points == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double span = static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) {
        const double u = static_cast<double>(k) / span;
        if (log_spaced) {
            grid.emplace_back(lo.to_double() * std::pow(hi / lo, u));
        } else {
            grid.emplace_back(lo + (hi - lo) * u);
        }
    }
    grid.back() = hi;
    return grid;
}

Seconds fitted_empirical_argmin(std::span<const SweepRow> rows)
{
    if (rows.size() < 4) {
        return raw_empirical_argmin(rows);
    }
    // normalise x to O(1) for conditioning
    const double x0 = rows[rows.size() / 2].dt53.to_double();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd basis(n, 4);
    Eigen::VectorXd target(n);
    double y0 = 0.0;
    for (const SweepRow& r : rows) {
        y0 = std::max(y0, std::abs(r.empirical_r_avg));
    }
    if (y0 == 0.0) {
        return rows.front().dt53;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const double u = rows[k].dt53.to_double() / x0;
        basis.row(k) << 1.0, u, 1.0 / u, 1.0 / (u * u);
        target[k] = rows[k].empirical_r_avg / y0;
    }
    const Eigen::Vector4d c = basis.colPivHouseholderQr().solve(target);
    const Eigen::VectorXd fitted = basis * c;
    Eigen::Index best = 0;
    fitted.minCoeff(&best);
    return rows[best].dt53;
}

Seconds raw_empirical_argmin(std::span<const SweepRow> rows)
{
    if (rows.empty()) {
        throw ConfigError("empty sweep");
    }
    return std::min_element(rows.begin(), rows.end(),
                            [](const SweepRow& a, const SweepRow& b) {
                                return a.empirical_r_avg < b.empirical_r_avg;
                            })
        ->dt53;
}

Seconds analytic_argmin(std::span<const SweepRow> rows)
{
    if (rows.empty()) {
        throw ConfigError("empty sweep");
    }
    return std::min_element(rows.begin(), rows.end(),
                            [](const SweepRow& a, const SweepRow& b) {
                                return a.analytic_r_avg < b.analytic_r_avg;
                            })
        ->dt53;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows)
{
    os << "dt53,empirical_std,empirical_rate,empirical_r_avg,analytic_std,analytic_r_avg\n";
    char buf[256];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      r.dt53.to_double(), r.empirical_std.to_double(), r.empirical_rate,
                      r.empirical_r_avg, r.analytic_std.to_double(), r.analytic_r_avg);
        os << buf;
    }
}

}  // namespace twr
