#include "twr/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "twr/analytics.hpp"
#include "twr/errors.hpp"
#include "twr/harness.hpp"
#include "twr/optimizer.hpp"

namespace twr::cli {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string sci(double v) { return fmt("%.6e", v); }

void print_warnings(const RunConfig& cfg, std::ostream& diag)
{
    for (const std::string& w : cfg.trial.timing.warnings(cfg.trial.scene)) {
        diag << "warning: " << w << '\n';
    }
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot open output file '" + path + "'");
    }
    return file;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const Options& opts, std::ostream& report,
                 std::ostream& diag)
{
    print_warnings(cfg, diag);
    const TrialConfig& trial = cfg.trial;
    const std::string log_path = !opts.out_path.empty() ? opts.out_path : cfg.timestamp_log;

    TimestampLog log;
    const TrialResult ss = run_trial(trial, TwrProtocol::SS);
    const TrialResult ds = run_trial(trial, TwrProtocol::DS, log_path.empty() ? nullptr : &log);

    if (!log_path.empty()) {
        std::ofstream file = open_output(log_path);
        file << timestamp_csv_header() << '\n';
        for (const TimestampSet& ts : log) {
            write_timestamp_csv_row(file, ts);
        }
    }
    if (opts.quiet) {
        return kOk;
    }

    const RelativeClock rel = RelativeClock::between(trial.clock_i, trial.clock_j);
    const Seconds bias = ss_bias(rel, trial.timing.dt32);
    const SquaredSeconds ds_var = ds_variance(trial.noise.variance, trial.timing.dt32,
                                              trial.timing.dt53);
    const double rate = std::floor(1.0 / trial.timing.cycle().to_double());

    report << "simulate: n=" << trial.n_measurements << " seed=" << trial.seed << '\n';
    report << "protocol mean_error[s]   mean_error[cm]  std[s]          std[cm]\n";
    auto line = [&](const char* name, const TrialResult& r) {
        report << name << "       " << sci(r.mean_error.to_double()) << "  "
               << fmt("%+.6f", to_centimeters(r.mean_error)) << "  "
               << sci(r.std_dev().to_double()) << "  "
               << fmt("%.6f", to_centimeters(r.std_dev())) << '\n';
    };
    line("SS", ss);
    line("DS", ds);
    report << "rate[Hz]: " << rate << '\n';
    report << "analytic SS bias: " << sci(bias.to_double()) << " s ("
           << fmt("%+.6f", to_centimeters(bias)) << " cm)\n";
    const Seconds ds_std(std::sqrt(ds_var.value));
    report << "analytic DS std: " << sci(ds_std.to_double()) << " s ("
           << fmt("%.6f", to_centimeters(ds_std)) << " cm)\n";
    if (!log_path.empty()) {
        report << "timestamp log: " << log_path << '\n';
    }
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, const Options& opts, std::ostream& report, std::ostream& diag)
{
    if (!cfg.sweep) {
        diag << "error: sweep subcommand needs a [sweep] section in the config\n";
        return kUsageError;
    }
    print_warnings(cfg, diag);
    const SweepSpec& spec = *cfg.sweep;
    const std::vector<Seconds> grid =
        make_grid(spec.dt53_min, spec.dt53_max, spec.points, spec.log_spaced);
    const std::vector<SweepRow> rows = sweep_dt53(cfg.trial, grid);

    const std::string path = !opts.out_path.empty() ? opts.out_path : cfg.output_path;
    std::ostream* summary = &report;
    if (path.empty()) {
        write_sweep_csv(report, rows);
        summary = &diag;
    } else {
        std::ofstream file = open_output(path);
        write_sweep_csv(file, rows);
    }
    if (opts.quiet) {
        return kOk;
    }

    const ObjectiveParams objective{cfg.trial.timing.dt32, cfg.trial.timing.processing_T,
                                    cfg.trial.noise.variance};
    const OptimalDelay star = solve_optimal_delay(objective);
    *summary << "rows: " << rows.size() << '\n'
             << "empirical argmin (fitted): " << sci(fitted_empirical_argmin(rows).to_double())
             << " s\n"
             << "empirical argmin (raw): " << sci(raw_empirical_argmin(rows).to_double())
             << " s\n"
             << "analytic argmin: " << sci(analytic_argmin(rows).to_double()) << " s\n"
             << "cubic root: " << sci(star.dt53_star.to_double()) << " s\n";
    if (!path.empty()) {
        *summary << "csv: " << path << '\n';
    }
    return kOk;
}

int cmd_optimize(const RunConfig& cfg, const Options& opts, std::ostream& report,
                 std::ostream& diag)
{
    print_warnings(cfg, diag);
    const TimingConfig& timing = cfg.trial.timing;
    const ObjectiveParams objective{timing.dt32, timing.processing_T, cfg.trial.noise.variance};
    const OptimalDelay star = solve_optimal_delay(objective);
    if (opts.quiet) {
        return kOk;
    }
    const DepressedCubic cubic = optimality_cubic(objective);
    const SquaredSeconds var = ds_variance(objective.R, timing.dt32, star.dt53_star);
    const Seconds std_dev(std::sqrt(var.value));
    const double cycle = (timing.processing_T + timing.dt32 + star.dt53_star).to_double();
    const double c_cm = kSpeedOfLight * 100.0;

    report << "optimal dt53: " << fmt("%.4f", star.dt53_star.to_double() * 1e3) << " ms ("
           << fmt("%.12e", star.dt53_star.to_double()) << " s)\n"
           << "cubic: t^3 + (" << sci(cubic.p) << ") t + (" << sci(cubic.q) << ") = 0\n"
           << "cubic residual: " << sci(star.residual) << " (relative "
           << sci(std::abs(star.residual / cubic.q)) << ")\n"
           << "predicted std: " << sci(std_dev.to_double()) << " s ("
           << fmt("%.6f", to_centimeters(std_dev)) << " cm)\n"
           << "predicted rate: " << std::floor(1.0 / cycle) << " Hz\n"
           << "predicted R_avg: " << sci(star.r_avg_at_star) << " s^3 ("
           << sci(star.r_avg_at_star * c_cm * c_cm) << " cm^2 s)\n";
    return kOk;
}

int cmd_crlb(const RunConfig& cfg, const Options& opts, std::ostream& report, std::ostream& diag)
{
    print_warnings(cfg, diag);
    const TrialConfig& t = cfg.trial;
    CrlbState state;
    state.tof = t.scene.tof_initial;
    state.origin = t.clock_i.offset;
    state.rel = RelativeClock::between(t.clock_i, t.clock_j);
    state.dt32_j = t.timing.dt32;
    state.dt53_j = t.timing.dt53;

    const CrlbResult result = crlb(state, t.noise.variance);
    if (opts.quiet) {
        return kOk;
    }
    const SquaredSeconds ds_var = ds_variance(t.noise.variance, state.dt32_j, state.dt53_j);

    report << "jacobian:\n";
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
            report << (c ? "," : "") << fmt("%.12g", result.jacobian(r, c));
        }
        report << '\n';
    }
    report << "fisher_inverse_diagonal:";
    for (int k = 0; k < 6; ++k) {
        report << (k ? "," : " ") << fmt("%.12g", result.fisher_inverse(k, k));
    }
    report << '\n'
           << "tof_bound: " << fmt("%.12g", result.tof_variance_bound.value) << " s^2 ("
           << fmt("%.12g", to_square_centimeters(result.tof_variance_bound)) << " cm^2)\n"
           << "closed_form_bound: " << fmt("%.12g", result.closed_form_bound.value) << " s^2\n"
           << "ds_variance: " << fmt("%.12g", ds_var.value) << " s^2\n"
           << "ratio bound/ds_variance: "
           << fmt("%.12g", result.tof_variance_bound.value / ds_var.value) << '\n'
           << "condition_number: " << fmt("%.6g", result.condition_number) << '\n';

    // Bound under the unapproximated timestamp model, for comparison only.
    try {
        const Matrix6 exact_jac =
            finite_difference_jacobian(exact_measurement_model, state.as_vector());
        const Matrix6 exact_inv = fisher_inverse(exact_jac, t.noise.variance);
        report << "exact_model_bound: " << fmt("%.12g", exact_inv(0, 0)) << " s^2\n";
    } catch (const SingularInformation& e) {
        diag << "warning: exact-model bound unavailable: " << e.what() << '\n';
    }
    return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-way ranging simulator: Monte Carlo, analytic variance, CRLB and "
                 "response-delay optimisation"};
    app.require_subcommand(1, 1);
    Options opts;
    std::uint64_t seed = 0;
    app.add_option("--config", opts.config_path, "Config file (INI-style)");
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--out", opts.out_path, "Output path (CSV or timestamp log)");
    app.add_flag("--quiet", opts.quiet, "Suppress the report");

    using Command = int (*)(const RunConfig&, const Options&, std::ostream&, std::ostream&);
    const std::pair<const char*, Command> commands[] = {
        {"simulate", &cmd_simulate},
        {"sweep", &cmd_sweep},
        {"optimize", &cmd_optimize},
        {"crlb", &cmd_crlb},
    };
    const char* descriptions[] = {
        "Run SS and DS trials and report error statistics",
        "Sweep dt53 and write per-delay statistics as CSV",
        "Solve for the optimal second-response delay",
        "Report the Cramer-Rao bound on the time of flight",
    };
    for (std::size_t k = 0; k < std::size(commands); ++k) {
        app.add_subcommand(commands[k].first, descriptions[k])->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    if (seed_opt->count() > 0) {
        opts.seed = seed;
    }

    RunConfig cfg;
    try {
        cfg = opts.config_path.empty() ? default_run_config() : load_run_config(opts.config_path);
        if (opts.seed) {
            cfg.trial.seed = *opts.seed;
        }
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const auto it = std::find_if(std::begin(commands), std::end(commands),
                                 [&](const auto& c) { return name == c.first; });
    try {
        return it->second(cfg, opts, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace twr::cli
