#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twr/analytics.hpp"
#include "twr/errors.hpp"
#include "twr/harness.hpp"
#include "twr/optimizer.hpp"
#include "twr/protocol.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

// Python sees plain floats in seconds / seconds^2.
twr::Seconds sec(double v) { return twr::Seconds(v); }
double flt(twr::Seconds s) { return s.to_double(); }

twr::TrialConfig make_trial(double tof, double vbar, double dt32, double dt53, double T,
                            double skew_i, double skew_j, double offset_i, double offset_j,
                            double R, const std::string& distribution, std::size_t n,
                            std::uint64_t seed)
{
    twr::TrialConfig cfg;
    cfg.scene = twr::Scene{sec(tof), vbar};
    cfg.timing = twr::TimingConfig{sec(dt32), sec(dt53), sec(T)};
    cfg.clock_i = twr::ClockParams{sec(offset_i), skew_i};
    cfg.clock_j = twr::ClockParams{sec(offset_j), skew_j};
    cfg.noise.variance = twr::SquaredSeconds{R};
    if (distribution == "gaussian") {
        cfg.noise.distribution = twr::NoiseDistribution::Gaussian;
    } else if (distribution == "uniform") {
        cfg.noise.distribution = twr::NoiseDistribution::Uniform;
    } else if (distribution == "none") {
        cfg.noise.distribution = twr::NoiseDistribution::None;
    } else {
        throw twr::ConfigError("distribution must be gaussian, uniform or none");
    }
    cfg.n_measurements = n;
    cfg.seed = seed;
    return cfg;
}

py::dict trial_dict(const twr::TrialResult& r)
{
    return py::dict("mean_error"_a = flt(r.mean_error), "variance"_a = r.variance.value,
                    "n"_a = r.n);
}

twr::TimestampSet timestamps_from(const std::vector<double>& t, bool ds)
{
    if (t.size() != (ds ? 6u : 4u)) {
        throw twr::ConfigError("expected 6 timestamps (t1_i, t2_j, t3_j, t4_i, t5_j, t6_i) or 4");
    }
    twr::TimestampSet ts;
    ts.mode = ds ? twr::TwrMode::Ds : twr::TwrMode::SsOnly;
    ts.t1_i = sec(t[0]);
    ts.t2_j = sec(t[1]);
    ts.t3_j = sec(t[2]);
    ts.t4_i = sec(t[3]);
    if (ds) {
        ts.t5_j = sec(t[4]);
        ts.t6_i = sec(t[5]);
    }
    return ts;
}

}  // namespace

PYBIND11_MODULE(twrsim, m)
{
    m.doc() = "Two-way ranging simulator: SS/DS estimates, variance models, CRLB and "
              "optimal response delay";

    py::register_exception<twr::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<twr::DegenerateInterval>(m, "DegenerateInterval", PyExc_ValueError);
    py::register_exception<twr::SingularInformation>(m, "SingularInformation",
                                                     PyExc_ArithmeticError);
    py::register_exception<twr::NoPositiveRoot>(m, "NoPositiveRoot", PyExc_ArithmeticError);
    py::register_exception<twr::ZeroMeasurements>(m, "ZeroMeasurements", PyExc_ValueError);

    m.attr("SPEED_OF_LIGHT") = twr::kSpeedOfLight;
    m.attr("DEFAULT_TIMESTAMP_VARIANCE") = twr::kDefaultTimestampVariance;

    m.def("to_clock", [](double t, double offset, double skew) {
        const twr::ClockParams clock{sec(offset), skew};
        clock.validate();
        return flt(twr::to_clock(sec(t), clock));
    }, "t"_a, "offset"_a = 0.0, "skew"_a = 0.0);

    m.def("simulate_transaction",
          [](double tof, double vbar, double dt32, double dt53, double skew_i, double skew_j,
             double offset_i, double offset_j, double R, const std::string& distribution,
             std::uint64_t seed) {
              const twr::TrialConfig cfg = make_trial(tof, vbar, dt32, dt53, 0.0, skew_i, skew_j,
                                                      offset_i, offset_j, R, distribution, 2, seed);
              twr::RandomStream rng(seed);
              const twr::TimestampSet ts = twr::simulate_transaction(
                  cfg.scene, cfg.clock_i, cfg.clock_j, cfg.timing, cfg.noise, rng);
              return std::vector<double>{flt(ts.t1_i), flt(ts.t2_j), flt(ts.t3_j),
                                         flt(ts.t4_i), flt(ts.t5_j), flt(ts.t6_i)};
          },
          "tof"_a, "vbar"_a = 0.0, "dt32"_a = 3.5e-4, "dt53"_a = 1.9e-3, "skew_i"_a = 0.0,
          "skew_j"_a = 0.0, "offset_i"_a = 0.0, "offset_j"_a = 0.0, "R"_a = 0.0,
          "distribution"_a = "none", "seed"_a = 0,
          "Timestamps [t1_i, t2_j, t3_j, t4_i, t5_j, t6_i] of one DS transaction.");

    m.def("estimate_ss", [](const std::vector<double>& t) {
        return flt(twr::estimate_ss(timestamps_from(t, t.size() == 6)).tof);
    }, "timestamps"_a);
    m.def("estimate_ds", [](const std::vector<double>& t) {
        return flt(twr::estimate_ds(timestamps_from(t, true)).tof);
    }, "timestamps"_a);

    m.def("ss_bias", [](double gamma_ij, double dt32) {
        return flt(twr::ss_bias(twr::RelativeClock{{}, gamma_ij}, sec(dt32)));
    }, "gamma_ij"_a, "dt32"_a);
    m.def("ss_variance", [](double R) { return twr::ss_variance({R}).value; }, "R"_a);
    m.def("ds_variance", [](double R, double dt32, double dt53) {
        return twr::ds_variance({R}, sec(dt32), sec(dt53)).value;
    }, "R"_a, "dt32"_a, "dt53"_a);
    m.def("brute_force_ds_variance", [](double R, double dt32, double dt53) {
        return twr::brute_force_ds_variance({R}, sec(dt32), sec(dt53)).value;
    }, "R"_a, "dt32"_a, "dt53"_a);

    m.def("crlb",
          [](double tof, double gamma_ij, double dt32, double dt53, double R, double origin,
             double tau_ij) {
              const twr::CrlbState state{sec(tof), sec(origin), {sec(tau_ij), gamma_ij},
                                         sec(dt32), sec(dt53)};
              const twr::CrlbResult r = twr::crlb(state, {R});
              return py::dict("jacobian"_a = Eigen::MatrixXd(r.jacobian),
                              "fisher_inverse"_a = Eigen::MatrixXd(r.fisher_inverse),
                              "tof_variance_bound"_a = r.tof_variance_bound.value,
                              "closed_form_bound"_a = r.closed_form_bound.value,
                              "condition_number"_a = r.condition_number);
          },
          "tof"_a, "gamma_ij"_a, "dt32"_a, "dt53"_a, "R"_a, "origin"_a = 0.0, "tau_ij"_a = 0.0);

    m.def("r_avg", [](double dt53, double dt32, double T, double R) {
        return twr::r_avg(sec(dt53), {sec(dt32), sec(T), {R}});
    }, "dt53"_a, "dt32"_a, "T"_a, "R"_a);
    m.def("optimality_cubic", [](double dt32, double T) {
        const twr::DepressedCubic c = twr::optimality_cubic({sec(dt32), sec(T), {1.0}});
        return py::make_tuple(c.p, c.q);
    }, "dt32"_a, "T"_a, "Coefficients (p, q) of t^3 + p t + q = 0.");
    m.def("solve_optimal_delay", [](double dt32, double T, double R) {
        const twr::OptimalDelay d = twr::solve_optimal_delay({sec(dt32), sec(T), {R}});
        return py::dict("dt53_star"_a = flt(d.dt53_star), "residual"_a = d.residual,
                        "r_avg_at_star"_a = d.r_avg_at_star);
    }, "dt32"_a, "T"_a, "R"_a = twr::kDefaultTimestampVariance);
    m.def("grid_argmin_r_avg",
          [](const std::vector<double>& grid, double dt32, double T, double R) {
              std::vector<twr::Seconds> g;
              g.reserve(grid.size());
              for (double v : grid) g.push_back(sec(v));
              return flt(twr::grid_argmin_r_avg({sec(dt32), sec(T), {R}}, g));
          },
          "grid"_a, "dt32"_a, "T"_a, "R"_a = twr::kDefaultTimestampVariance);

    m.def("run_trial",
          [](const std::string& protocol, std::size_t n, double tof, double dt32, double dt53,
             double skew_i, double skew_j, double R, const std::string& distribution,
             std::uint64_t seed) {
              const twr::TrialConfig cfg = make_trial(tof, 0.0, dt32, dt53, 0.0, skew_i, skew_j,
                                                      0.0, 0.0, R, distribution, n, seed);
              if (protocol != "SS" && protocol != "DS") {
                  throw twr::ConfigError("protocol must be 'SS' or 'DS'");
              }
              return trial_dict(twr::run_trial(
                  cfg, protocol == "SS" ? twr::TwrProtocol::SS : twr::TwrProtocol::DS));
          },
          "protocol"_a, "n"_a = 2500, "tof"_a = 5e-9, "dt32"_a = 3.5e-4, "dt53"_a = 1.9e-3,
          "skew_i"_a = 0.0, "skew_j"_a = 0.0, "R"_a = twr::kDefaultTimestampVariance,
          "distribution"_a = "gaussian", "seed"_a = 0);

    m.def("sweep_dt53",
          [](const std::vector<double>& dt53_values, std::size_t n, double dt32, double T,
             double R, std::uint64_t seed) {
              const twr::TrialConfig cfg = make_trial(5e-9, 0.0, dt32, 1e-3, T, 0.0, 0.0, 0.0,
                                                      0.0, R, "gaussian", n, seed);
              std::vector<twr::Seconds> grid;
              for (double v : dt53_values) grid.push_back(sec(v));
              std::vector<py::dict> out;
              for (const twr::SweepRow& r : twr::sweep_dt53(cfg, grid)) {
                  out.push_back(py::dict(
                      "dt53"_a = flt(r.dt53), "empirical_std"_a = flt(r.empirical_std),
                      "empirical_rate"_a = r.empirical_rate,
                      "empirical_r_avg"_a = r.empirical_r_avg,
                      "analytic_std"_a = flt(r.analytic_std),
                      "analytic_r_avg"_a = r.analytic_r_avg));
              }
              return out;
          },
          "dt53_values"_a, "n"_a = 2500, "dt32"_a = 3.5e-4, "T"_a = 7.2e-3,
          "R"_a = twr::kDefaultTimestampVariance, "seed"_a = 0);
}
