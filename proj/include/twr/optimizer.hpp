#pragma once

#include <span>

#include "twr/timebase.hpp"

namespace twr {

/// Inputs of the averaged-uncertainty objective. dt32 is fixed at the
/// hardware minimum; dt53 is the free variable.
struct ObjectiveParams {
    Seconds dt32{};
    Seconds processing_T{};
    SquaredSeconds R{};

    void validate() const;
};

/// Coefficients of the depressed cubic t^3 + p t + q = 0.
struct DepressedCubic {
    double p = 0.0;
    double q = 0.0;

    double operator()(double t) const { return (t * t + p) * t + q; }
};

struct OptimalDelay {
    Seconds dt53_star{};
    double residual = 0.0;      ///< cubic evaluated at the root (s^3)
    double r_avg_at_star = 0.0;  ///< s^3
    bool used_bisection = false;
};

/// Averaged uncertainty (T + dt32 + dt53) * ds_variance(R, dt32, dt53), in s^3.
/// Continuous relaxation: the measurement count per second is not floored.
/// Throws DegenerateInterval if dt53 <= 0.
double r_avg(Seconds dt53, const ObjectiveParams& params);

/// Stationarity condition of r_avg in dt53. R cancels out.
DepressedCubic optimality_cubic(const ObjectiveParams& params);

/// Unique positive root of a depressed cubic with p <= 0, q < 0, by Cardano
/// (trigonometric form when there are three real roots), polished with Newton.
/// Falls back to bisection if the discriminant is within 1e-30 of zero.
double positive_cubic_root(const DepressedCubic& cubic, bool* used_bisection = nullptr);

/// Optimal second-response delay. Throws NoPositiveRoot if dt32 <= 0.
OptimalDelay solve_optimal_delay(const ObjectiveParams& params);

/// Grid point with the smallest r_avg. Throws ConfigError on an empty grid.
Seconds grid_argmin_r_avg(const ObjectiveParams& params, std::span<const Seconds> grid);

}  // namespace twr
