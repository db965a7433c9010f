#include "twr/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "twr/analytics.hpp"
#include "twr/errors.hpp"

namespace twr {

void ObjectiveParams::validate() const
{
    if (dt32.count() <= 0) {
        throw ConfigError("objective dt32 must be positive");
    }
    if (processing_T.count() < 0) {
        throw ConfigError("objective processing_T must be non-negative");
    }
    if (!(R.value > 0.0)) {
        throw ConfigError("objective R must be positive");
    }
}

double r_avg(Seconds dt53, const ObjectiveParams& params)
{
    if (dt53.count() <= 0) {
        throw DegenerateInterval("dt53 must be positive");
    }
    const double cycle = (params.processing_T + params.dt32 + dt53).to_double();
    return cycle * ds_variance(params.R, params.dt32, dt53).value;
}

DepressedCubic optimality_cubic(const ObjectiveParams& params)
{
    const double a = params.dt32.to_double();
    const double T = params.processing_T.to_double();
    return DepressedCubic{-a * (T + 2 * a), -2 * a * a * (T + a)};
}

namespace {

constexpr double kDiscriminantFloor = 1e-30;

double bisect(const DepressedCubic& f, double lo, double hi)
{
    // f(lo) < 0 < f(hi)
    for (int it = 0; it < 400 && lo < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double newton_polish(const DepressedCubic& f, double t)
{
    for (int it = 0; it < 3; ++it) {
        const double slope = 3 * t * t + f.p;
        if (slope == 0.0) {
            break;
        }
        t -= f(t) / slope;
    }
    return t;
}

}  // namespace

double positive_cubic_root(const DepressedCubic& f, bool* used_bisection)
{
    if (!(f.p <= 0.0 && f.q < 0.0)) {
        throw NoPositiveRoot("cubic needs p <= 0 and q < 0 for a unique positive root");
    }
    const double half_q = 0.5 * f.q;
    const double third_p = f.p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;

    double root = 0.0;
    bool bisected = false;
    if (std::abs(disc) < kDiscriminantFloor) {
        // f(0) = q < 0; Cauchy bound gives f(hi) > 0
        root = bisect(f, 0.0, 1.0 + std::max(std::abs(f.p), std::abs(f.q)));
        bisected = true;
    } else if (disc > 0.0) {
        const double s = std::sqrt(disc);
        root = std::cbrt(-half_q + s) + std::cbrt(-half_q - s);
    } else {
        // three real roots; the k = 0 branch is the largest
        const double m = 2.0 * std::sqrt(-third_p);
        const double arg = std::clamp(3.0 * f.q / (f.p * m), -1.0, 1.0);
        root = m * std::cos(std::acos(arg) / 3.0);
    }
    if (!bisected) {
        root = newton_polish(f, root);
    }
    if (used_bisection) {
        *used_bisection = bisected;
    }
    if (!(root > 0.0) || !std::isfinite(root)) {
        throw NoPositiveRoot("cubic root solver did not find a positive root");
    }
    return root;
}

OptimalDelay solve_optimal_delay(const ObjectiveParams& params)
{
    if (!(params.dt32.count() > 0)) {
        throw NoPositiveRoot("dt32 must be positive for a positive optimal delay");
    }
    const DepressedCubic cubic = optimality_cubic(params);
    OptimalDelay out;
    const double root = positive_cubic_root(cubic, &out.used_bisection);
    out.dt53_star = Seconds(root);
    out.residual = cubic(root);
    out.r_avg_at_star = r_avg(out.dt53_star, params);
    return out;
}

Seconds grid_argmin_r_avg(const ObjectiveParams& params, std::span<const Seconds> grid)
{
    if (grid.empty()) {
        throw ConfigError("grid must not be empty");
    }
    Seconds best = grid.front();
    double best_value = r_avg(best, params);
    for (const Seconds x : grid.subspan(1)) {
        const double v = r_avg(x, params);
        if (v < best_value) {
            best_value = v;
            best = x;
        }
    }
    return best;
}

}  // namespace twr
