#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>

namespace twr::testing {

inline bool rel_close(double a, double b, double rel)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Two-sided band for s^2 / sigma^2 with n samples (Wilson-Hilferty
/// approximation of the chi-square quantiles). z = 2.5758 is 99 %.
inline std::pair<double, double> chi_square_ratio_band(std::size_t n, double z = 2.5758293035489)
{
    const double k = static_cast<double>(n - 1);
    auto quantile = [k](double zz) {
        const double c = 2.0 / (9.0 * k);
        return std::pow(1.0 - c + zz * std::sqrt(c), 3);
    };
    return {quantile(-z), quantile(z)};
}

/// Plain bisection, used as an oracle independent of the Cardano solver.
inline double bisection_root(const std::function<double(double)>& f, double lo, double hi)
{
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) < 0) == (f(mid) < 0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Log-uniform draw on [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

}  // namespace twr::testing
