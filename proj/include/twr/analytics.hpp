#pragma once

#include <Eigen/Core>

#include "twr/timebase.hpp"

namespace twr {

/// Relative clock state of transceiver i with respect to j.
struct RelativeClock {
    Seconds tau_ij{};      ///< offset difference at the transaction origin
    double gamma_ij = 0.0;  ///< skew difference

    static constexpr double kMaxGamma = 2e-3;

    void validate() const;
    static RelativeClock between(const ClockParams& i, const ClockParams& j);
};

/// Bias of the single-sided estimate: gamma_ij * dt32 / 2.
Seconds ss_bias(const RelativeClock& rel, Seconds dt32);

/// Variance of the single-sided estimate. Equal to the per-timestamp variance.
SquaredSeconds ss_variance(SquaredSeconds R);

/// R * (1 + rho + rho^2), rho = dt32 / dt53. Throws DegenerateInterval if dt53 <= 0.
SquaredSeconds ds_variance(SquaredSeconds R, Seconds dt32, Seconds dt53);

/// Independent check of ds_variance: the double-sided error is linear in the
/// six timestamp noises, so its variance is R times the sum of squared
/// coefficients. The coefficients are enumerated one by one here.
SquaredSeconds brute_force_ds_variance(SquaredSeconds R, Seconds dt32, Seconds dt53);

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Linearisation point for the bound. Component order matches the state
/// vector [tof, origin, tau_ij, gamma_ij, dt32_j, dt53_j].
struct CrlbState {
    Seconds tof{};
    Seconds origin{};
    RelativeClock rel{};
    Seconds dt32_j{};
    Seconds dt53_j{};

    void validate() const;
    Vector6 as_vector() const;
    static CrlbState from_vector(const Vector6& x);
};

struct CrlbResult {
    Matrix6 jacobian;
    Matrix6 fisher_inverse;        ///< (C^T R^-1 C)^-1, s^2 units on the tof entry
    SquaredSeconds tof_variance_bound;
    SquaredSeconds closed_form_bound;
    double condition_number = 0.0;  ///< of the column-equilibrated C^T C
};

/// Timestamp vector [T1_i, T2_j, T3_j, T4_i, T5_j, T6_i] predicted from the
/// state under the small-skew approximations (gamma_i * tof ~ 0 and
/// gamma_ij / (1 + gamma_j) ~ gamma_ij). This is the model the printed
/// Jacobian is the derivative of.
Vector6 measurement_model(const Vector6& x);

/// Same timestamps without the approximations, taking gamma_j = 0 so that
/// gamma_i = gamma_ij and j-clock intervals equal true intervals.
Vector6 exact_measurement_model(const Vector6& x);

/// Analytic Jacobian of measurement_model at `state`.
Matrix6 measurement_jacobian(const CrlbState& state);

/// Central-difference Jacobian of an arbitrary model. Step per component is
/// rel_step * max(|x_k|, 1).
template <typename Model>
Matrix6 finite_difference_jacobian(Model&& model, const Vector6& x, double rel_step = 1e-8)
{
    Matrix6 jac;
    for (int k = 0; k < 6; ++k) {
        const double h = rel_step * std::max(std::abs(x[k]), 1.0);
        Vector6 hi = x;
        Vector6 lo = x;
        hi[k] += h;
        lo[k] -= h;
        jac.col(k) = (model(hi) - model(lo)) / (hi[k] - lo[k]);
    }
    return jac;
}

/// R (gamma^2 + 2 gamma + 2)(dt32^2 + dt32 dt53 + dt53^2) / (2 dt53^2).
SquaredSeconds crlb_closed_form(const CrlbState& state, SquaredSeconds R);

/// Fisher inverse for an arbitrary Jacobian with R * I measurement covariance.
/// Columns are equilibrated before the symmetric factorisation.
/// Throws SingularInformation when the condition number exceeds 1e12.
Matrix6 fisher_inverse(const Matrix6& jacobian, SquaredSeconds R, double* condition = nullptr);

/// Cramer-Rao bound on the time of flight from the six DS timestamps.
/// Throws ConfigError if R <= 0.
CrlbResult crlb(const CrlbState& state, SquaredSeconds R);

}  // namespace twr
