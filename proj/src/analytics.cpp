#include "twr/analytics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <array>
#include <cmath>

#include "twr/errors.hpp"

namespace twr {

namespace {

constexpr double kMaxCondition = 1e12;

void require_positive_interval(Seconds dt, const char* name)
{
    if (dt.count() <= 0) {
        throw DegenerateInterval(std::string(name) + " must be positive");
    }
}

}  // namespace

void RelativeClock::validate() const
{
    if (!std::isfinite(gamma_ij) || std::abs(gamma_ij) >= kMaxGamma) {
        throw ConfigError("relative skew must satisfy |gamma_ij| < 2e-3");
    }
}

RelativeClock RelativeClock::between(const ClockParams& i, const ClockParams& j)
{
    return RelativeClock{i.offset - j.offset, i.skew - j.skew};
}

Seconds ss_bias(const RelativeClock& rel, Seconds dt32)
{
    return dt32 * static_cast<time_rep>(rel.gamma_ij) / 2;
}

SquaredSeconds ss_variance(SquaredSeconds R) { return R; }

SquaredSeconds ds_variance(SquaredSeconds R, Seconds dt32, Seconds dt53)
{
    require_positive_interval(dt53, "dt53");
    const double rho = static_cast<double>(dt32 / dt53);
    return SquaredSeconds{R.value * (1.0 + rho + rho * rho)};
}

SquaredSeconds brute_force_ds_variance(SquaredSeconds R, Seconds dt32, Seconds dt53)
{
    require_positive_interval(dt53, "dt53");
    const double rho = static_cast<double>(dt32 / dt53);
    // e = 1/2 (rho (n5 - n3 - n6 + n4) + n4 - n1 - n3 + n2)
    std::array<double, 6> coeff{};
    auto add = [&](int index, double c) { coeff[index - 1] += 0.5 * c; };
    add(5, rho);
    add(3, -rho);
    add(6, -rho);
    add(4, rho);
    add(4, 1.0);
    add(1, -1.0);
    add(3, -1.0);
    add(2, 1.0);
    double sum = 0.0;
    for (double c : coeff) {
        sum += c * c;
    }
    return SquaredSeconds{R.value * sum};
}

void CrlbState::validate() const
{
    rel.validate();
    if (dt32_j.count() <= 0 || dt53_j.count() <= 0) {
        throw ConfigError("CRLB state needs positive dt32_j and dt53_j");
    }
}

Vector6 CrlbState::as_vector() const
{
    Vector6 x;
    x << tof.to_double(), origin.to_double(), rel.tau_ij.to_double(), rel.gamma_ij,
        dt32_j.to_double(), dt53_j.to_double();
    return x;
}

CrlbState CrlbState::from_vector(const Vector6& x)
{
    return CrlbState{Seconds(x[0]), Seconds(x[1]), RelativeClock{Seconds(x[2]), x[3]},
                     Seconds(x[4]), Seconds(x[5])};
}

Vector6 measurement_model(const Vector6& x)
{
    const double tof = x[0], origin = x[1], tau = x[2], gamma = x[3], d32 = x[4], d53 = x[5];
    Vector6 y;
    y << origin,
        origin + tof - tau,
        origin + tof - tau + d32,
        origin + 2 * tof + (1 + gamma) * d32,
        origin + tof - tau + d32 + d53,
        origin + 2 * tof + (1 + gamma) * (d32 + d53);
    return y;
}

Vector6 exact_measurement_model(const Vector6& x)
{
    const double tof = x[0], origin = x[1], tau = x[2], gamma = x[3], d32 = x[4], d53 = x[5];
    Vector6 y;
    y << origin,
        origin + tof - tau,
        origin + tof - tau + d32,
        origin + (1 + gamma) * (2 * tof + d32),
        origin + tof - tau + d32 + d53,
        origin + (1 + gamma) * (2 * tof + d32 + d53);
    return y;
}

Matrix6 measurement_jacobian(const CrlbState& state)
{
    const double g = 1.0 + state.rel.gamma_ij;
    const double d32 = state.dt32_j.to_double();
    const double d53 = state.dt53_j.to_double();
    Matrix6 c;
    // clang-format off
    c << 0, 1,  0, 0,         0, 0,
         1, 1, -1, 0,         0, 0,
         1, 1, -1, 0,         1, 0,
         2, 1,  0, d32,       g, 0,
         1, 1, -1, 0,         1, 1,
         2, 1,  0, d32 + d53, g, g;
    // clang-format on
    return c;
}

SquaredSeconds crlb_closed_form(const CrlbState& state, SquaredSeconds R)
{
    const double g = state.rel.gamma_ij;
    const double a = state.dt32_j.to_double();
    const double b = state.dt53_j.to_double();
    return SquaredSeconds{R.value * (g * g + 2 * g + 2) * (a * a + a * b + b * b) / (2 * b * b)};
}

namespace {

using MatrixL6 = Eigen::Matrix<long double, 6, 6>;
using VectorL6 = Eigen::Matrix<long double, 6, 1>;

MatrixL6 extended_jacobian(const CrlbState& state)
{
    const long double g = 1.0L + state.rel.gamma_ij;
    const auto d32 = static_cast<long double>(state.dt32_j.count());
    const auto d53 = static_cast<long double>(state.dt53_j.count());
    MatrixL6 c;
    // clang-format off
    c << 0, 1,  0, 0,         0, 0,
         1, 1, -1, 0,         0, 0,
         1, 1, -1, 0,         1, 0,
         2, 1,  0, d32,       g, 0,
         1, 1, -1, 0,         1, 1,
         2, 1,  0, d32 + d53, g, g;
    // clang-format on
    return c;
}

Matrix6 fisher_inverse_impl(const MatrixL6& jacobian, SquaredSeconds R, double* condition)
{
    if (!(R.value > 0.0)) {
        throw ConfigError("CRLB needs a positive timestamp variance");
    }
    // Entries mix O(1) and O(dt) magnitudes; equilibrate columns first.
    VectorL6 scale;
    for (int k = 0; k < 6; ++k) {
        const long double norm = jacobian.col(k).norm();
        if (norm == 0.0L) {
            throw SingularInformation("Jacobian has an all-zero column");
        }
        scale[k] = 1.0L / norm;
    }
    const MatrixL6 scaled = jacobian * scale.asDiagonal();

    // cond(C^T C) = cond(C)^2
    const Eigen::JacobiSVD<Matrix6> svd(scaled.cast<double>());
    const double lo = svd.singularValues().minCoeff();
    const double hi = svd.singularValues().maxCoeff();
    const double cond = lo > 0.0 ? (hi / lo) * (hi / lo) : std::numeric_limits<double>::infinity();
    if (condition) {
        *condition = cond;
    }
    if (!(cond <= kMaxCondition)) {
        throw SingularInformation("information matrix condition number exceeds 1e12");
    }

    // C is square, so (C^T C)^-1 = C^-1 C^-T; avoids squaring the conditioning
    const MatrixL6 c_inv = scale.asDiagonal() * scaled.fullPivLu().inverse();
    const MatrixL6 product = c_inv * c_inv.transpose();
    Matrix6 inv = (0.5L * (product + product.transpose())).cast<double>();
    inv *= R.value;
    return inv;
}

}  // namespace

Matrix6 fisher_inverse(const Matrix6& jacobian, SquaredSeconds R, double* condition)
{
    return fisher_inverse_impl(jacobian.cast<long double>(), R, condition);
}

CrlbResult crlb(const CrlbState& state, SquaredSeconds R)
{
    state.validate();
    CrlbResult result;
    result.jacobian = measurement_jacobian(state);
    result.fisher_inverse =
        fisher_inverse_impl(extended_jacobian(state), R, &result.condition_number);
    result.tof_variance_bound = SquaredSeconds{result.fisher_inverse(0, 0)};
    result.closed_form_bound = crlb_closed_form(state, R);
    return result;
}

}  // namespace twr
