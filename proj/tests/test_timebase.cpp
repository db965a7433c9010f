#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "test_support.hpp"
#include "twr/errors.hpp"
#include "twr/timebase.hpp"

using namespace twr;
using namespace twr::literals;

TEST_CASE("Seconds rejects non-finite values")
{
    CHECK_THROWS_AS(Seconds{std::nan("")}, ConfigError);
    CHECK_THROWS_AS(Seconds{std::numeric_limits<double>::infinity()}, ConfigError);
    CHECK((1.5_ms).count() == doctest::Approx(1.5e-3));
    CHECK((2.0_ms / 1.0_ms) == doctest::Approx(2.0));
    CHECK((3.0_s * 2.0_s).value == doctest::Approx(6.0));
}

TEST_CASE("to_clock examples")
{
    CHECK(to_clock(Seconds(0), ClockParams{Seconds(1e-3L), 0.0}).to_double() == doctest::Approx(1e-3));
    CHECK(to_clock(Seconds(1e-3L), ClockParams{Seconds{}, 20e-6}).to_double() ==
          doctest::Approx(1.00002e-3).epsilon(1e-14));
    CHECK(to_clock(Seconds(3.5e-4L), ClockParams{Seconds(5e-4L), 40e-6}).to_double() ==
          doctest::Approx(8.50014e-4).epsilon(1e-14));
}

TEST_CASE("to_clock is affine")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0.0, 0.2);
    std::uniform_real_distribution<double> skew(-9e-4, 9e-4);
    for (int k = 0; k < 1000; ++k) {
        const ClockParams clock{Seconds(t(rng)), skew(rng)};
        const Seconds a(t(rng));
        const Seconds b(t(rng));
        const time_rep lhs = (to_clock(a + b, clock) - to_clock(a, clock)).count();
        const time_rep rhs = (1.0L + clock.skew) * b.count();
        // a few extended-precision ulps at 0.6 s
        CHECK(std::abs(lhs - rhs) < 1e-18L);
    }
}

TEST_CASE("clock skew range is enforced")
{
    CHECK_NOTHROW((ClockParams{Seconds{}, 999e-6}.validate()));
    CHECK_THROWS_AS((ClockParams{Seconds{}, 1e-3}.validate()), ConfigError);
    CHECK_THROWS_AS((ClockParams{Seconds{}, -2e-3}.validate()), ConfigError);
}

TEST_CASE("noise model validation")
{
    CHECK_THROWS_AS((NoiseModel{SquaredSeconds{-1.0}, NoiseDistribution::Gaussian, {}}).validate(),
                    ConfigError);
    CHECK_THROWS_AS((NoiseModel{SquaredSeconds{1.0}, NoiseDistribution::Gaussian, Seconds(0)})
                        .validate(),
                    ConfigError);
}

TEST_CASE("sample_noise with distribution None is zero")
{
    RandomStream rng(1);
    const NoiseModel none{SquaredSeconds{6.96e-21}, NoiseDistribution::None, {}};
    for (int k = 0; k < 10; ++k) {
        CHECK(sample_noise(none, rng).count() == 0);
    }
}

TEST_CASE("sample_noise moments")
{
    constexpr std::size_t n = 1'000'000;
    const double R = 6.96e-21;
    const auto [lo, hi] = twr::testing::chi_square_ratio_band(n);

    for (const auto dist : {NoiseDistribution::Gaussian, NoiseDistribution::Uniform}) {
        CAPTURE(static_cast<int>(dist));
        RandomStream rng(2024);
        const NoiseModel model{SquaredSeconds{R}, dist, {}};
        long double sum = 0, sum_sq = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const long double x = sample_noise(model, rng).count();
            sum += x;
            sum_sq += x * x;
        }
        const double mean = static_cast<double>(sum / n);
        const double var = static_cast<double>((sum_sq - sum * sum / n) / (n - 1));
        CHECK(std::abs(mean) < 3.0 * std::sqrt(R / n));
        CHECK(std::abs(var / R - 1.0) < 0.01);
        if (dist == NoiseDistribution::Gaussian) {
            CHECK(var / R > lo);
            CHECK(var / R < hi);
        }
    }
}

TEST_CASE("quantized noise lands on the tick grid")
{
    RandomStream rng(3);
    const Seconds tick(15.65e-12L);
    const NoiseModel model{SquaredSeconds{6.96e-21}, NoiseDistribution::Gaussian, tick};
    for (int k = 0; k < 1000; ++k) {
        const double ratio = static_cast<double>(sample_noise(model, rng).count() / tick.count());
        CHECK(std::abs(ratio - std::round(ratio)) < 1e-9);
    }
}

TEST_CASE("random streams are reproducible and worker streams differ")
{
    const NoiseModel model{SquaredSeconds{1.0}, NoiseDistribution::Gaussian, {}};
    RandomStream a(99), b(99);
    for (int k = 0; k < 100; ++k) {
        CHECK(sample_noise(model, a).count() == sample_noise(model, b).count());
    }
    RandomStream w0 = RandomStream::for_worker(99, 0);
    RandomStream w0b = RandomStream::for_worker(99, 0);
    RandomStream w1 = RandomStream::for_worker(99, 1);
    const double x0 = w0.standard_normal();
    CHECK(x0 == w0b.standard_normal());
    CHECK(x0 != w1.standard_normal());
}

TEST_CASE("unit conversions")
{
    CHECK(to_centimeters(Seconds(1.0L / kSpeedOfLight)) == doctest::Approx(100.0));
    const double sigma = 0.025 / kSpeedOfLight;
    CHECK(to_square_centimeters(SquaredSeconds{sigma * sigma}) == doctest::Approx(6.25));
}
