#include <doctest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"
#include "twr/errors.hpp"
#include "twr/protocol.hpp"

using namespace twr;
using namespace twr::literals;

namespace {

const NoiseModel kNoNoise{SquaredSeconds{0.0}, NoiseDistribution::None, {}};
const ClockParams kIdeal{};

TimestampSet noise_free(const Scene& scene, const ClockParams& ci, const ClockParams& cj,
                        const TimingConfig& timing)
{
    RandomStream rng(0);
    return simulate_transaction(scene, ci, cj, timing, kNoNoise, rng);
}

}  // namespace

TEST_CASE("noise-free ideal round trip equals dt32 + 2 tof")
{
    const TimestampSet ts = noise_free(Scene{5.0_ns, 0.0}, kIdeal, kIdeal,
                                       TimingConfig{0.3_ms, 1.0_ms, Seconds{}});
    CHECK(std::abs((ts.t4_i - ts.t1_i).count() - 3.0001e-4L) < 1e-20L);
    CHECK_NOTHROW(ts.validate());
}

TEST_CASE("skewed clock stretches the second reply interval")
{
    const ClockParams skewed{Seconds{}, 50e-6};
    const TimingConfig timing{0.3_ms, 1.0_ms, Seconds{}};
    const TimestampSet ts = noise_free(Scene{5.0_ns, 0.0}, kIdeal, skewed, timing);
    const time_rep expected = (1.0L + 50e-6L) * timing.dt53.count();
    CHECK(std::abs((ts.t5_j - ts.t3_j).count() - expected) < 1e-20L);
}

TEST_CASE("constant-velocity motion changes the return time of flight")
{
    const Scene scene{5.0_ns, 3.3356e-8};
    const TimingConfig timing{0.3_ms, 1.0_ms, Seconds{}};
    const TimestampSet ts = noise_free(scene, kIdeal, kIdeal, timing);
    // t4 = tof1 + dt32 + tof2
    const time_rep tof2 = (ts.t4_i - ts.t3_j).count();
    CHECK(static_cast<double>(tof2) == doctest::Approx(5.0100068e-9).epsilon(1e-12));
}

TEST_CASE("estimate_ss examples")
{
    const TimingConfig timing{0.35_ms, 1.9_ms, Seconds{}};
    const Scene scene{5.0_ns, 0.0};

    CHECK(std::abs(estimate_ss(noise_free(scene, kIdeal, kIdeal, timing)).tof.count() - 5e-9L) <
          1e-20L);

    const ClockParams ci{Seconds(1e-4L), 20e-6}, cj{Seconds(-3e-3L), -20e-6};
    const TofEstimate est = estimate_ss(noise_free(scene, ci, cj, timing));
    CHECK(est.protocol == TwrProtocol::SS);
    CHECK(est.tof.to_double() == doctest::Approx(1.20001e-8).epsilon(1e-10));
    CHECK(est.range_m == doctest::Approx(est.tof.to_double() * kSpeedOfLight));

    const ClockParams same{Seconds(2e-3L), 30e-6};
    const TofEstimate equal = estimate_ss(noise_free(scene, same, same, timing));
    CHECK(std::abs(equal.tof.count() - (1.0L + 30e-6L) * 5e-9L) < 1e-19L);
}

TEST_CASE("estimate_ds examples")
{
    const TimingConfig timing{0.35_ms, 1.9_ms, Seconds{}};
    const Scene scene{5.0_ns, 0.0};
    CHECK(std::abs(estimate_ds(noise_free(scene, kIdeal, kIdeal, timing)).tof.count() - 5e-9L) <
          1e-20L);

    const ClockParams ci{Seconds(4e-5L), 20e-6}, cj{Seconds(-1e-3L), -35e-6};
    const TofEstimate est = estimate_ds(noise_free(scene, ci, cj, timing));
    CHECK(est.protocol == TwrProtocol::DS);
    CHECK(std::abs(est.tof.count() - (1.0L + 20e-6L) * 5e-9L) < 1e-19L);

    const TofEstimate moving =
        estimate_ds(noise_free(Scene{5.0_ns, 3.34e-8}, kIdeal, kIdeal, timing));
    CHECK(std::abs(moving.tof.count() - 5e-9L) < 1e-18L);
}

TEST_CASE("estimate_ds rejects degenerate and incomplete sets")
{
    TimestampSet ts;
    ts.t1_i = Seconds(0);
    ts.t2_j = Seconds(1e-9L);
    ts.t3_j = Seconds(1e-4L);
    ts.t4_i = Seconds(1.1e-4L);
    ts.t5_j = ts.t3_j;
    ts.t6_i = Seconds(2e-4L);
    CHECK_THROWS_AS(estimate_ds(ts), DegenerateInterval);
    ts.mode = TwrMode::SsOnly;
    CHECK_THROWS_AS(estimate_ds(ts), ConfigError);
    CHECK_NOTHROW(estimate_ss(ts));
}

TEST_CASE("invalid configurations are rejected")
{
    RandomStream rng(0);
    const TimingConfig good{0.35_ms, 1.9_ms, Seconds{}};
    CHECK_THROWS_AS(simulate_transaction(Scene{Seconds(-1e-9L), 0.0}, kIdeal, kIdeal, good,
                                         kNoNoise, rng),
                    ConfigError);
    CHECK_THROWS_AS(simulate_transaction(Scene{5.0_ns, 2e-6}, kIdeal, kIdeal, good, kNoNoise, rng),
                    ConfigError);
    CHECK_THROWS_AS(simulate_transaction(Scene{5.0_ns, 0.0}, kIdeal, kIdeal,
                                         TimingConfig{Seconds{}, 1.9_ms, Seconds{}}, kNoNoise, rng),
                    ConfigError);
    CHECK_THROWS_AS(simulate_transaction(Scene{5.0_ns, 0.0}, ClockParams{Seconds{}, 5e-3}, kIdeal,
                                         good, kNoNoise, rng),
                    ConfigError);
}

TEST_CASE("short dt32 triggers a warning")
{
    const TimingConfig timing{1.0_us, 1.9_ms, Seconds{}};
    CHECK(timing.warnings(Scene{5.0_ns, 0.0}).size() == 1);
    CHECK(TimingConfig{0.35_ms, 1.9_ms, Seconds{}}.warnings(Scene{5.0_ns, 0.0}).empty());
}

TEST_CASE("property: DS estimate is invariant to constant-velocity motion")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> vbar(-1e-6, 1e-6);
    std::uniform_real_distribution<double> tof(0.0, 1e-6);
    for (int k = 0; k < 2000; ++k) {
        const Scene scene{Seconds(tof(rng)), vbar(rng)};
        const TimingConfig timing{Seconds(twr::testing::log_uniform(rng, 1e-5, 1e-1)),
                                  Seconds(twr::testing::log_uniform(rng, 1e-5, 1e-1)), Seconds{}};
        const TofEstimate est = estimate_ds(noise_free(scene, kIdeal, kIdeal, timing));
        CHECK(std::abs((est.tof - scene.tof_initial).count()) < 1e-18L);
    }
}

TEST_CASE("property: skew cancellation and SS bias in a static scene")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> skew(-1e-4, 1e-4);
    std::uniform_real_distribution<double> offset(-1.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const ClockParams ci{Seconds(offset(rng)), skew(rng)};
        const ClockParams cj{Seconds(offset(rng)), skew(rng)};
        const Scene scene{Seconds(twr::testing::log_uniform(rng, 1e-10, 1e-7)), 0.0};
        const TimingConfig timing{Seconds(twr::testing::log_uniform(rng, 1e-4, 1e-2)),
                                  Seconds(twr::testing::log_uniform(rng, 1e-4, 1e-2)), Seconds{}};
        const TimestampSet ts = noise_free(scene, ci, cj, timing);
        const time_rep scaled_tof = (1.0L + ci.skew) * scene.tof_initial.count();

        CHECK(std::abs(estimate_ds(ts).tof.count() - scaled_tof) < 1e-19L);
        const time_rep bias = 0.5L * (static_cast<time_rep>(ci.skew) - cj.skew) *
                              timing.dt32.count();
        CHECK(std::abs(estimate_ss(ts).tof.count() - scaled_tof - bias) < 1e-19L);
    }
}

TEST_CASE("SS and DS agree when the skew ratio reads exactly one")
{
    TimestampSet ts;
    ts.t1_i = Seconds(0);
    ts.t2_j = Seconds(7e-3L);
    ts.t3_j = Seconds(7.35e-3L);
    ts.t4_i = Seconds(3.6001e-4L);
    ts.t5_j = Seconds(9.25e-3L);
    ts.t6_i = ts.t4_i + (ts.t5_j - ts.t3_j);
    CHECK(estimate_ss(ts).tof == estimate_ds(ts).tof);
}

TEST_CASE("timestamp CSV row")
{
    const TimestampSet ts = noise_free(Scene{5.0_ns, 0.0}, kIdeal, kIdeal,
                                       TimingConfig{0.3_ms, 1.0_ms, Seconds{}});
    std::ostringstream os;
    os << timestamp_csv_header() << '\n';
    write_timestamp_csv_row(os, ts);
    const std::string text = os.str();
    CHECK(text.rfind("t1_i,t2_j,t3_j,t4_i,t5_j,t6_i,mode\n0,", 0) == 0);
    CHECK(text.find(",ds\n") != std::string::npos);

    TimestampSet ss = ts;
    ss.mode = TwrMode::SsOnly;
    std::ostringstream row;
    write_timestamp_csv_row(row, ss);
    CHECK(row.str().find(",,,ss_only\n") != std::string::npos);

    // extended precision survives the text form
    std::istringstream back(text.substr(text.find('\n') + 1));
    std::string field;
    for (int k = 0; k < 4; ++k) std::getline(back, field, ',');
    CHECK(parse_time(field.c_str(), nullptr) == ts.t4_i.count());
}
