#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace twr {

/// Storage type for time values (binary128, 113-bit significand).
using time_rep = __float128;

/// Shortest decimal text that reads back to the same value.
std::string format_time(time_rep v);
/// strtod-style parse; `end` receives the first unparsed character.
time_rep parse_time(const char* text, char** end);

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// A squared duration (s^2). Only produced for variances.
struct SquaredSeconds {
    double value = 0.0;

    friend constexpr auto operator<=>(SquaredSeconds, SquaredSeconds) = default;
};

/// A finite duration or relative time instant in seconds.
class Seconds {
public:
    constexpr Seconds() = default;
    /// Throws ConfigError on NaN or infinity.
    explicit Seconds(time_rep value);

    constexpr time_rep count() const { return value_; }
    constexpr double to_double() const { return static_cast<double>(value_); }

    constexpr Seconds operator-() const { return raw(-value_); }
    constexpr Seconds& operator+=(Seconds o) { value_ += o.value_; return *this; }
    constexpr Seconds& operator-=(Seconds o) { value_ -= o.value_; return *this; }

    friend constexpr Seconds operator+(Seconds a, Seconds b) { return raw(a.value_ + b.value_); }
    friend constexpr Seconds operator-(Seconds a, Seconds b) { return raw(a.value_ - b.value_); }
    friend constexpr Seconds operator*(Seconds a, time_rep k) { return raw(a.value_ * k); }
    friend constexpr Seconds operator*(time_rep k, Seconds a) { return raw(k * a.value_); }
    friend constexpr Seconds operator/(Seconds a, time_rep k) { return raw(a.value_ / k); }
    /// Ratio of two durations (dimensionless).
    friend constexpr time_rep operator/(Seconds a, Seconds b) { return a.value_ / b.value_; }
    friend constexpr SquaredSeconds operator*(Seconds a, Seconds b)
    {
        return SquaredSeconds{static_cast<double>(a.value_ * b.value_)};
    }

    friend constexpr auto operator<=>(Seconds, Seconds) = default;

private:
    static constexpr Seconds raw(time_rep v)
    {
        Seconds s;
        s.value_ = v;
        return s;
    }

    time_rep value_ = 0;
};

namespace literals {
inline Seconds operator""_s(long double v) { return Seconds(v); }
inline Seconds operator""_ms(long double v) { return Seconds(v * 1e-3L); }
inline Seconds operator""_us(long double v) { return Seconds(v * 1e-6L); }
inline Seconds operator""_ns(long double v) { return Seconds(v * 1e-9L); }
inline Seconds operator""_ps(long double v) { return Seconds(v * 1e-12L); }
}  // namespace literals

/// Length travelled by light in `t`, in centimetres.
inline double to_centimeters(Seconds t) { return t.to_double() * kSpeedOfLight * 100.0; }
/// Variance in s^2 converted to cm^2.
inline double to_square_centimeters(SquaredSeconds v)
{
    const double c_cm = kSpeedOfLight * 100.0;
    return v.value * c_cm * c_cm;
}

/// Clock offset and skew of one transceiver, with skew held constant for the
/// duration of a transaction.
struct ClockParams {
    Seconds offset{};   ///< offset at the transaction origin
    double skew = 0.0;  ///< rate error, dimensionless (20e-6 == 20 ppm)

    static constexpr double kMaxSkew = 1e-3;

    /// Throws ConfigError if |skew| >= 1e-3.
    void validate() const;
};

/// Maps elapsed true time since the transaction origin onto the clock:
/// t + offset + skew * t.
Seconds to_clock(Seconds t, const ClockParams& clock);

enum class NoiseDistribution { Gaussian, Uniform, None };

struct NoiseModel {
    SquaredSeconds variance{};
    NoiseDistribution distribution = NoiseDistribution::Gaussian;
    /// Rounding granularity applied to each draw; unset means no rounding.
    std::optional<Seconds> quantization_tick;

    void validate() const;
};

/// Seedable pseudorandom stream. One instance per worker; never shared.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Independent stream for worker `index` under master seed `seed`.
    static RandomStream for_worker(std::uint64_t seed, std::uint64_t index);

    double standard_normal() { return normal_(engine_); }
    /// Uniform on [-1, 1).
    double symmetric_uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
};

/// One zero-mean timestamping-noise draw.
Seconds sample_noise(const NoiseModel& model, RandomStream& rng);

}  // namespace twr
