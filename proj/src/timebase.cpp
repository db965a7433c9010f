#include "twr/timebase.hpp"

#include <quadmath.h>

#include <cmath>
#include <string>

#include "twr/errors.hpp"

namespace twr {

Seconds::Seconds(time_rep value) : value_(value)
{
    if (!finiteq(value)) {
        throw ConfigError("time value must be finite");
    }
}

std::string format_time(time_rep v)
{
    char buf[64];
    quadmath_snprintf(buf, sizeof buf, "%.36Qg", v);
    return buf;
}

time_rep parse_time(const char* text, char** end) { return strtoflt128(text, end); }

void ClockParams::validate() const
{
    if (!std::isfinite(skew) || std::abs(skew) >= kMaxSkew) {
        throw ConfigError("clock skew " + std::to_string(skew) + " outside +/-1000 ppm");
    }
}

Seconds to_clock(Seconds t, const ClockParams& clock)
{
    return t + clock.offset + t * static_cast<time_rep>(clock.skew);
}

void NoiseModel::validate() const
{
    if (!std::isfinite(variance.value) || variance.value < 0.0) {
        throw ConfigError("noise variance must be finite and non-negative");
    }
    if (quantization_tick && quantization_tick->count() <= 0) {
        throw ConfigError("quantization tick must be positive");
    }
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::for_worker(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    RandomStream stream(0);
    stream.engine_.seed(seq);
    return stream;
}

Seconds sample_noise(const NoiseModel& model, RandomStream& rng)
{
    double draw = 0.0;
    switch (model.distribution) {
    case NoiseDistribution::None:
        return Seconds{};
    case NoiseDistribution::Gaussian:
        draw = std::sqrt(model.variance.value) * rng.standard_normal();
        break;
    case NoiseDistribution::Uniform:
        // U(-a, a) has variance a^2 / 3
        draw = std::sqrt(3.0 * model.variance.value) * rng.symmetric_uniform();
        break;
    }
    Seconds noise(draw);
    if (model.quantization_tick) {
        const time_rep tick = model.quantization_tick->count();
        noise = Seconds(roundq(noise.count() / tick) * tick);
    }
    return noise;
}

}  // namespace twr
