#include "twr/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "twr/errors.hpp"

namespace twr {

void Scene::validate() const
{
    if (tof_initial.count() < 0) {
        throw ConfigError("scene tof must be non-negative");
    }
    if (!std::isfinite(vbar) || std::abs(vbar) > kMaxVbar) {
        throw ConfigError("scene vbar must satisfy |vbar| <= 1e-6");
    }
}

void TimingConfig::validate() const
{
    if (dt32.count() <= 0) {
        throw ConfigError("timing dt32 must be positive");
    }
    if (dt53.count() <= 0) {
        throw ConfigError("timing dt53 must be positive");
    }
    if (processing_T.count() < 0) {
        throw ConfigError("timing processing_T must be non-negative");
    }
}

std::vector<std::string> TimingConfig::warnings(const Scene& scene) const
{
    std::vector<std::string> out;
    if (dt32.count() < 1000 * scene.tof_initial.count()) {
        out.emplace_back("dt32 is less than 1000x the time of flight; "
                         "small-skew approximations in the analytic models degrade");
    }
    return out;
}

void TimestampSet::validate() const
{
    if (!(t4_i > t1_i) || !(t3_j > t2_j)) {
        throw ConfigError("timestamps out of order: need t4_i > t1_i and t3_j > t2_j");
    }
    if (mode == TwrMode::Ds && (!(t5_j > t3_j) || !(t6_i > t4_i))) {
        throw ConfigError("timestamps out of order: need t5_j > t3_j and t6_i > t4_i");
    }
}

TimestampSet simulate_transaction(const Scene& scene, const ClockParams& clock_i,
                                  const ClockParams& clock_j, const TimingConfig& timing,
                                  const NoiseModel& noise, RandomStream& rng, TwrMode mode)
{
    scene.validate();
    clock_i.validate();
    clock_j.validate();
    timing.validate();
    noise.validate();

    const time_rep vbar = scene.vbar;
    const Seconds tof1 = scene.tof_initial;
    const Seconds tof2 = tof1 + vbar * timing.dt32;
    const Seconds tof3 = tof2 + vbar * timing.dt53;

    // true event times, origin at the first transmission
    const Seconds e1{};
    const Seconds e2 = tof1;
    const Seconds e3 = tof1 + timing.dt32;
    const Seconds e4 = e3 + tof2;
    const Seconds e5 = e3 + timing.dt53;
    const Seconds e6 = e5 + tof3;

    TimestampSet ts;
    ts.mode = mode;
    ts.t1_i = to_clock(e1, clock_i) + sample_noise(noise, rng);
    ts.t2_j = to_clock(e2, clock_j) + sample_noise(noise, rng);
    ts.t3_j = to_clock(e3, clock_j) + sample_noise(noise, rng);
    ts.t4_i = to_clock(e4, clock_i) + sample_noise(noise, rng);
    if (mode == TwrMode::Ds) {
        ts.t5_j = to_clock(e5, clock_j) + sample_noise(noise, rng);
        ts.t6_i = to_clock(e6, clock_i) + sample_noise(noise, rng);
    }
    return ts;
}

namespace {

TofEstimate make_estimate(Seconds tof, TwrProtocol protocol)
{
    return TofEstimate{tof, protocol, tof.to_double() * kSpeedOfLight};
}

}  // namespace

TofEstimate estimate_ss(const TimestampSet& ts)
{
    const Seconds round_trip = ts.t4_i - ts.t1_i;
    const Seconds reply = ts.t3_j - ts.t2_j;
    return make_estimate((round_trip - reply) / 2, TwrProtocol::SS);
}

TofEstimate estimate_ds(const TimestampSet& ts)
{
    if (ts.mode != TwrMode::Ds) {
        throw ConfigError("double-sided estimate needs all six timestamps");
    }
    const Seconds second_reply = ts.t5_j - ts.t3_j;
    if (second_reply.count() == 0) {
        throw DegenerateInterval("t5_j equals t3_j; skew ratio undefined");
    }
    const time_rep skew_ratio = (ts.t6_i - ts.t4_i) / second_reply;
    const Seconds round_trip = ts.t4_i - ts.t1_i;
    const Seconds reply = ts.t3_j - ts.t2_j;
    return make_estimate((round_trip - skew_ratio * reply) / 2, TwrProtocol::DS);
}

TofEstimate estimate(const TimestampSet& ts, TwrProtocol protocol)
{
    return protocol == TwrProtocol::SS ? estimate_ss(ts) : estimate_ds(ts);
}

std::string timestamp_csv_header() { return "t1_i,t2_j,t3_j,t4_i,t5_j,t6_i,mode"; }

void write_timestamp_csv_row(std::ostream& os, const TimestampSet& ts)
{
    auto put = [&](Seconds s) { os << format_time(s.count()); };
    const bool ds = ts.mode == TwrMode::Ds;
    put(ts.t1_i);
    os << ',';
    put(ts.t2_j);
    os << ',';
    put(ts.t3_j);
    os << ',';
    put(ts.t4_i);
    os << ',';
    if (ds) put(ts.t5_j);
    os << ',';
    if (ds) put(ts.t6_i);
    os << ',' << to_string(ts.mode) << '\n';
}

const char* to_string(TwrMode mode) { return mode == TwrMode::Ds ? "ds" : "ss_only"; }
const char* to_string(TwrProtocol protocol) { return protocol == TwrProtocol::DS ? "DS" : "SS"; }

}  // namespace twr
