#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twr/timebase.hpp"

namespace twr {

/// Geometry of one transaction: initial time of flight and constant radial
/// velocity expressed as a fraction of the speed of light.
struct Scene {
    Seconds tof_initial{};
    double vbar = 0.0;

    static constexpr double kMaxVbar = 1e-6;

    void validate() const;
};

/// Programmed response delays and per-measurement processing time.
struct TimingConfig {
    Seconds dt32{};
    Seconds dt53{};
    Seconds processing_T{};

    void validate() const;
    /// Soft-constraint messages (e.g. dt32 not much larger than the ToF).
    std::vector<std::string> warnings(const Scene& scene) const;

    /// Session time consumed by one DS transaction: T + dt32 + dt53.
    Seconds cycle() const { return processing_T + dt32 + dt53; }
};

enum class TwrMode { SsOnly, Ds };
enum class TwrProtocol { SS, DS };

/// Noisy timestamps of one transaction. t1/t4/t6 are read on transceiver i's
/// clock and t2/t3/t5 on transceiver j's. For SsOnly, t5_j and t6_i are unused.
struct TimestampSet {
    Seconds t1_i{}, t2_j{}, t3_j{}, t4_i{}, t5_j{}, t6_i{};
    TwrMode mode = TwrMode::Ds;

    /// Throws ConfigError if the timestamps are out of order.
    void validate() const;
};

struct TofEstimate {
    Seconds tof{};
    TwrProtocol protocol = TwrProtocol::SS;
    double range_m = 0.0;
};

/// Builds exact event times (with constant-velocity motion), maps each onto
/// its owner's clock and adds an independent noise draw. Draws are taken in
/// timestamp order 1..6 (1..4 for SsOnly).
TimestampSet simulate_transaction(const Scene& scene, const ClockParams& clock_i,
                                  const ClockParams& clock_j, const TimingConfig& timing,
                                  const NoiseModel& noise, RandomStream& rng,
                                  TwrMode mode = TwrMode::Ds);

/// Single-sided estimate: ((t4-t1) - (t3-t2)) / 2.
TofEstimate estimate_ss(const TimestampSet& ts);

/// Double-sided estimate: ((t4-t1) - (t6-t4)/(t5-t3) * (t3-t2)) / 2.
/// Throws DegenerateInterval when t5 == t3, ConfigError for SsOnly sets.
TofEstimate estimate_ds(const TimestampSet& ts);

TofEstimate estimate(const TimestampSet& ts, TwrProtocol protocol);

/// CSV row schema: t1_i,t2_j,t3_j,t4_i,t5_j,t6_i,mode
std::string timestamp_csv_header();
void write_timestamp_csv_row(std::ostream& os, const TimestampSet& ts);

const char* to_string(TwrMode mode);
const char* to_string(TwrProtocol protocol);

}  // namespace twr
