#pragma once

#include <cstdint>

namespace dris {

// Simulated time in integer microseconds. Schedules, latencies and trace
// timestamps are all quantized to this unit so runs are bit-reproducible.
using SimTime = std::uint64_t;

constexpr SimTime kMicrosPerSecond = 1'000'000;
constexpr SimTime kMicrosPerMilli = 1'000;
constexpr SimTime kSecondsPerDay = 86'400;

constexpr SimTime seconds(std::uint64_t s) { return s * kMicrosPerSecond; }
constexpr SimTime millis(std::uint64_t ms) { return ms * kMicrosPerMilli; }
constexpr std::uint64_t to_whole_seconds(SimTime t) { return t / kMicrosPerSecond; }

}  // namespace dris
