#pragma once

// Versioned default parameter set. data/defaults.json mirrors these values and
// a unit test keeps the two in sync; bump kDefaultsVersion on any change.

namespace oim::defaults {

inline constexpr const char* kDefaultsVersion = "1";

inline constexpr double kCoupling = 1.0;
inline constexpr double kSyncLevel = 2.0;
inline constexpr double kNoiseAmp = 0.8;
inline constexpr double kVariability = 0.0;
inline constexpr double kCycles = 1000.0;
inline constexpr int kStepsPerCycle = 100;

inline constexpr int kRuns = 100;
inline constexpr int kHistogramBins = 50;
inline constexpr int kMaxTracePoints = 10000;

inline constexpr double kSaFinalTemperature = 1e-3;
inline constexpr long long kSaIterations = 10'000'000;

}  // namespace oim::defaults
