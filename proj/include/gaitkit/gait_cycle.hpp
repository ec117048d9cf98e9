#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gaitkit/types.hpp"

namespace gaitkit {

struct GaitEvents {
  Leg leg = Leg::Left;
  double t_hs = 0.0;  // heel strike: ankle comes to rest on the ground
  double t_to = 0.0;  // toe off: ankle starts moving
  double t_ts = 0.0;  // terminal swing: ankle comes to rest again
};

struct TimeInterval {
  double start = 0.0;
  double end = 0.0;
};

struct GaitCycle {
  GaitEvents events;                        // reference leg
  std::optional<GaitEvents> contra_events;  // other leg, when detectable
  std::vector<TimeInterval> contra_stance;  // stationary intervals of the other ankle
  std::vector<SkeletalFrame> frames;        // frames within [t_hs, t_ts]
  Leg reference_leg = Leg::Left;

  double cycle_time() const { return events.t_ts - events.t_hs; }
  double stance_fraction() const { return (events.t_to - events.t_hs) / cycle_time(); }
};

inline constexpr double kDefaultStationaryFraction = 0.15;
inline constexpr std::size_t kMinCycleFrames = 10;

// Ankle speed series: magnitude of the central-difference velocity
// (one-sided at the endpoints), smoothed with a 5-frame moving average.
std::vector<double> ankle_speed(const TrialRecording& rec, Leg leg);

// Classifies frames as stationary when speed <= threshold_fraction * max
// (a frame exactly at the threshold counts as stationary) and returns the
// first complete stationary-moving-stationary pattern. A leading stationary
// run cut off by the start of the series is only used when no later
// complete pattern exists.
GaitEvents detect_gait_events(std::span<const double> speed, std::span<const double> t, Leg leg,
                              double threshold_fraction = kDefaultStationaryFraction);

// Stationary intervals of the classification above, in time order.
std::vector<TimeInterval> stationary_intervals(std::span<const double> speed,
                                               std::span<const double> t,
                                               double threshold_fraction = kDefaultStationaryFraction);

// Detects events for the chosen leg, gathers the frames spanning
// [t_hs, t_ts], and records the contralateral ankle's stationary intervals
// (needed for the step-width double-support window).
GaitCycle extract_cycle(const TrialRecording& rec, Leg leg,
                        double threshold_fraction = kDefaultStationaryFraction);

}  // namespace gaitkit
