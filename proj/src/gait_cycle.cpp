#include "gaitkit/gait_cycle.hpp"

#include <algorithm>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

struct Run {
  std::size_t begin = 0;  // first frame of the run
  std::size_t end = 0;    // one past the last frame
  bool stationary = false;
  std::size_t length() const { return end - begin; }
};

std::vector<Run> classify_runs(std::span<const double> speed, double threshold) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < speed.size(); ++i) {
    const bool stat = speed[i] <= threshold;
    if (runs.empty() || runs.back().stationary != stat) {
      runs.push_back({i, i + 1, stat});
    } else {
      runs.back().end = i + 1;
    }
  }
  return runs;
}

double stationary_threshold(std::span<const double> speed, double fraction) {
  const double max_speed = *std::max_element(speed.begin(), speed.end());
  return fraction * max_speed;
}

}  // namespace

std::vector<double> ankle_speed(const TrialRecording& rec, Leg leg) {
  validate_recording(rec);
  const Joint ankle = ankle_joint(leg);
  const auto& frames = rec.frames;
  const std::size_t n = frames.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!frames[i].has(ankle)) {
      raise(Errc::missing_joint, std::string(joint_name(ankle)) + " untracked at frame " +
                                     std::to_string(i) + "; fill gaps first");
    }
  }

  std::vector<double> raw(n);
  auto velocity = [&](std::size_t lo, std::size_t hi) {
    return (frames[hi].at(ankle) - frames[lo].at(ankle)) * (1.0 / (frames[hi].t - frames[lo].t));
  };
  raw[0] = velocity(0, 1).norm();
  raw[n - 1] = velocity(n - 2, n - 1).norm();
  for (std::size_t i = 1; i + 1 < n; ++i) raw[i] = velocity(i - 1, i + 1).norm();

  // 5-frame moving average, window clipped at the ends.
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(n - 1, i + 2);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += raw[k];
    smooth[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return smooth;
}

GaitEvents detect_gait_events(std::span<const double> speed, std::span<const double> t, Leg leg,
                              double threshold_fraction) {
  if (speed.size() != t.size()) raise(Errc::length_mismatch, "speed and time series differ in length");
  if (speed.size() < 4) {
    raise(Errc::too_few_frames, "series too short for a stationary-moving-stationary pattern");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    raise(Errc::invalid_params, "threshold fraction must be in (0,1)");
  }
  const double threshold = stationary_threshold(speed, threshold_fraction);
  if (threshold <= 0.0) raise(Errc::no_cycle_found, "ankle never moves");

  const auto runs = classify_runs(speed, threshold);

  // Candidate pattern: stationary run of >= 2 frames, then a moving run,
  // then another stationary run. A candidate whose stance is truncated by
  // the series start has an unobserved heel strike, so it only wins when it
  // is the sole option.
  const Run* fallback_hs = nullptr;
  const Run* fallback_ts = nullptr;
  for (std::size_t k = 0; k + 2 < runs.size(); ++k) {
    if (!runs[k].stationary || runs[k].length() < 2) continue;
    if (runs[k + 1].stationary || !runs[k + 2].stationary) continue;
    if (runs[k].begin == 0) {
      if (!fallback_hs) {
        fallback_hs = &runs[k];
        fallback_ts = &runs[k + 2];
      }
      continue;
    }
    return GaitEvents{leg, t[runs[k].begin], t[runs[k].end - 1], t[runs[k + 2].begin]};
  }
  if (fallback_hs) {
    return GaitEvents{leg, t[fallback_hs->begin], t[fallback_hs->end - 1], t[fallback_ts->begin]};
  }
  raise(Errc::no_cycle_found, "no stationary-moving-stationary ankle pattern");
}

std::vector<TimeInterval> stationary_intervals(std::span<const double> speed,
                                               std::span<const double> t,
                                               double threshold_fraction) {
  if (speed.empty()) return {};
  const double threshold = stationary_threshold(speed, threshold_fraction);
  std::vector<TimeInterval> intervals;
  for (const Run& run : classify_runs(speed, threshold)) {
    if (run.stationary) intervals.push_back({t[run.begin], t[run.end - 1]});
  }
  return intervals;
}

GaitCycle extract_cycle(const TrialRecording& rec, Leg leg, double threshold_fraction) {
  std::vector<double> t;
  t.reserve(rec.frames.size());
  for (const auto& frame : rec.frames) t.push_back(frame.t);

  const auto speed = ankle_speed(rec, leg);
  GaitCycle cycle;
  cycle.reference_leg = leg;
  cycle.events = detect_gait_events(speed, t, leg, threshold_fraction);

  const Leg contra = other_leg(leg);
  try {
    const auto contra_speed = ankle_speed(rec, contra);
    cycle.contra_stance = stationary_intervals(contra_speed, t, threshold_fraction);
    cycle.contra_events = detect_gait_events(contra_speed, t, contra, threshold_fraction);
  } catch (const Error&) {
    // Contralateral detection is best-effort; step width degrades gracefully.
  }

  for (const auto& frame : rec.frames) {
    if (frame.t >= cycle.events.t_hs && frame.t <= cycle.events.t_ts) cycle.frames.push_back(frame);
  }
  if (cycle.frames.size() < kMinCycleFrames) {
    raise(Errc::too_few_frames, "extracted cycle spans fewer than 10 frames");
  }
  return cycle;
}

}  // namespace gaitkit
