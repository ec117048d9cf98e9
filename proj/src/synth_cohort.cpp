#include <algorithm>
#include <cmath>
#include <random>

#include "gaitkit/error.hpp"
#include "gaitkit/synth.hpp"

namespace gaitkit {

GroupGaitParams default_control_gait() { return GroupGaitParams{}; }

GroupGaitParams default_patient_gait() {
  GroupGaitParams p;
  p.stride_mean = 0.72;
  p.stride_sd = 0.05;
  p.cycle_time_mean = 1.55;
  p.cycle_time_sd = 0.07;
  p.stance_mean = 0.66;
  p.stance_sd = 0.015;
  p.width_mean = 0.80;
  p.width_sd = 0.05;
  p.hip = {24.0, 22.0};
  p.knee = {10.0, 34.0};
  p.swing_lift_m = 0.035;
  p.trial_jitter = 0.015;
  return p;
}

namespace {

double clamped_normal(std::mt19937_64& rng, double mean, double sd, double lo, double hi) {
  std::normal_distribution<double> dist(mean, sd);
  return std::clamp(dist(rng), lo, hi);
}

}  // namespace

SynthCohort synthesize_cohort(const CohortSynthParams& params) {
  if (params.n_patients == 0 || params.n_controls == 0 || params.trials_per_patient == 0 ||
      params.trials_per_control == 0) {
    raise(Errc::invalid_params, "cohort needs at least one subject and trial per group");
  }
  std::mt19937_64 rng(params.seed);
  SynthCohort cohort;

  struct SubjectDraw {
    SubjectRecord record;
    SynthParams base;
    double speed = 0.0;
  };
  std::vector<SubjectDraw> draws;

  auto draw_subject = [&](Group group, std::size_t ordinal) {
    const GroupGaitParams& g = group == Group::Patient ? params.patient : params.control;
    SubjectDraw d;
    d.record.subject_id =
        (group == Group::Patient ? "P" : "C") + std::to_string(ordinal + 1);
    d.record.group = group;
    d.record.sex = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.85 ? "F" : "M";
    d.record.age = std::round(clamped_normal(rng, 60.0, 10.0, 35.0, 82.0));
    d.record.height_cm = std::round(clamped_normal(rng, 165.0, 9.0, 146.0, 186.0));
    d.record.weight_kg = std::round(clamped_normal(rng, 72.0, 14.0, 48.0, 135.0));

    SynthParams& p = d.base;
    p.stride_length_m = clamped_normal(rng, g.stride_mean, g.stride_sd, 0.3, 1.6);
    p.cycle_time_s = clamped_normal(rng, g.cycle_time_mean, g.cycle_time_sd, 0.8, 2.2);
    p.stance_fraction = clamped_normal(rng, g.stance_mean, g.stance_sd, 0.52, 0.74);
    p.step_width_m = clamped_normal(rng, g.width_mean, g.width_sd, 0.15, 1.2);
    p.hip = {g.hip.base_deg,
             clamped_normal(rng, g.hip.amplitude_deg, g.hip_amplitude_sd, 5.0,
                            2.0 * g.hip.base_deg)};
    p.knee = {g.knee.base_deg, clamped_normal(rng, g.knee.amplitude_deg, g.knee_amplitude_sd,
                                              5.0, 160.0 - g.knee.base_deg)};
    p.swing_lift_m = g.swing_lift_m;
    p.fps = params.fps;
    p.n_cycles = params.n_cycles;
    p.noise_sd_m = params.noise_sd_m;
    p.subject_id = d.record.subject_id;
    d.speed = p.stride_length_m / p.cycle_time_s;
    draws.push_back(std::move(d));
  };

  for (std::size_t i = 0; i < params.n_patients; ++i) draw_subject(Group::Patient, i);
  for (std::size_t i = 0; i < params.n_controls; ++i) draw_subject(Group::Control, i);

  // Clinical scores grow as a patient's walking speed falls off the typical
  // control speed.
  const double control_speed =
      params.control.stride_mean / params.control.cycle_time_mean;
  for (auto& d : draws) {
    if (d.record.group != Group::Patient) continue;
    const double slowdown = std::clamp(1.0 - d.speed / control_speed, 0.0, 1.0);
    const double wobble = std::normal_distribution<double>(0.0, 0.05)(rng);
    d.record.ambulation_score =
        static_cast<int>(std::clamp(std::round(9.0 * (slowdown + wobble)), 0.0, 9.0));
    d.record.msws = std::clamp(100.0 * (slowdown + wobble) + 10.0, 0.0, 100.0);
  }

  for (const auto& d : draws) cohort.subjects.push_back(d.record);
  for (std::size_t i = 0; i < std::min(params.n_patients, params.n_controls); ++i) {
    cohort.pairing.emplace_back("P" + std::to_string(i + 1), "C" + std::to_string(i + 1));
  }

  for (const auto& d : draws) {
    const std::size_t n_trials = d.record.group == Group::Patient ? params.trials_per_patient
                                                                  : params.trials_per_control;
    const GroupGaitParams& g =
        d.record.group == Group::Patient ? params.patient : params.control;
    for (std::size_t t = 0; t < n_trials; ++t) {
      SynthParams p = d.base;
      p.trial_no = static_cast<int>(t + 1);
      const double jitter = g.trial_jitter;
      p.stride_length_m *= 1.0 + std::normal_distribution<double>(0.0, jitter)(rng);
      p.cycle_time_s *= 1.0 + std::normal_distribution<double>(0.0, jitter)(rng);
      p.stance_fraction = std::clamp(
          p.stance_fraction + std::normal_distribution<double>(0.0, 0.004)(rng), 0.52, 0.74);
      p.step_width_m = std::max(
          0.1, p.step_width_m + std::normal_distribution<double>(0.0, 0.01)(rng));
      p.seed = rng();
      cohort.trials.push_back(synthesize_trial(p));
    }
  }
  return cohort;
}

}  // namespace gaitkit
