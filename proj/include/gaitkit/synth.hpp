#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitkit/gait_cycle.hpp"
#include "gaitkit/types.hpp"

namespace gaitkit {

// Periodic joint-angle profile in degrees: for the hip,
// base + amplitude/2 * cos(2*pi*phase); for the knee,
// base + amplitude/2 * (1 - cos(2*pi*phase)). Both sweep exactly
// `amplitude` degrees over a cycle.
struct AngleProfile {
  double base_deg = 0.0;
  double amplitude_deg = 0.0;
};

struct SynthParams {
  double stride_length_m = 0.9;
  double cycle_time_s = 1.5;
  double stance_fraction = 0.6;
  double step_width_m = 0.2;
  AngleProfile hip{18.0, 24.0};
  AngleProfile knee{6.0, 34.0};
  double fps = 30.0;
  int n_cycles = 2;
  double noise_sd_m = 0.0;
  double swing_lift_m = 0.04;
  double thigh_length_m = 0.45;
  double shank_length_m = 0.43;
  std::uint64_t seed = 0;
  // Round emitted samples to 6 fractional digits so a serialize/parse round
  // trip reproduces the recording exactly. Disable for tests that need the
  // raw double-precision kinematics.
  bool quantize_output = true;
  std::string subject_id = "synthetic";
  int trial_no = 1;
};

struct SynthGroundTruth {
  std::vector<GaitEvents> left_events;   // one entry per complete cycle
  std::vector<GaitEvents> right_events;
  double stride_length_m = 0.0;
  double cycle_time_s = 0.0;
  double stance_fraction = 0.0;
  double step_width_m = 0.0;
  double rom_hip_deg = 0.0;
  double rom_knee_deg = 0.0;
  // Straight-line ankle displacement over the first left cycle, from the
  // continuous model (the emitted frames add quantization and noise).
  double ankle_displacement_m = 0.0;
};

struct SynthResult {
  TrialRecording recording;
  SynthGroundTruth truth;
};

// Builds a kinematically consistent walking trial: the ankles are pinned
// during stance and advance one stride per cycle along y through a smooth
// swing; hip and knee positions are placed so the joint angles follow the
// requested profiles exactly. Gaussian position noise is added per
// coordinate when noise_sd_m > 0.
SynthResult synthesize_trial(const SynthParams& params);

// --- cohort fixtures ------------------------------------------------------

// Subject-level spread of gait parameters within one group.
struct GroupGaitParams {
  double stride_mean = 1.0;
  double stride_sd = 0.06;
  double cycle_time_mean = 1.25;
  double cycle_time_sd = 0.05;
  double stance_mean = 0.58;
  double stance_sd = 0.012;
  double width_mean = 0.52;
  double width_sd = 0.05;
  AngleProfile hip{17.0, 30.0};
  double hip_amplitude_sd = 1.5;
  AngleProfile knee{4.0, 46.0};
  double knee_amplitude_sd = 2.0;
  double swing_lift_m = 0.05;
  double trial_jitter = 0.01;  // relative per-trial spread of stride and cycle time
};

GroupGaitParams default_control_gait();
GroupGaitParams default_patient_gait();

struct CohortSynthParams {
  std::size_t n_patients = 10;
  std::size_t trials_per_patient = 5;
  std::size_t n_controls = 10;
  std::size_t trials_per_control = 5;
  GroupGaitParams patient = default_patient_gait();
  GroupGaitParams control = default_control_gait();
  double noise_sd_m = 0.0;
  double fps = 30.0;
  int n_cycles = 3;
  std::uint64_t seed = 0;
};

struct SynthCohort {
  std::vector<SubjectRecord> subjects;
  std::vector<SynthResult> trials;  // recording carries subject_id / trial_no
  std::vector<std::pair<std::string, std::string>> pairing;
};

// Draws per-subject gait parameters from the group distributions (patients
// slower, wider, with a higher stance fraction and shifted angle patterns),
// adds per-trial jitter, and assigns clinical scores that grow with the
// subject's slowdown.
SynthCohort synthesize_cohort(const CohortSynthParams& params);

}  // namespace gaitkit
