#include "gaitkit/synth.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quintic smoothstep: zero first and second derivative at both ends, so the
// ankle speed is continuous entering and leaving swing.
double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }

double quantize6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  double out = 0.0;
  std::from_chars(buf, buf + sizeof(buf), out);
  return out;
}

struct GaitModel {
  const SynthParams& p;
  double swing_time;

  explicit GaitModel(const SynthParams& params)
      : p(params), swing_time((1.0 - params.stance_fraction) * params.cycle_time_s) {}

  // Left ankle y at model time tau; cycle k occupies [k*T, (k+1)*T) with the
  // stance phase first. Extends periodically to negative tau.
  double ankle_y(double tau) const {
    const double T = p.cycle_time_s;
    const double k = std::floor(tau / T);
    const double phase = tau - k * T;
    const double stance_end = p.stance_fraction * T;
    double progress = 0.0;
    if (phase > stance_end) progress = smoothstep((phase - stance_end) / swing_time);
    return (k + progress) * p.stride_length_m;
  }

  double ankle_z(double tau) const {
    const double T = p.cycle_time_s;
    const double phase = tau - std::floor(tau / T) * T;
    const double stance_end = p.stance_fraction * T;
    if (phase <= stance_end) return 0.0;
    const double u = (phase - stance_end) / swing_time;
    const double s = std::sin(std::numbers::pi * u);
    return p.swing_lift_m * s * s;
  }

  Vec3 ankle(double tau, Leg leg) const {
    if (leg == Leg::Right) {
      const double shifted = tau - 0.5 * p.cycle_time_s;
      return {-0.5 * p.step_width_m, ankle_y(shifted) + 0.5 * p.stride_length_m,
              ankle_z(shifted)};
    }
    return {0.5 * p.step_width_m, ankle_y(tau), ankle_z(tau)};
  }

  double hip_angle_deg(double tau) const {
    return p.hip.base_deg + 0.5 * p.hip.amplitude_deg * std::cos(kTwoPi * tau / p.cycle_time_s);
  }

  double knee_angle_deg(double tau) const {
    return p.knee.base_deg +
           0.5 * p.knee.amplitude_deg * (1.0 - std::cos(kTwoPi * tau / p.cycle_time_s));
  }

  // Unit vector in the sagittal plane at polar angle phi from straight down.
  static Vec3 sagittal_dir(double phi_deg) {
    const double phi = phi_deg * std::numbers::pi / 180.0;
    return {0.0, std::sin(phi), -std::cos(phi)};
  }

  void place_leg(double tau, Leg leg, Vec3& hip, Vec3& knee, Vec3& ankle_out) const {
    const double leg_tau = leg == Leg::Left ? tau : tau - 0.5 * p.cycle_time_s;
    const double theta_h = hip_angle_deg(leg_tau);
    const double theta_k = knee_angle_deg(leg_tau);
    const Vec3 thigh = sagittal_dir(theta_h) * p.thigh_length_m;
    const Vec3 shank = sagittal_dir(theta_h - theta_k) * p.shank_length_m;
    ankle_out = ankle(tau, leg);
    hip = ankle_out - thigh - shank;
    knee = hip + thigh;
  }
};

void validate_params(const SynthParams& p) {
  const bool positive = p.stride_length_m > 0.0 && p.cycle_time_s > 0.0 && p.step_width_m > 0.0 &&
                        p.fps > 0.0 && p.thigh_length_m > 0.0 && p.shank_length_m > 0.0;
  if (!positive) raise(Errc::invalid_params, "lengths, times, and fps must be positive");
  if (!(p.stance_fraction > 0.0 && p.stance_fraction < 1.0)) {
    raise(Errc::invalid_params, "stance_fraction must lie in (0,1)");
  }
  if (p.n_cycles < 1) raise(Errc::invalid_params, "need at least one cycle");
  if (p.noise_sd_m < 0.0 || p.swing_lift_m < 0.0) {
    raise(Errc::invalid_params, "noise and lift must be nonnegative");
  }
  if (p.hip.amplitude_deg < 0.0 || p.knee.amplitude_deg < 0.0) {
    raise(Errc::invalid_params, "angle amplitudes must be nonnegative");
  }
  if (p.hip.base_deg - 0.5 * p.hip.amplitude_deg < 0.0) {
    raise(Errc::invalid_params, "hip profile must stay nonnegative (base >= amplitude/2)");
  }
  if (p.knee.base_deg < 0.0) raise(Errc::invalid_params, "knee base must be nonnegative");
  if (p.hip.base_deg + 0.5 * p.hip.amplitude_deg >= 179.0 ||
      p.knee.base_deg + p.knee.amplitude_deg >= 179.0) {
    raise(Errc::invalid_params, "angle profile exceeds the anatomical range");
  }
}

}  // namespace

SynthResult synthesize_trial(const SynthParams& params) {
  validate_params(params);
  const GaitModel model(params);
  const double T = params.cycle_time_s;

  // Start the recording mid-swing of the left leg so the first observed
  // stationary run begins at a true heel strike; keep a settle tail long
  // enough for both legs' final terminal-swing rests to be visible.
  const auto frames_of = [&](double seconds) {
    return static_cast<std::size_t>(std::ceil(seconds * params.fps - 1e-9));
  };
  const std::size_t lead_frames = frames_of(0.5 * model.swing_time);
  const std::size_t tail_frames =
      frames_of(0.5 * T + 0.5 * params.stance_fraction * T);
  const std::size_t cycle_frames =
      static_cast<std::size_t>(std::llround(params.n_cycles * T * params.fps));
  const std::size_t n_frames = lead_frames + cycle_frames + tail_frames + 1;
  const double lead = static_cast<double>(lead_frames) / params.fps;

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> noise(0.0, params.noise_sd_m);
  const bool noisy = params.noise_sd_m > 0.0;

  TrialRecording rec;
  rec.subject_id = params.subject_id;
  rec.trial_no = params.trial_no;
  rec.joints = mandatory_joint_mask();
  rec.frames.reserve(n_frames);

  for (std::size_t i = 0; i < n_frames; ++i) {
    const double t = static_cast<double>(i) / params.fps;
    const double tau = t - lead;
    SkeletalFrame frame;
    frame.t = params.quantize_output ? quantize6(t) : t;
    for (Leg leg : {Leg::Left, Leg::Right}) {
      Vec3 hip, knee, ankle;
      model.place_leg(tau, leg, hip, knee, ankle);
      const std::array<std::pair<Joint, Vec3>, 3> placements{
          {{hip_joint(leg), hip}, {knee_joint(leg), knee}, {ankle_joint(leg), ankle}}};
      for (const auto& [joint, pos] : placements) {
        Vec3 p = pos;
        if (noisy) p = p + Vec3{noise(rng), noise(rng), noise(rng)};
        if (params.quantize_output) p = {quantize6(p.x), quantize6(p.y), quantize6(p.z)};
        frame.set(joint, p);
      }
    }
    rec.frames.push_back(frame);
  }
  rec.nominal_fps = infer_fps(rec.frames);

  SynthResult result;
  result.recording = std::move(rec);

  SynthGroundTruth& truth = result.truth;
  truth.stride_length_m = params.stride_length_m;
  truth.cycle_time_s = T;
  truth.stance_fraction = params.stance_fraction;
  truth.step_width_m = params.step_width_m;
  truth.rom_hip_deg = params.hip.amplitude_deg;
  truth.rom_knee_deg = params.knee.amplitude_deg;
  for (int k = 0; k < params.n_cycles; ++k) {
    const double hs = lead + k * T;
    truth.left_events.push_back(
        {Leg::Left, hs, hs + params.stance_fraction * T, hs + T});
    const double hs_r = hs + 0.5 * T;
    truth.right_events.push_back(
        {Leg::Right, hs_r, hs_r + params.stance_fraction * T, hs_r + T});
  }
  const Vec3 cycle_start = model.ankle(0.0, Leg::Left);
  const Vec3 cycle_end = model.ankle(T, Leg::Left);
  truth.ankle_displacement_m = (cycle_end - cycle_start).norm();
  return result;
}

}  // namespace gaitkit
