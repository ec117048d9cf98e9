#include "gaitkit/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

constexpr double kMinSegmentLength = 0.01;  // 1 cm

double angle_between_deg(const Vec3& u, const Vec3& v) {
  // atan2 of cross/dot is well conditioned near 0 and 180 degrees.
  const double c = u.cross(v).norm();
  const double d = u.dot(v);
  return std::atan2(c, d) * 180.0 / std::numbers::pi;
}

const Vec3& joint_pos(const SkeletalFrame& frame, Joint j, std::size_t index) {
  if (!frame.has(j)) {
    raise(Errc::missing_joint,
          std::string(joint_name(j)) + " untracked at cycle frame " + std::to_string(index));
  }
  return frame.at(j);
}

AngleSeries angle_series(const GaitCycle& cycle, Leg leg, AngleJoint which) {
  AngleSeries series;
  series.joint = which;
  series.leg = leg;
  series.values_deg.reserve(cycle.frames.size());
  series.t.reserve(cycle.frames.size());
  const Vec3 down{0.0, 0.0, -1.0};
  for (std::size_t i = 0; i < cycle.frames.size(); ++i) {
    const auto& frame = cycle.frames[i];
    const Vec3 hip = joint_pos(frame, hip_joint(leg), i);
    const Vec3 knee = joint_pos(frame, knee_joint(leg), i);
    const Vec3 thigh = knee - hip;
    if (thigh.norm() < kMinSegmentLength) {
      raise(Errc::degenerate_segment, "thigh segment shorter than 1 cm at frame " + std::to_string(i));
    }
    double value = 0.0;
    if (which == AngleJoint::Hip) {
      value = angle_between_deg(thigh, down);
    } else {
      const Vec3 ankle = joint_pos(frame, ankle_joint(leg), i);
      const Vec3 shank = ankle - knee;
      if (shank.norm() < kMinSegmentLength) {
        raise(Errc::degenerate_segment, "shank segment shorter than 1 cm at frame " + std::to_string(i));
      }
      value = angle_between_deg(thigh, shank);
    }
    series.values_deg.push_back(value);
    series.t.push_back(frame.t);
  }
  return series;
}

}  // namespace

AngleSeries knee_angle_series(const GaitCycle& cycle, Leg leg) {
  return angle_series(cycle, leg, AngleJoint::Knee);
}

AngleSeries hip_angle_series(const GaitCycle& cycle, Leg leg) {
  return angle_series(cycle, leg, AngleJoint::Hip);
}

double range_of_motion(const AngleSeries& series) {
  if (series.values_deg.empty()) raise(Errc::too_few, "empty angle series");
  double lo = series.values_deg[0];
  double hi = series.values_deg[0];
  for (double v : series.values_deg) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

TimeDistanceIndices time_distance_indices(const GaitCycle& cycle, double height_cm) {
  if (!(height_cm > 0.0)) raise(Errc::invalid_params, "height must be positive");
  if (cycle.frames.empty()) raise(Errc::too_few_frames, "cycle has no frames");

  const Joint ankle = ankle_joint(cycle.reference_leg);
  const Vec3 start = joint_pos(cycle.frames.front(), ankle, 0);
  const Vec3 end = joint_pos(cycle.frames.back(), ankle, cycle.frames.size() - 1);
  const double stride = (end - start).norm();
  const double cycle_time = cycle.cycle_time();
  const double height_m = height_cm / 100.0;

  TimeDistanceIndices out;
  out.l_n = stride / height_m;
  out.v_n = stride / cycle_time / height_m;
  out.s = cycle.stance_fraction();

  // First double-support window: the overlap of the reference stance
  // [t_hs, t_to] with a contralateral stationary interval.
  const double stance_lo = cycle.events.t_hs;
  const double stance_hi = cycle.events.t_to;
  for (const auto& interval : cycle.contra_stance) {
    const double lo = std::max(stance_lo, interval.start);
    const double hi = std::min(stance_hi, interval.end);
    if (lo >= hi) continue;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& frame : cycle.frames) {
      if (frame.t < lo || frame.t > hi) continue;
      if (!frame.has(Joint::AnkleLeft) || !frame.has(Joint::AnkleRight)) continue;
      sum += std::fabs(frame.at(Joint::AnkleLeft).x - frame.at(Joint::AnkleRight).x);
      ++count;
    }
    if (count > 0) {
      out.w = sum / static_cast<double>(count);
      break;
    }
  }
  return out;
}

GaitIndexSet index_set(const GaitCycle& cycle, const SubjectRecord& subject) {
  const auto td = time_distance_indices(cycle, subject.height_cm);
  GaitIndexSet set;
  set.v_n = td.v_n;
  set.l_n = td.l_n;
  set.s = td.s;
  set.w = td.w;
  set.rom_hip = range_of_motion(hip_angle_series(cycle, cycle.reference_leg));
  set.rom_knee = range_of_motion(knee_angle_series(cycle, cycle.reference_leg));
  return set;
}

}  // namespace gaitkit
