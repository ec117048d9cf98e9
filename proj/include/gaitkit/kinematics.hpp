#pragma once

#include <optional>
#include <vector>

#include "gaitkit/gait_cycle.hpp"
#include "gaitkit/types.hpp"

namespace gaitkit {

enum class AngleJoint { Hip, Knee };

inline const char* angle_joint_name(AngleJoint j) { return j == AngleJoint::Hip ? "hip" : "knee"; }

// Joint-angle trace over one gait cycle, degrees, one sample per frame.
struct AngleSeries {
  AngleJoint joint = AngleJoint::Hip;
  Leg leg = Leg::Left;
  std::vector<double> values_deg;
  std::vector<double> t;
};

// Knee flexion angle: the angle between the hip->knee and knee->ankle
// directions, so a straight leg measures 0.
AngleSeries knee_angle_series(const GaitCycle& cycle, Leg leg);

// Hip angle: the angle between the hip->knee direction and straight down,
// so standing upright measures 0.
AngleSeries hip_angle_series(const GaitCycle& cycle, Leg leg);

double range_of_motion(const AngleSeries& series);

struct TimeDistanceIndices {
  double v_n = 0.0;          // normalized velocity, 1/s
  double l_n = 0.0;          // normalized stride length
  double s = 0.0;            // stance fraction in (0,1)
  std::optional<double> w;   // step width, m; absent without a double-support window
};

// Stride length is the straight-line ankle displacement between the cycle's
// stationary endpoints; velocity divides it by cycle time; both are
// normalized by subject height. Step width averages |x_left - x_right| over
// the first double-support window.
TimeDistanceIndices time_distance_indices(const GaitCycle& cycle, double height_cm);

struct GaitIndexSet {
  double v_n = 0.0;
  double l_n = 0.0;
  double s = 0.0;
  std::optional<double> w;
  double rom_hip = 0.0;
  double rom_knee = 0.0;
  std::optional<double> d_k;  // filled by the mean-DTW aggregation
  std::optional<double> d_h;
};

// Assembles the six locally computable indices for one cycle.
GaitIndexSet index_set(const GaitCycle& cycle, const SubjectRecord& subject);

}  // namespace gaitkit
