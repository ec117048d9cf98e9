#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitkit {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  bool operator==(const Vec3&) const = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

// The 20 joints tracked by the Kinect-v1 skeleton stream.
enum class Joint : std::uint8_t {
  HipCenter,
  Spine,
  ShoulderCenter,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
};

inline constexpr std::size_t kJointCount = 20;

enum class Leg { Left, Right };

inline Leg other_leg(Leg leg) { return leg == Leg::Left ? Leg::Right : Leg::Left; }
inline const char* leg_name(Leg leg) { return leg == Leg::Left ? "left" : "right"; }

const char* joint_name(Joint j);
std::optional<Joint> joint_from_name(std::string_view name);

inline std::uint32_t joint_bit(Joint j) { return 1u << static_cast<unsigned>(j); }

// Lower-extremity joints that every recording must provide.
std::uint32_t mandatory_joint_mask();

Joint hip_joint(Leg leg);
Joint knee_joint(Leg leg);
Joint ankle_joint(Leg leg);

// One sample of the skeleton. A joint may be untracked in a given frame
// (dropout); `present` marks which of the recording's joints have a sample.
struct SkeletalFrame {
  double t = 0.0;
  std::array<Vec3, kJointCount> pos{};
  std::uint32_t present = 0;

  bool has(Joint j) const { return present & joint_bit(j); }
  const Vec3& at(Joint j) const { return pos[static_cast<std::size_t>(j)]; }
  void set(Joint j, const Vec3& p) {
    pos[static_cast<std::size_t>(j)] = p;
    present |= joint_bit(j);
  }
  void clear(Joint j) { present &= ~joint_bit(j); }

  bool operator==(const SkeletalFrame&) const = default;
};

// One walking capture. `joints` is the set of joint columns carried by the
// recording; individual frames may still miss samples for some of them.
struct TrialRecording {
  std::string subject_id;
  int trial_no = 1;
  std::vector<SkeletalFrame> frames;
  double nominal_fps = 0.0;
  std::uint32_t joints = 0;

  bool operator==(const TrialRecording&) const = default;

  double duration() const {
    return frames.empty() ? 0.0 : frames.back().t - frames.front().t;
  }
};

// Checks the structural invariants (>= 2 frames, strictly increasing time,
// mandatory joint columns, finite coordinates). Throws Error on violation.
void validate_recording(const TrialRecording& rec);

double infer_fps(const std::vector<SkeletalFrame>& frames);

enum class Group { Patient, Control };

inline const char* group_name(Group g) { return g == Group::Patient ? "patient" : "control"; }

struct SubjectRecord {
  std::string subject_id;
  Group group = Group::Control;
  std::string sex;
  double age = 0.0;
  double height_cm = 0.0;
  double weight_kg = 0.0;
  std::optional<int> ambulation_score;  // patients only, 0-9
  std::optional<double> msws;           // patients only, 0-100

  bool operator==(const SubjectRecord&) const = default;
};

void validate_subject(const SubjectRecord& subject);

struct CohortCounts {
  std::size_t n_patients = 0;
  std::size_t trials_per_patient = 0;
  std::size_t n_controls = 0;
  std::size_t trials_per_control = 0;
};

}  // namespace gaitkit
