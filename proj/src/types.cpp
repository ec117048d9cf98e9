#include "gaitkit/types.hpp"

#include <algorithm>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

constexpr std::array<const char*, kJointCount> kJointNames = {
    "HIP_CENTER",    "SPINE",          "SHOULDER_CENTER", "HEAD",
    "SHOULDER_LEFT", "ELBOW_LEFT",     "WRIST_LEFT",      "HAND_LEFT",
    "SHOULDER_RIGHT", "ELBOW_RIGHT",   "WRIST_RIGHT",     "HAND_RIGHT",
    "HIP_LEFT",      "KNEE_LEFT",      "ANKLE_LEFT",      "FOOT_LEFT",
    "HIP_RIGHT",     "KNEE_RIGHT",     "ANKLE_RIGHT",     "FOOT_RIGHT",
};

}  // namespace

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::missing_joint: return "MissingJoint";
    case Errc::non_monotone_time: return "NonMonotoneTime";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::too_short: return "TooShort";
    case Errc::gap_too_long: return "GapTooLong";
    case Errc::gap_at_boundary: return "GapAtBoundary";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::no_cycle_found: return "NoCycleFound";
    case Errc::ambiguous_cycle: return "AmbiguousCycle";
    case Errc::too_few_frames: return "TooFewFrames";
    case Errc::degenerate_segment: return "DegenerateSegment";
    case Errc::no_double_support: return "NoDoubleSupport";
    case Errc::empty_sequence: return "EmptySequence";
    case Errc::too_long: return "TooLong";
    case Errc::empty_cohort: return "EmptyCohort";
    case Errc::missing_leg: return "MissingLeg";
    case Errc::cohort_too_small: return "CohortTooSmall";
    case Errc::too_few: return "TooFew";
    case Errc::degenerate_variance: return "DegenerateVariance";
    case Errc::incomplete_matrix: return "IncompleteMatrix";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::zero_variance_differences: return "ZeroVarianceDifferences";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::empty_group: return "EmptyGroup";
    case Errc::io_error: return "IoError";
    case Errc::bad_manifest: return "BadManifest";
  }
  return "UnknownError";
}

const char* joint_name(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::optional<Joint> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (name == kJointNames[i]) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

std::uint32_t mandatory_joint_mask() {
  return joint_bit(Joint::HipLeft) | joint_bit(Joint::KneeLeft) | joint_bit(Joint::AnkleLeft) |
         joint_bit(Joint::HipRight) | joint_bit(Joint::KneeRight) | joint_bit(Joint::AnkleRight);
}

Joint hip_joint(Leg leg) { return leg == Leg::Left ? Joint::HipLeft : Joint::HipRight; }
Joint knee_joint(Leg leg) { return leg == Leg::Left ? Joint::KneeLeft : Joint::KneeRight; }
Joint ankle_joint(Leg leg) { return leg == Leg::Left ? Joint::AnkleLeft : Joint::AnkleRight; }

void validate_recording(const TrialRecording& rec) {
  if (rec.frames.size() < 2) raise(Errc::too_short, "recording needs at least 2 frames");
  if ((rec.joints & mandatory_joint_mask()) != mandatory_joint_mask()) {
    raise(Errc::missing_joint, "recording lacks a mandatory lower-extremity joint column");
  }
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const auto& f = rec.frames[i];
    if (i > 0 && !(f.t > rec.frames[i - 1].t)) {
      raise(Errc::non_monotone_time,
            "timestamps must be strictly increasing (frame " + std::to_string(i) + ")");
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if ((f.present & (1u << j)) && !f.pos[j].finite()) {
        raise(Errc::malformed_row, "non-finite coordinate at frame " + std::to_string(i));
      }
    }
  }
}

double infer_fps(const std::vector<SkeletalFrame>& frames) {
  if (frames.size() < 2) return 0.0;
  std::vector<double> dt;
  dt.reserve(frames.size() - 1);
  for (std::size_t i = 1; i < frames.size(); ++i) dt.push_back(frames[i].t - frames[i - 1].t);
  std::sort(dt.begin(), dt.end());
  const std::size_t n = dt.size();
  const double median = (n % 2 == 1) ? dt[n / 2] : 0.5 * (dt[n / 2 - 1] + dt[n / 2]);
  return median > 0.0 ? 1.0 / median : 0.0;
}

void validate_subject(const SubjectRecord& subject) {
  if (subject.subject_id.empty()) raise(Errc::bad_manifest, "subject_id must be nonempty");
  if (!(subject.height_cm > 0.0)) {
    raise(Errc::invalid_params, "height must be positive for subject " + subject.subject_id);
  }
  if (subject.group == Group::Patient) {
    if (!subject.ambulation_score || !subject.msws) {
      raise(Errc::bad_manifest,
            "patient " + subject.subject_id + " must carry ambulation_score and msws");
    }
    if (*subject.ambulation_score < 0 || *subject.ambulation_score > 9) {
      raise(Errc::bad_manifest, "ambulation_score out of range for " + subject.subject_id);
    }
    if (*subject.msws < 0.0 || *subject.msws > 100.0) {
      raise(Errc::bad_manifest, "msws out of range for " + subject.subject_id);
    }
  } else if (subject.ambulation_score || subject.msws) {
    raise(Errc::bad_manifest,
          "control " + subject.subject_id + " must not carry clinical scores");
  }
}

}  // namespace gaitkit
