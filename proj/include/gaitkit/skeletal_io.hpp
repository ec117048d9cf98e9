#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gaitkit/types.hpp"

namespace gaitkit {

struct TrialMeta {
  std::string subject_id;
  int trial_no = 1;
};

// Parses a trial CSV document: a header row naming `t` plus
// `<JOINT>_x,<JOINT>_y,<JOINT>_z` triples, one frame per row, `.` decimal
// separator. Empty cells mark untracked samples; a joint is missing in a
// frame if any of its three coordinates is empty.
TrialRecording parse_trial(std::string_view csv_text, const TrialMeta& meta);

// Same recording model in a JSON container: an object mapping the CSV column
// names to equal-length arrays, with null for empty cells.
TrialRecording parse_trial_json(std::string_view json_text, const TrialMeta& meta);

// Canonical CSV serialization: columns ordered t, then joints in skeleton
// order; all numbers printed with 6 fractional digits. parse_trial of the
// output reproduces a recording whose values are representable at that
// precision exactly.
std::string serialize_trial(const TrialRecording& rec);

std::string serialize_trial_json(const TrialRecording& rec);

// Fills per-joint dropout runs of length <= max_gap by linear interpolation
// in time between the bracketing samples. Timestamps are unchanged.
TrialRecording interpolate_gaps(const TrialRecording& rec, std::size_t max_gap);

struct ArtifactOptions {
  double speed_bound_mps = 4.0;    // per-frame displacement bound, lower extremity
  double exclude_severity = 0.2;   // flagged-frame fraction above which to exclude
};

struct ArtifactReport {
  // Flagged frame indices per lower-extremity joint, in skeleton order.
  std::vector<std::pair<Joint, std::vector<std::size_t>>> flagged;
  double severity = 0.0;  // fraction of frames with at least one flagged joint
  bool exclude = false;
  std::size_t flagged_frame_count = 0;
};

// Flags frames whose lower-extremity joints move faster than a physical
// speed bound between consecutive samples.
ArtifactReport detect_artifacts(const TrialRecording& rec, const ArtifactOptions& options = {});

}  // namespace gaitkit
