#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gaitkit/types.hpp"

namespace gaitkit {

struct TrialRef {
  std::string subject_id;
  int trial_no = 1;
  std::filesystem::path path;  // resolved against the manifest directory
};

// Cohort manifest: the subject roster, relative paths to the trial files,
// and the optional patient-to-control pairing used by the paired t-test
// (defaults to roster order).
struct Manifest {
  std::vector<SubjectRecord> subjects;
  std::vector<TrialRef> trials;
  std::vector<std::pair<std::string, std::string>> pairing;

  const SubjectRecord* find_subject(const std::string& id) const;
};

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const Manifest& manifest,
                               const std::filesystem::path& base_dir);

// Checks referential integrity and per-group uniform trial counts.
CohortCounts validate_cohort(const Manifest& manifest);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gaitkit
