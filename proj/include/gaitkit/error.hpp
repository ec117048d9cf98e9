#pragma once

#include <stdexcept>
#include <string>

namespace gaitkit {

enum class Errc {
  // ingestion
  missing_joint,
  non_monotone_time,
  malformed_row,
  too_short,
  gap_too_long,
  gap_at_boundary,
  invalid_params,
  // segmentation
  no_cycle_found,
  ambiguous_cycle,
  too_few_frames,
  // kinematics
  degenerate_segment,
  no_double_support,
  // dtw
  empty_sequence,
  too_long,
  empty_cohort,
  missing_leg,
  cohort_too_small,
  // statistics
  too_few,
  degenerate_variance,
  incomplete_matrix,
  zero_variance,
  length_mismatch,
  zero_variance_differences,
  non_convergence,
  empty_group,
  // orchestration
  io_error,
  bad_manifest,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gaitkit
