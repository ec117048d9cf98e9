#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitkit/types.hpp"

namespace gaitkit::dtw {

// Local distance cost between two samples: absolute difference, so distances
// carry the units of the input sequences (degrees for joint angles).
inline double local_cost(double a, double b) noexcept { return a >= b ? a - b : b - a; }

// One alignment cell: indices into the first and second sequence (0-based).
struct PathStep {
  std::size_t a = 0;
  std::size_t b = 0;
  bool operator==(const PathStep&) const = default;
};

struct DtwResult {
  double distance = 0.0;
  std::vector<PathStep> path;
};

// Dynamic-programming alignment over the full cost matrix with unit steps
// {(1,0),(0,1),(1,1)}. The path starts at (0,0), ends at (N-1,M-1) and is
// recovered by backtracking; exact ties prefer the diagonal step, then the
// step that consumes the first sequence.
DtwResult dtw(std::span<const double> a, std::span<const double> b);

// Minimum total cost over an explicit enumeration of every warping path.
// Only usable for short sequences (N, M <= 10); serves as the reference
// the dynamic program is checked against.
double brute_force_dtw(std::span<const double> a, std::span<const double> b);

// Per-trial angle sequences of one subject, split by leg.
struct SubjectSequences {
  std::string subject_id;
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;
};

struct MeanDtwResult {
  double mean = 0.0;          // same units as the sequences
  std::size_t evaluations = 0; // number of pairwise DTW distances computed
};

struct MeanDtwOptions {
  bool parallel = true;
};

// Mean DTW distance of one patient's per-trial sequences against every
// control sequence: left compares only with left, right only with right;
// each leg's distances are averaged, and the result is the mean of the two
// per-leg averages. With m_p patient trials and n_c controls of m_c trials
// each this evaluates 2 * m_p * n_c * m_c pairwise distances.
MeanDtwResult mean_dtw_patient(const SubjectSequences& patient,
                               const std::vector<SubjectSequences>& controls,
                               const MeanDtwOptions& options = {});

// Same aggregation for control subject `subject_index`, except the
// comparison set excludes that subject's own trials entirely.
MeanDtwResult mean_dtw_control(std::size_t subject_index,
                               const std::vector<SubjectSequences>& controls,
                               const MeanDtwOptions& options = {});

// Single-trial variant used for per-trial index tables: one trial's left and
// right sequences (either may be absent) against the comparison set.
struct TrialSequences {
  const std::vector<double>* left = nullptr;
  const std::vector<double>* right = nullptr;
};

MeanDtwResult mean_dtw_trial(const TrialSequences& trial,
                             const std::vector<SubjectSequences>& comparison,
                             std::size_t exclude_subject_index,
                             const MeanDtwOptions& options = {});

inline constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

}  // namespace gaitkit::dtw
