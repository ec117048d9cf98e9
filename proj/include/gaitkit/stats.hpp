#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitkit/types.hpp"

namespace gaitkit::stats {

// The eight gait indices, in report column order.
enum class IndexId : int {
  Vn = 0,
  Ln,
  S,
  W,
  RomKnee,
  RomHip,
  Dk,
  Dh,
};

inline constexpr int kIndexCount = 8;
const char* index_name(IndexId id);
std::optional<IndexId> index_from_name(std::string_view name);

inline constexpr std::array<IndexId, 4> kTimeDistanceIndices = {IndexId::Vn, IndexId::Ln,
                                                                IndexId::S, IndexId::W};
inline constexpr std::array<IndexId, 4> kAngleIndices = {IndexId::RomKnee, IndexId::RomHip,
                                                         IndexId::Dk, IndexId::Dh};

struct GroupSummary {
  std::string group;
  std::string index;
  double mean = 0.0;
  double sd = 0.0;  // sample SD, n-1 denominator
  std::size_t n = 0;
};

GroupSummary group_summary(std::span<const double> values, const std::string& group_label,
                           const std::string& index_label = {});

struct IccResult {
  double icc = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string model = "ICC(2,1) two-way random, absolute agreement, single measure";
};

// Two-way random-effects, absolute-agreement, single-measure intraclass
// correlation with trials as raters; the 95% CI follows the Shrout-Fleiss
// F-distribution construction.
IccResult icc(const std::vector<std::vector<double>>& table);

struct CorrelationResult {
  double r = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

// Sample Pearson correlation with the Fisher-z 95% interval
// tanh(atanh(r) +- 1.96/sqrt(n-3)).
CorrelationResult pearson_ci(std::span<const double> x, std::span<const double> y);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 0.0;  // two-tailed
  std::string pairing = "paired";
};

TTestResult paired_t(std::span<const double> x, std::span<const double> y);

// --- cohort-level tables -------------------------------------------------

// Per-subject material assembled upstream: trial-level values where a trial
// produced the index, and the subject-level (trial-averaged) value.
struct SubjectIndexData {
  SubjectRecord subject;
  std::array<std::vector<double>, kIndexCount> trial_values;
  std::array<std::optional<double>, kIndexCount> subject_value;
};

struct CohortIndexData {
  std::vector<SubjectIndexData> patients;
  std::vector<SubjectIndexData> controls;
  // patient id -> matched control id; defaults to order matching when empty.
  std::vector<std::pair<std::string, std::string>> pairing;
};

// One rendered statistic; `error` carries the failure text when a cell
// could not be computed.
template <typename T>
struct StatCell {
  std::optional<T> value;
  std::string error;
  bool ok() const { return value.has_value(); }
};

struct IndexStats {
  StatCell<GroupSummary> ms_summary;
  StatCell<GroupSummary> control_summary;
  StatCell<IccResult> ms_icc;
  StatCell<IccResult> control_icc;
  StatCell<CorrelationResult> corr_ambulation;
  StatCell<CorrelationResult> corr_msws;
  StatCell<TTestResult> ttest;
};

struct Discrepancy {
  std::string statistic;  // e.g. "ms_mean", "t_p"
  std::string index;
  double recomputed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
};

struct CohortStats {
  std::array<IndexStats, kIndexCount> per_index;
  std::vector<Discrepancy> discrepancies;
};

// Published reference table: per-subject index values plus printed group
// statistics with comparison tolerances.
struct ReferenceTable {
  struct SubjectRow {
    std::string subject_id;
    std::array<std::optional<double>, kIndexCount> values;
  };
  struct StatRow {
    std::string statistic;
    IndexId index = IndexId::Vn;
    double value = 0.0;
    double tolerance = 0.0;
  };
  std::vector<SubjectRow> patients;
  std::vector<SubjectRow> controls;
  std::vector<StatRow> stats;
};

ReferenceTable parse_reference_csv(std::string_view text);

// Group summaries, per-group ICC, trial-level correlations against the
// clinical scores, and the subject-level paired t-test for each index.
// When a reference is supplied, every recomputed statistic with a matching
// reference row is compared at the row's tolerance and mismatches are
// collected as discrepancies.
CohortStats stats_tables(const CohortIndexData& cohort, const ReferenceTable* reference = nullptr);

// Rebuilds a subject-level CohortIndexData from a reference table's
// per-subject rows (no trial-level values), so its printed statistics can be
// recomputed and cross-checked via stats_tables.
CohortIndexData cohort_from_reference(const ReferenceTable& reference);

}  // namespace gaitkit::stats
