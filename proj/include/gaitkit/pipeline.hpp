#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gaitkit/gait_cycle.hpp"
#include "gaitkit/manifest.hpp"
#include "gaitkit/skeletal_io.hpp"
#include "gaitkit/stats.hpp"
#include "gaitkit/synth.hpp"

namespace gaitkit {

struct PipelineConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir = ".";
  double threshold = kDefaultStationaryFraction;
  std::size_t max_gap = 5;
  ArtifactOptions artifacts{};
  std::optional<std::filesystem::path> reference_path;
  bool parallel = true;
};

struct TrialAnalysis {
  TrialRef ref;
  std::vector<std::string> errors;
  bool excluded_artifact = false;
  bool usable = false;
  std::optional<GaitEvents> left_events;
  std::optional<GaitEvents> right_events;
  // Joint-angle sequences per leg, where the leg's cycle was extractable.
  std::optional<std::vector<double>> knee_left, knee_right, hip_left, hip_right;
  // Per-trial index values averaged over the available legs; d_k/d_h are
  // filled by the cohort-level aggregation.
  std::array<std::optional<double>, stats::kIndexCount> values;
};

struct CohortAnalysis {
  Manifest manifest;
  CohortCounts counts;
  std::vector<TrialAnalysis> trials;  // ordered by (subject roster, trial_no)
  stats::CohortIndexData index_data;
  stats::CohortStats cohort_stats;
  // Internal consistency check of the supplied reference table (its group
  // statistics recomputed from its per-subject rows).
  stats::CohortStats reference_check;
  bool has_reference = false;
  std::size_t failed_trials = 0;
  std::size_t dtw_evaluations = 0;
};

// Loads every trial, segments it, computes the per-trial and per-subject
// indices including the mean DTW distances, and assembles the statistics
// tables. Per-trial failures are collected, not fatal.
CohortAnalysis analyze_cohort(const PipelineConfig& config);

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 1 some trials failed, 2 fatal
  std::size_t total_trials = 0;
  std::size_t failed_trials = 0;
  std::vector<std::filesystem::path> outputs;
  std::string fatal_error;
};

// Full report bundle under config.out_dir: segmentation table, per-trial and
// per-subject index tables, the two statistics tables, one box plot (SVG +
// backing CSV) per index, the discrepancy report, an error log, and run
// metadata. Reruns with identical inputs produce byte-identical files.
PipelineResult run_pipeline(const PipelineConfig& config);

// Writes a synthesized cohort as a directory fixture (manifest, trial CSVs,
// ground-truth JSON) and returns the manifest path.
std::filesystem::path write_cohort_fixture(const SynthCohort& cohort,
                                           const std::filesystem::path& dir);

// Table renderers shared by the report bundle and the CLI.
std::string render_stats_csv(const stats::CohortStats& cs,
                             std::span<const stats::IndexId> columns);
std::string render_discrepancies(const stats::CohortStats& check, bool has_reference);

}  // namespace gaitkit
