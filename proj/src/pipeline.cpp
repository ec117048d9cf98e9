#include "gaitkit/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include <json.hpp>

#include "format.hpp"
#include "gaitkit/dtw.hpp"
#include "gaitkit/error.hpp"
#include "gaitkit/boxplot.hpp"
#include "gaitkit/kinematics.hpp"
#include "parallel.hpp"

namespace gaitkit {

namespace {

using stats::IndexId;

// Frames at the recording boundaries that miss a mandatory joint sample have
// no bracketing sample to interpolate from; drop them before gap filling.
TrialRecording trim_incomplete_boundaries(TrialRecording rec) {
  const std::uint32_t mask = mandatory_joint_mask();
  auto complete = [&](const SkeletalFrame& f) { return (f.present & mask) == mask; };
  auto& frames = rec.frames;
  std::size_t lo = 0;
  while (lo < frames.size() && !complete(frames[lo])) ++lo;
  std::size_t hi = frames.size();
  while (hi > lo && !complete(frames[hi - 1])) --hi;
  if (lo > 0 || hi < frames.size()) {
    frames = std::vector<SkeletalFrame>(frames.begin() + lo, frames.begin() + hi);
    rec.nominal_fps = infer_fps(frames);
  }
  return rec;
}

struct LegOutcome {
  std::optional<GaitEvents> events;
  std::optional<GaitIndexSet> indices;
  std::optional<std::vector<double>> knee;
  std::optional<std::vector<double>> hip;
};

LegOutcome analyze_leg(const TrialRecording& rec, Leg leg, const SubjectRecord& subject,
                       double threshold, std::vector<std::string>& errors) {
  LegOutcome out;
  GaitCycle cycle;
  try {
    cycle = extract_cycle(rec, leg, threshold);
    out.events = cycle.events;
  } catch (const Error& e) {
    errors.push_back(std::string(leg_name(leg)) + " segmentation: " + e.what());
    return out;
  }
  try {
    out.indices = index_set(cycle, subject);
  } catch (const Error& e) {
    errors.push_back(std::string(leg_name(leg)) + " indices: " + e.what());
  }
  try {
    out.knee = knee_angle_series(cycle, leg).values_deg;
    out.hip = hip_angle_series(cycle, leg).values_deg;
  } catch (const Error& e) {
    errors.push_back(std::string(leg_name(leg)) + " angle series: " + e.what());
  }
  return out;
}

TrialAnalysis process_trial(const TrialRef& ref, const SubjectRecord& subject,
                            const PipelineConfig& config) {
  TrialAnalysis ta;
  ta.ref = ref;
  TrialRecording rec;
  try {
    const std::string text = read_file(ref.path);
    const TrialMeta meta{ref.subject_id, ref.trial_no};
    rec = ref.path.extension() == ".json" ? parse_trial_json(text, meta)
                                          : parse_trial(text, meta);
    rec = trim_incomplete_boundaries(rec);
    rec = interpolate_gaps(rec, config.max_gap);
  } catch (const Error& e) {
    ta.errors.push_back(std::string("ingest: ") + e.what());
    return ta;
  } catch (const std::exception& e) {
    ta.errors.push_back(std::string("ingest: ") + e.what());
    return ta;
  }

  const ArtifactReport report = detect_artifacts(rec, config.artifacts);
  if (report.exclude) {
    ta.excluded_artifact = true;
    ta.errors.push_back("artifacts: severity " + fmt6(report.severity) + " exceeds " +
                        fmt6(config.artifacts.exclude_severity) + ", trial excluded");
    return ta;
  }

  const LegOutcome left = analyze_leg(rec, Leg::Left, subject, config.threshold, ta.errors);
  const LegOutcome right = analyze_leg(rec, Leg::Right, subject, config.threshold, ta.errors);
  ta.left_events = left.events;
  ta.right_events = right.events;
  ta.knee_left = left.knee;
  ta.knee_right = right.knee;
  ta.hip_left = left.hip;
  ta.hip_right = right.hip;

  auto put = [&](IndexId id, std::optional<double> l, std::optional<double> r) {
    if (l && r) {
      ta.values[static_cast<int>(id)] = 0.5 * (*l + *r);
    } else if (l) {
      ta.values[static_cast<int>(id)] = *l;
    } else if (r) {
      ta.values[static_cast<int>(id)] = *r;
    }
  };
  auto opt = [](const std::optional<GaitIndexSet>& set, auto member) -> std::optional<double> {
    if (!set) return std::nullopt;
    return member(*set);
  };
  put(IndexId::Vn, opt(left.indices, [](auto& s) { return s.v_n; }),
      opt(right.indices, [](auto& s) { return s.v_n; }));
  put(IndexId::Ln, opt(left.indices, [](auto& s) { return s.l_n; }),
      opt(right.indices, [](auto& s) { return s.l_n; }));
  put(IndexId::S, opt(left.indices, [](auto& s) { return s.s; }),
      opt(right.indices, [](auto& s) { return s.s; }));
  put(IndexId::RomKnee, opt(left.indices, [](auto& s) { return s.rom_knee; }),
      opt(right.indices, [](auto& s) { return s.rom_knee; }));
  put(IndexId::RomHip, opt(left.indices, [](auto& s) { return s.rom_hip; }),
      opt(right.indices, [](auto& s) { return s.rom_hip; }));
  auto opt_w = [](const std::optional<GaitIndexSet>& set) -> std::optional<double> {
    return set ? set->w : std::nullopt;
  };
  put(IndexId::W, opt_w(left.indices), opt_w(right.indices));

  ta.usable = left.indices.has_value() || right.indices.has_value();
  return ta;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

CohortAnalysis analyze_cohort(const PipelineConfig& config) {
  CohortAnalysis analysis;
  analysis.manifest = load_manifest(config.manifest_path);
  analysis.counts = validate_cohort(analysis.manifest);
  if (analysis.counts.n_controls < 2) {
    raise(Errc::cohort_too_small, "mean DTW aggregation needs at least 2 control subjects");
  }

  // Stable processing order: roster order, then trial number.
  std::vector<TrialRef> ordered = analysis.manifest.trials;
  std::map<std::string, std::size_t> roster_pos;
  for (std::size_t i = 0; i < analysis.manifest.subjects.size(); ++i) {
    roster_pos[analysis.manifest.subjects[i].subject_id] = i;
  }
  std::sort(ordered.begin(), ordered.end(), [&](const TrialRef& a, const TrialRef& b) {
    const auto pa = roster_pos.at(a.subject_id);
    const auto pb = roster_pos.at(b.subject_id);
    return pa != pb ? pa < pb : a.trial_no < b.trial_no;
  });

  analysis.trials.resize(ordered.size());
  parallel_for_n(ordered.size(), config.parallel, [&](std::size_t i) {
    const SubjectRecord* subject = analysis.manifest.find_subject(ordered[i].subject_id);
    analysis.trials[i] = process_trial(ordered[i], *subject, config);
  });
  for (const auto& ta : analysis.trials) {
    if (!ta.usable) ++analysis.failed_trials;
  }

  // Per-subject assembly in roster order.
  std::map<std::string, std::vector<TrialAnalysis*>> by_subject;
  for (auto& ta : analysis.trials) by_subject[ta.ref.subject_id].push_back(&ta);

  std::vector<const SubjectRecord*> patient_order;
  std::vector<const SubjectRecord*> control_order;
  std::map<std::string, std::size_t> control_pos;
  for (const auto& subject : analysis.manifest.subjects) {
    if (subject.group == Group::Patient) {
      patient_order.push_back(&subject);
    } else {
      control_pos[subject.subject_id] = control_order.size();
      control_order.push_back(&subject);
    }
  }
  auto joint_sequences = [&](const SubjectRecord& subject, bool knee) {
    dtw::SubjectSequences seqs;
    seqs.subject_id = subject.subject_id;
    const auto it = by_subject.find(subject.subject_id);
    if (it == by_subject.end()) return seqs;
    for (const auto* ta : it->second) {
      const auto& l = knee ? ta->knee_left : ta->hip_left;
      const auto& r = knee ? ta->knee_right : ta->hip_right;
      if (l) seqs.left.push_back(*l);
      if (r) seqs.right.push_back(*r);
    }
    return seqs;
  };
  std::vector<dtw::SubjectSequences> control_knee;
  std::vector<dtw::SubjectSequences> control_hip;
  for (const auto* subject : control_order) {
    control_knee.push_back(joint_sequences(*subject, true));
    control_hip.push_back(joint_sequences(*subject, false));
  }

  // Per-trial mean DTW distances, written back into the trial records so
  // every table draws from the same values.
  const dtw::MeanDtwOptions dtw_options{config.parallel};
  for (const auto& subject : analysis.manifest.subjects) {
    const bool is_patient = subject.group == Group::Patient;
    const std::size_t exclude =
        is_patient ? dtw::kNoExclusion : control_pos.at(subject.subject_id);
    for (TrialAnalysis* ta : by_subject.at(subject.subject_id)) {
      for (const bool knee : {true, false}) {
        const IndexId id = knee ? IndexId::Dk : IndexId::Dh;
        dtw::TrialSequences trial;
        const auto& l = knee ? ta->knee_left : ta->hip_left;
        const auto& r = knee ? ta->knee_right : ta->hip_right;
        if (l) trial.left = &*l;
        if (r) trial.right = &*r;
        if (!trial.left && !trial.right) continue;
        try {
          const auto res = dtw::mean_dtw_trial(trial, knee ? control_knee : control_hip,
                                               exclude, dtw_options);
          ta->values[static_cast<int>(id)] = res.mean;
          analysis.dtw_evaluations += res.evaluations;
        } catch (const Error& e) {
          ta->errors.push_back(std::string(knee ? "d_k" : "d_h") + ": " + e.what());
        }
      }
    }
  }

  auto assemble_subject = [&](const SubjectRecord& subject,
                              std::size_t control_index) -> stats::SubjectIndexData {
    stats::SubjectIndexData data;
    data.subject = subject;
    const bool is_patient = subject.group == Group::Patient;
    const auto& own = by_subject.at(subject.subject_id);

    for (int i = 0; i < stats::kIndexCount; ++i) {
      auto& trial_vals = data.trial_values[i];
      for (const auto* ta : own) {
        if (const auto& v = ta->values[i]) trial_vals.push_back(*v);
      }
      data.subject_value[i] = mean_of(trial_vals);
    }

    // Subject-level mean DTW uses the full per-leg aggregation (left with
    // left, right with right, averaged per leg and then across legs); with
    // complete trials it coincides with the per-trial mean.
    for (const bool knee : {true, false}) {
      const IndexId id = knee ? IndexId::Dk : IndexId::Dh;
      try {
        const auto seqs = joint_sequences(subject, knee);
        const auto& comparison = knee ? control_knee : control_hip;
        const auto res = is_patient
                             ? dtw::mean_dtw_patient(seqs, comparison, dtw_options)
                             : dtw::mean_dtw_control(control_index, comparison, dtw_options);
        data.subject_value[static_cast<int>(id)] = res.mean;
        analysis.dtw_evaluations += res.evaluations;
      } catch (const Error&) {
        // keep the per-trial mean fallback already in subject_value
      }
    }
    return data;
  };

  for (const auto* subject : patient_order) {
    analysis.index_data.patients.push_back(assemble_subject(*subject, 0));
  }
  for (std::size_t q = 0; q < control_order.size(); ++q) {
    analysis.index_data.controls.push_back(assemble_subject(*control_order[q], q));
  }
  analysis.index_data.pairing = analysis.manifest.pairing;

  bool any_patient = false;
  bool any_control = false;
  for (const auto& p : analysis.index_data.patients) {
    if (!p.trial_values[0].empty()) any_patient = true;
  }
  for (const auto& c : analysis.index_data.controls) {
    if (!c.trial_values[0].empty()) any_control = true;
  }
  if (!any_patient || !any_control) {
    raise(Errc::empty_cohort, "no usable trials in one of the groups");
  }

  analysis.cohort_stats = stats::stats_tables(analysis.index_data);

  if (config.reference_path) {
    const auto reference = stats::parse_reference_csv(read_file(*config.reference_path));
    const auto published = stats::cohort_from_reference(reference);
    analysis.reference_check = stats::stats_tables(published, &reference);
    analysis.has_reference = true;
  }
  return analysis;
}

namespace {

std::string cell_or_na(const std::optional<double>& v) { return v ? fmt6(*v) : "na"; }

std::string indices_csv(const std::vector<stats::SubjectIndexData>& group) {
  std::string out = "subject,v_n,l_n,s,w,rom_knee,rom_hip,d_k,d_h\n";
  for (const auto& s : group) {
    out += s.subject.subject_id;
    for (int i = 0; i < stats::kIndexCount; ++i) {
      out += ',';
      out += cell_or_na(s.subject_value[i]);
    }
    out += '\n';
  }
  return out;
}

template <typename T, typename Fn>
std::string stat_or_na(const stats::StatCell<T>& cell, Fn&& fn) {
  if (!cell.ok()) return "na";
  return fmt6(fn(*cell.value));
}

}  // namespace

std::string render_stats_csv(const stats::CohortStats& cs,
                             std::span<const stats::IndexId> columns) {
  std::string out = "statistic";
  for (IndexId id : columns) out += std::string(",") + stats::index_name(id);
  out += '\n';
  struct Row {
    const char* label;
    std::function<std::string(const stats::IndexStats&)> render;
  };
  const std::vector<Row> rows = {
      {"ms_mean", [](auto& s) { return stat_or_na(s.ms_summary, [](auto& v) { return v.mean; }); }},
      {"ms_sd", [](auto& s) { return stat_or_na(s.ms_summary, [](auto& v) { return v.sd; }); }},
      {"control_mean",
       [](auto& s) { return stat_or_na(s.control_summary, [](auto& v) { return v.mean; }); }},
      {"control_sd",
       [](auto& s) { return stat_or_na(s.control_summary, [](auto& v) { return v.sd; }); }},
      {"ms_icc", [](auto& s) { return stat_or_na(s.ms_icc, [](auto& v) { return v.icc; }); }},
      {"ms_icc_lo", [](auto& s) { return stat_or_na(s.ms_icc, [](auto& v) { return v.ci_low; }); }},
      {"ms_icc_hi",
       [](auto& s) { return stat_or_na(s.ms_icc, [](auto& v) { return v.ci_high; }); }},
      {"control_icc",
       [](auto& s) { return stat_or_na(s.control_icc, [](auto& v) { return v.icc; }); }},
      {"control_icc_lo",
       [](auto& s) { return stat_or_na(s.control_icc, [](auto& v) { return v.ci_low; }); }},
      {"control_icc_hi",
       [](auto& s) { return stat_or_na(s.control_icc, [](auto& v) { return v.ci_high; }); }},
      {"corr_ambulation",
       [](auto& s) { return stat_or_na(s.corr_ambulation, [](auto& v) { return v.r; }); }},
      {"corr_ambulation_lo",
       [](auto& s) { return stat_or_na(s.corr_ambulation, [](auto& v) { return v.ci_low; }); }},
      {"corr_ambulation_hi",
       [](auto& s) { return stat_or_na(s.corr_ambulation, [](auto& v) { return v.ci_high; }); }},
      {"corr_msws", [](auto& s) { return stat_or_na(s.corr_msws, [](auto& v) { return v.r; }); }},
      {"corr_msws_lo",
       [](auto& s) { return stat_or_na(s.corr_msws, [](auto& v) { return v.ci_low; }); }},
      {"corr_msws_hi",
       [](auto& s) { return stat_or_na(s.corr_msws, [](auto& v) { return v.ci_high; }); }},
      {"t_stat", [](auto& s) { return stat_or_na(s.ttest, [](auto& v) { return v.t; }); }},
      {"t_p", [](auto& s) { return stat_or_na(s.ttest, [](auto& v) { return v.p; }); }},
  };
  for (const auto& row : rows) {
    out += row.label;
    for (IndexId id : columns) {
      out += ',';
      out += row.render(cs.per_index[static_cast<int>(id)]);
    }
    out += '\n';
  }
  return out;
}

std::string render_discrepancies(const stats::CohortStats& check, bool has_reference) {
  std::string out;
  if (!has_reference) {
    out = "no reference table supplied\n";
    return out;
  }
  if (check.discrepancies.empty()) {
    out = "no discrepancies: every recomputed statistic matches the reference\n";
    return out;
  }
  out = "recomputed statistics disagreeing with the reference table:\n";
  for (const auto& d : check.discrepancies) {
    out += d.statistic + "[" + d.index + "]: recomputed " + fmt6(d.recomputed) +
           " vs reference " + fmt6(d.reference) + " (tolerance " + fmt6(d.tolerance) + ")\n";
  }
  return out;
}

std::filesystem::path write_cohort_fixture(const SynthCohort& cohort,
                                           const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "trials");

  Manifest manifest;
  manifest.subjects = cohort.subjects;
  manifest.pairing = cohort.pairing;
  nlohmann::json truth = nlohmann::json::array();
  for (const auto& trial : cohort.trials) {
    const auto& rec = trial.recording;
    const std::string name =
        rec.subject_id + "_" + std::to_string(rec.trial_no) + ".csv";
    const fs::path path = dir / "trials" / name;
    write_file(path, serialize_trial(rec));
    manifest.trials.push_back({rec.subject_id, rec.trial_no, path});

    nlohmann::json t;
    t["subject_id"] = rec.subject_id;
    t["trial_no"] = rec.trial_no;
    t["stride_length_m"] = trial.truth.stride_length_m;
    t["cycle_time_s"] = trial.truth.cycle_time_s;
    t["stance_fraction"] = trial.truth.stance_fraction;
    t["step_width_m"] = trial.truth.step_width_m;
    t["rom_hip_deg"] = trial.truth.rom_hip_deg;
    t["rom_knee_deg"] = trial.truth.rom_knee_deg;
    auto events_json = [](const std::vector<GaitEvents>& events) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& e : events) {
        arr.push_back({{"t_hs", e.t_hs}, {"t_to", e.t_to}, {"t_ts", e.t_ts}});
      }
      return arr;
    };
    t["left_events"] = events_json(trial.truth.left_events);
    t["right_events"] = events_json(trial.truth.right_events);
    truth.push_back(std::move(t));
  }
  const fs::path manifest_path = dir / "manifest.json";
  write_file(manifest_path, serialize_manifest(manifest, dir));
  write_file(dir / "ground_truth.json", truth.dump(2) + "\n");
  return manifest_path;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  CohortAnalysis analysis;
  try {
    analysis = analyze_cohort(config);
  } catch (const Error& e) {
    result.exit_code = 2;
    result.fatal_error = e.what();
    try {
      write_file(config.out_dir / "errors.log", std::string("fatal: ") + e.what() + "\n");
    } catch (const Error&) {
    }
    return result;
  }
  result.total_trials = analysis.trials.size();
  result.failed_trials = analysis.failed_trials;

  namespace fs = std::filesystem;
  const fs::path out = config.out_dir;
  fs::create_directories(out);
  auto emit = [&](const fs::path& name, const std::string& content) {
    write_file(out / name, content);
    result.outputs.push_back(out / name);
  };

  // Per-trial segmentation table.
  std::string seg = "subject,trial,leg,t_hs,t_to,t_ts\n";
  for (const auto& ta : analysis.trials) {
    auto row = [&](const char* leg, const std::optional<GaitEvents>& e) {
      if (!e) return;
      seg += ta.ref.subject_id + ',' + std::to_string(ta.ref.trial_no) + ',' + leg + ',' +
             fmt6(e->t_hs) + ',' + fmt6(e->t_to) + ',' + fmt6(e->t_ts) + '\n';
    };
    row("left", ta.left_events);
    row("right", ta.right_events);
  }
  emit("segmentations.csv", seg);

  // Per-trial index values.
  std::string trial_csv = "subject,trial,v_n,l_n,s,w,rom_knee,rom_hip,d_k,d_h\n";
  for (const auto& ta : analysis.trials) {
    trial_csv += ta.ref.subject_id + ',' + std::to_string(ta.ref.trial_no);
    for (int i = 0; i < stats::kIndexCount; ++i) {
      trial_csv += ',' + cell_or_na(ta.values[i]);
    }
    trial_csv += '\n';
  }
  emit("trials_indices.csv", trial_csv);

  emit("patients_indices.csv", indices_csv(analysis.index_data.patients));
  emit("controls_indices.csv", indices_csv(analysis.index_data.controls));
  emit("stats_time_distance.csv",
       render_stats_csv(analysis.cohort_stats, stats::kTimeDistanceIndices));
  emit("stats_angle.csv", render_stats_csv(analysis.cohort_stats, stats::kAngleIndices));

  // Box plots per index over the per-subject values.
  for (int i = 0; i < stats::kIndexCount; ++i) {
    BoxplotGroup ms{"MS", {}};
    BoxplotGroup ctl{"Control", {}};
    for (const auto& s : analysis.index_data.patients) {
      if (const auto& v = s.subject_value[i]) ms.values.push_back(*v);
    }
    for (const auto& s : analysis.index_data.controls) {
      if (const auto& v = s.subject_value[i]) ctl.values.push_back(*v);
    }
    const std::string name = stats::index_name(static_cast<IndexId>(i));
    if (ms.values.empty() || ctl.values.empty()) continue;
    const auto artifact = emit_boxplot({ms, ctl}, name);
    emit("box_" + name + ".svg", artifact.svg);
    emit("box_" + name + ".csv", artifact.csv);
  }

  emit("discrepancies.txt",
       render_discrepancies(analysis.reference_check, analysis.has_reference));

  std::string log;
  for (const auto& ta : analysis.trials) {
    for (const auto& err : ta.errors) {
      log += ta.ref.subject_id + " trial " + std::to_string(ta.ref.trial_no) + ": " + err + '\n';
    }
  }
  emit("errors.log", log);

  nlohmann::json meta;
  meta["threshold"] = config.threshold;
  meta["max_gap"] = config.max_gap;
  meta["artifact_speed_bound_mps"] = config.artifacts.speed_bound_mps;
  meta["artifact_exclude_severity"] = config.artifacts.exclude_severity;
  meta["icc_model"] = "ICC(2,1) two-way random, absolute agreement, single measure";
  meta["quantile_method"] = "type 7 (linear interpolation between order statistics)";
  meta["float_format"] = "%.6g";
  meta["correlation_level"] = "trial";
  meta["n_patients"] = analysis.counts.n_patients;
  meta["trials_per_patient"] = analysis.counts.trials_per_patient;
  meta["n_controls"] = analysis.counts.n_controls;
  meta["trials_per_control"] = analysis.counts.trials_per_control;
  meta["failed_trials"] = analysis.failed_trials;
  meta["dtw_evaluations"] = analysis.dtw_evaluations;
  emit("run_metadata.json", meta.dump(2) + "\n");

  result.exit_code = analysis.failed_trials == 0 ? 0 : 1;
  return result;
}

}  // namespace gaitkit
