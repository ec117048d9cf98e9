#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitkit/dtw.hpp"
#include "gaitkit/error.hpp"
#include "gaitkit/gait_cycle.hpp"
#include "gaitkit/kinematics.hpp"
#include "gaitkit/manifest.hpp"
#include "gaitkit/pipeline.hpp"
#include "gaitkit/skeletal_io.hpp"
#include "gaitkit/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

gaitkit::TrialRecording load_trial(const fs::path& path) {
  const std::string text = gaitkit::read_file(path);
  const gaitkit::TrialMeta meta{path.stem().string(), 1};
  return path.extension() == ".json" ? gaitkit::parse_trial_json(text, meta)
                                     : gaitkit::parse_trial(text, meta);
}

json events_json(const gaitkit::GaitEvents& e) {
  return json{{"t_hs", e.t_hs}, {"t_to", e.t_to}, {"t_ts", e.t_ts}};
}

int cmd_segment(const fs::path& trial_path, const std::string& leg, double threshold) {
  const auto rec = load_trial(trial_path);
  json out;
  for (gaitkit::Leg l : {gaitkit::Leg::Left, gaitkit::Leg::Right}) {
    if (leg != "both" && leg != gaitkit::leg_name(l)) continue;
    const auto cycle = gaitkit::extract_cycle(rec, l, threshold);
    out[gaitkit::leg_name(l)] = events_json(cycle.events);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

json index_set_json(const gaitkit::GaitIndexSet& set) {
  json out;
  out["v_n"] = set.v_n;
  out["l_n"] = set.l_n;
  out["s"] = set.s;
  out["w"] = set.w ? json(*set.w) : json(nullptr);
  out["rom_hip"] = set.rom_hip;
  out["rom_knee"] = set.rom_knee;
  out["d_k"] = set.d_k ? json(*set.d_k) : json(nullptr);
  out["d_h"] = set.d_h ? json(*set.d_h) : json(nullptr);
  return out;
}

int cmd_indices_trial(const fs::path& trial_path, const std::string& leg, double threshold,
                      double height_cm) {
  const auto rec = load_trial(trial_path);
  const gaitkit::Leg l = leg == "right" ? gaitkit::Leg::Right : gaitkit::Leg::Left;
  const auto cycle = gaitkit::extract_cycle(rec, l, threshold);
  gaitkit::SubjectRecord subject;
  subject.subject_id = rec.subject_id;
  subject.height_cm = height_cm;
  std::cout << index_set_json(gaitkit::index_set(cycle, subject)).dump(2) << '\n';
  return 0;
}

int cmd_indices_cohort(const gaitkit::PipelineConfig& config) {
  const auto analysis = gaitkit::analyze_cohort(config);
  std::string out = "subject,v_n,l_n,s,w,rom_knee,rom_hip,d_k,d_h\n";
  auto rows = [&](const std::vector<gaitkit::stats::SubjectIndexData>& group) {
    for (const auto& s : group) {
      out += s.subject.subject_id;
      for (int i = 0; i < gaitkit::stats::kIndexCount; ++i) {
        out += ',';
        out += s.subject_value[i] ? fmt6(*s.subject_value[i]) : "na";
      }
      out += '\n';
    }
  };
  rows(analysis.index_data.patients);
  rows(analysis.index_data.controls);
  std::cout << out;
  return analysis.failed_trials == 0 ? 0 : 1;
}

int cmd_dtw(const gaitkit::PipelineConfig& config, const std::string& subject_id,
            const std::string& joint, const std::string& dump_path) {
  const auto analysis = gaitkit::analyze_cohort(config);
  const auto* subject = analysis.manifest.find_subject(subject_id);
  if (!subject) gaitkit::raise(gaitkit::Errc::bad_manifest, "unknown subject " + subject_id);
  const bool knee = joint == "knee";

  // Rebuild the per-subject sequences from the analysis.
  auto sequences_of = [&](const std::string& id) {
    gaitkit::dtw::SubjectSequences seqs;
    seqs.subject_id = id;
    for (const auto& ta : analysis.trials) {
      if (ta.ref.subject_id != id) continue;
      const auto& l = knee ? ta.knee_left : ta.hip_left;
      const auto& r = knee ? ta.knee_right : ta.hip_right;
      if (l) seqs.left.push_back(*l);
      if (r) seqs.right.push_back(*r);
    }
    return seqs;
  };
  std::vector<gaitkit::dtw::SubjectSequences> controls;
  std::size_t self_index = gaitkit::dtw::kNoExclusion;
  for (const auto& s : analysis.manifest.subjects) {
    if (s.group != gaitkit::Group::Control) continue;
    if (s.subject_id == subject_id) self_index = controls.size();
    controls.push_back(sequences_of(s.subject_id));
  }
  const auto own = sequences_of(subject_id);
  const auto result =
      subject->group == gaitkit::Group::Patient
          ? gaitkit::dtw::mean_dtw_patient(own, controls)
          : gaitkit::dtw::mean_dtw_control(self_index, controls);
  std::cout << fmt6(result.mean) << '\n';

  if (!dump_path.empty()) {
    std::string csv = "leg,own_trial,other_subject,other_trial,distance\n";
    for (const auto leg : {gaitkit::Leg::Left, gaitkit::Leg::Right}) {
      const auto& own_seqs = leg == gaitkit::Leg::Left ? own.left : own.right;
      for (std::size_t q = 0; q < controls.size(); ++q) {
        if (q == self_index) continue;
        const auto& other =
            leg == gaitkit::Leg::Left ? controls[q].left : controls[q].right;
        for (std::size_t r = 0; r < other.size(); ++r) {
          for (std::size_t j = 0; j < own_seqs.size(); ++j) {
            const double d = gaitkit::dtw::dtw(own_seqs[j], other[r]).distance;
            csv += std::string(gaitkit::leg_name(leg)) + ',' + std::to_string(j + 1) + ',' +
                   controls[q].subject_id + ',' + std::to_string(r + 1) + ',' + fmt6(d) + '\n';
          }
        }
      }
    }
    gaitkit::write_file(dump_path, csv);
  }
  return 0;
}

int cmd_synth(const fs::path& out_dir, std::uint64_t seed, std::size_t patients,
              std::size_t controls, std::size_t trials, double noise, bool single) {
  if (single) {
    gaitkit::SynthParams params;
    params.seed = seed;
    params.noise_sd_m = noise;
    const auto result = gaitkit::synthesize_trial(params);
    gaitkit::write_file(out_dir / "trial.csv", gaitkit::serialize_trial(result.recording));
    std::cout << (out_dir / "trial.csv").string() << '\n';
    return 0;
  }
  gaitkit::CohortSynthParams params;
  params.seed = seed;
  params.noise_sd_m = noise;
  params.n_patients = patients;
  params.n_controls = controls;
  params.trials_per_patient = trials;
  params.trials_per_control = trials;
  const auto cohort = gaitkit::synthesize_cohort(params);
  const auto manifest = gaitkit::write_cohort_fixture(cohort, out_dir);
  std::cout << manifest.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait-cycle segmentation, abnormality indices, and cohort statistics "
               "from skeletal joint trajectories"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string out_dir = ".";
  double threshold = gaitkit::kDefaultStationaryFraction;
  std::uint64_t seed = 0;
  app.add_option("--manifest", manifest_path, "Cohort manifest JSON")->envname("GAIT_MANIFEST");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threshold", threshold, "Stationary-speed fraction for segmentation");
  app.add_option("--seed", seed, "Random seed for synthesis");

  auto config_of = [&](const std::string& manifest_arg) {
    gaitkit::PipelineConfig config;
    config.manifest_path = manifest_arg.empty() ? manifest_path : manifest_arg;
    config.out_dir = out_dir;
    config.threshold = threshold;
    return config;
  };

  // segment
  auto* segment = app.add_subcommand("segment", "Detect gait events of one trial");
  std::string trial_file;
  std::string leg = "both";
  segment->add_option("trial", trial_file, "Trial CSV or JSON file")->required();
  segment->add_option("--leg", leg, "left, right, or both")
      ->check(CLI::IsMember({"left", "right", "both"}));

  // indices
  auto* indices = app.add_subcommand("indices", "Compute gait indices");
  std::string indices_trial;
  std::string cohort_manifest;
  std::string subject_id;
  double height_cm = 0.0;
  std::string indices_leg = "left";
  indices->add_option("trial", indices_trial, "Trial CSV or JSON file");
  indices->add_option("--cohort", cohort_manifest, "Cohort manifest: emit one CSV row per subject");
  indices->add_option("--subject", subject_id, "Subject id in the manifest (for height)");
  indices->add_option("--height-cm", height_cm, "Subject height when no manifest is given");
  indices->add_option("--leg", indices_leg, "Reference leg for single-trial indices")
      ->check(CLI::IsMember({"left", "right"}));

  // dtw
  auto* dtw_cmd = app.add_subcommand("dtw", "Mean DTW distance of one subject vs the controls");
  std::string dtw_subject;
  std::string dtw_joint = "knee";
  std::string dump_matrix;
  dtw_cmd->add_option("--patient,--subject", dtw_subject, "Subject id")->required();
  dtw_cmd->add_option("--joint", dtw_joint, "knee or hip")
      ->check(CLI::IsMember({"knee", "hip"}));
  dtw_cmd->add_option("--dump-matrix", dump_matrix, "Write the pairwise distance table as CSV");

  // cohort
  auto* cohort_cmd = app.add_subcommand("cohort", "Statistics tables for a cohort manifest");
  std::string cohort_arg;
  std::string reference_path;
  cohort_cmd->add_option("manifest", cohort_arg, "Cohort manifest JSON")->required();
  cohort_cmd->add_option("--reference", reference_path,
                         "Published reference table CSV for the discrepancy report");

  // report
  auto* report = app.add_subcommand("report", "Full analysis bundle for a cohort manifest");
  std::string report_reference;
  double artifact_speed = 4.0;
  double artifact_severity = 0.2;
  std::size_t max_gap = 5;
  report->add_option("--reference", report_reference, "Published reference table CSV");
  report->add_option("--artifact-speed-bound", artifact_speed,
                     "Per-frame joint speed bound in m/s");
  report->add_option("--artifact-exclude-severity", artifact_severity,
                     "Flagged-frame fraction above which a trial is excluded");
  report->add_option("--max-gap", max_gap, "Longest dropout run filled by interpolation");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort fixture");
  std::size_t synth_patients = 10;
  std::size_t synth_controls = 10;
  std::size_t synth_trials = 5;
  double synth_noise = 0.0;
  bool synth_single = false;
  synth->add_option("--patients", synth_patients, "Number of patients");
  synth->add_option("--controls", synth_controls, "Number of controls");
  synth->add_option("--trials", synth_trials, "Trials per subject");
  synth->add_option("--noise", synth_noise, "Position noise SD in meters");
  synth->add_flag("--single", synth_single, "Emit a single trial CSV instead of a cohort");

  CLI11_PARSE(app, argc, argv);

  try {
    if (segment->parsed()) return cmd_segment(trial_file, leg, threshold);
    if (indices->parsed()) {
      if (!cohort_manifest.empty()) return cmd_indices_cohort(config_of(cohort_manifest));
      if (indices_trial.empty()) {
        std::cerr << "indices: give a trial file or --cohort manifest\n";
        return 2;
      }
      double height = height_cm;
      if (height <= 0.0 && !manifest_path.empty() && !subject_id.empty()) {
        const auto manifest = gaitkit::load_manifest(manifest_path);
        const auto* subject = manifest.find_subject(subject_id);
        if (!subject) {
          std::cerr << "indices: subject " << subject_id << " not in manifest\n";
          return 2;
        }
        height = subject->height_cm;
      }
      if (height <= 0.0) {
        std::cerr << "indices: need --height-cm or --manifest plus --subject\n";
        return 2;
      }
      return cmd_indices_trial(indices_trial, indices_leg, threshold, height);
    }
    if (dtw_cmd->parsed()) {
      if (manifest_path.empty()) {
        std::cerr << "dtw: --manifest is required\n";
        return 2;
      }
      return cmd_dtw(config_of(""), dtw_subject, dtw_joint, dump_matrix);
    }
    if (cohort_cmd->parsed()) {
      auto config = config_of(cohort_arg);
      if (!reference_path.empty()) config.reference_path = reference_path;
      const auto analysis = gaitkit::analyze_cohort(config);
      const fs::path out(out_dir);
      gaitkit::write_file(out / "stats_time_distance.csv",
                          gaitkit::render_stats_csv(analysis.cohort_stats,
                                                    gaitkit::stats::kTimeDistanceIndices));
      gaitkit::write_file(out / "stats_angle.csv",
                          gaitkit::render_stats_csv(analysis.cohort_stats,
                                                    gaitkit::stats::kAngleIndices));
      gaitkit::write_file(out / "discrepancies.txt",
                          gaitkit::render_discrepancies(analysis.reference_check,
                                                        analysis.has_reference));
      std::cout << "wrote statistics tables to " << out_dir << '\n';
      return analysis.failed_trials == 0 ? 0 : 1;
    }
    if (report->parsed()) {
      if (manifest_path.empty()) {
        std::cerr << "report: --manifest is required\n";
        return 2;
      }
      auto config = config_of("");
      config.max_gap = max_gap;
      config.artifacts.speed_bound_mps = artifact_speed;
      config.artifacts.exclude_severity = artifact_severity;
      if (!report_reference.empty()) config.reference_path = report_reference;
      const auto result = gaitkit::run_pipeline(config);
      if (result.exit_code == 2) {
        std::cerr << "fatal: " << result.fatal_error << '\n';
      } else {
        std::cout << "processed " << result.total_trials << " trials ("
                  << result.failed_trials << " failed), " << result.outputs.size()
                  << " artifacts under " << out_dir << '\n';
      }
      return result.exit_code;
    }
    if (synth->parsed()) {
      return cmd_synth(out_dir, seed, synth_patients, synth_controls, synth_trials, synth_noise,
                       synth_single);
    }
  } catch (const gaitkit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
