#include "gaitkit/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

using nlohmann::json;

SubjectRecord subject_from_json(const json& j) {
  SubjectRecord s;
  try {
    s.subject_id = j.at("subject_id").get<std::string>();
    const std::string group = j.at("group").get<std::string>();
    if (group == "patient") {
      s.group = Group::Patient;
    } else if (group == "control") {
      s.group = Group::Control;
    } else {
      raise(Errc::bad_manifest, "unknown group '" + group + "'");
    }
    s.sex = j.value("sex", "");
    s.age = j.value("age", 0.0);
    s.height_cm = j.at("height_cm").get<double>();
    s.weight_kg = j.value("weight_kg", 0.0);
    if (j.contains("ambulation_score") && !j["ambulation_score"].is_null()) {
      s.ambulation_score = j["ambulation_score"].get<int>();
    }
    if (j.contains("msws") && !j["msws"].is_null()) s.msws = j["msws"].get<double>();
  } catch (const json::exception& e) {
    raise(Errc::bad_manifest, std::string("bad subject entry: ") + e.what());
  }
  validate_subject(s);
  return s;
}

}  // namespace

const SubjectRecord* Manifest::find_subject(const std::string& id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == id) return &s;
  }
  return nullptr;
}

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(Errc::bad_manifest, std::string("invalid manifest JSON: ") + e.what());
  }
  Manifest manifest;
  if (!doc.contains("subjects") || !doc["subjects"].is_array()) {
    raise(Errc::bad_manifest, "manifest needs a 'subjects' array");
  }
  for (const auto& j : doc["subjects"]) manifest.subjects.push_back(subject_from_json(j));
  if (!doc.contains("trials") || !doc["trials"].is_array()) {
    raise(Errc::bad_manifest, "manifest needs a 'trials' array");
  }
  for (const auto& j : doc["trials"]) {
    TrialRef ref;
    try {
      ref.subject_id = j.at("subject_id").get<std::string>();
      ref.trial_no = j.at("trial_no").get<int>();
      ref.path = base_dir / j.at("path").get<std::string>();
    } catch (const json::exception& e) {
      raise(Errc::bad_manifest, std::string("bad trial entry: ") + e.what());
    }
    if (ref.trial_no < 1) raise(Errc::bad_manifest, "trial_no must be positive");
    manifest.trials.push_back(std::move(ref));
  }
  if (doc.contains("pairing")) {
    for (const auto& pair : doc["pairing"]) {
      if (!pair.is_array() || pair.size() != 2) {
        raise(Errc::bad_manifest, "pairing entries must be [patient_id, control_id]");
      }
      manifest.pairing.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

std::string serialize_manifest(const Manifest& manifest, const std::filesystem::path& base_dir) {
  json doc;
  doc["subjects"] = json::array();
  for (const auto& s : manifest.subjects) {
    json j;
    j["subject_id"] = s.subject_id;
    j["group"] = group_name(s.group);
    j["sex"] = s.sex;
    j["age"] = s.age;
    j["height_cm"] = s.height_cm;
    j["weight_kg"] = s.weight_kg;
    if (s.ambulation_score) j["ambulation_score"] = *s.ambulation_score;
    if (s.msws) j["msws"] = *s.msws;
    doc["subjects"].push_back(std::move(j));
  }
  doc["trials"] = json::array();
  for (const auto& t : manifest.trials) {
    json j;
    j["subject_id"] = t.subject_id;
    j["trial_no"] = t.trial_no;
    j["path"] = std::filesystem::relative(t.path, base_dir).generic_string();
    doc["trials"].push_back(std::move(j));
  }
  if (!manifest.pairing.empty()) {
    doc["pairing"] = json::array();
    for (const auto& [p, c] : manifest.pairing) doc["pairing"].push_back(json::array({p, c}));
  }
  return doc.dump(2) + "\n";
}

CohortCounts validate_cohort(const Manifest& manifest) {
  std::map<std::string, std::size_t> trial_counts;
  for (const auto& t : manifest.trials) {
    if (!manifest.find_subject(t.subject_id)) {
      raise(Errc::bad_manifest, "trial references unknown subject '" + t.subject_id + "'");
    }
    ++trial_counts[t.subject_id];
  }
  CohortCounts counts;
  for (const auto& s : manifest.subjects) {
    const auto it = trial_counts.find(s.subject_id);
    const std::size_t m = it == trial_counts.end() ? 0 : it->second;
    if (m == 0) raise(Errc::bad_manifest, "subject '" + s.subject_id + "' has no trials");
    auto& n = s.group == Group::Patient ? counts.n_patients : counts.n_controls;
    auto& per = s.group == Group::Patient ? counts.trials_per_patient : counts.trials_per_control;
    if (n == 0) {
      per = m;
    } else if (per != m) {
      raise(Errc::bad_manifest, "trial count differs within the " +
                                    std::string(group_name(s.group)) + " group (subject '" +
                                    s.subject_id + "')");
    }
    ++n;
  }
  return counts;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) raise(Errc::io_error, "read failed for " + path.string());
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out.good()) raise(Errc::io_error, "write failed for " + path.string());
}

}  // namespace gaitkit
