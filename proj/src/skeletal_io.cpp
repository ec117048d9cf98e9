#include "gaitkit/skeletal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <json.hpp>

#include "gaitkit/error.hpp"

namespace gaitkit {

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_number(std::string_view cell, std::size_t row) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    raise(Errc::malformed_row,
          "non-numeric cell '" + std::string(cell) + "' in row " + std::to_string(row));
  }
  return value;
}

struct ColumnLayout {
  int t_column = -1;
  // Per column: joint + axis (0=x,1=y,2=z), or -1 for the time column.
  std::vector<std::pair<int, int>> joint_axis;
  std::uint32_t joints = 0;
};

ColumnLayout parse_header(const std::vector<std::string_view>& header) {
  ColumnLayout layout;
  layout.joint_axis.assign(header.size(), {-1, -1});
  std::array<std::uint8_t, kJointCount> axes_seen{};
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string_view name = header[c];
    if (name == "t") {
      if (layout.t_column >= 0) raise(Errc::malformed_row, "duplicate time column");
      layout.t_column = static_cast<int>(c);
      continue;
    }
    if (name.size() < 3 || name[name.size() - 2] != '_') {
      raise(Errc::malformed_row, "unrecognized column '" + std::string(name) + "'");
    }
    const char axis_char = name.back();
    const int axis = axis_char == 'x' ? 0 : axis_char == 'y' ? 1 : axis_char == 'z' ? 2 : -1;
    const auto joint = joint_from_name(name.substr(0, name.size() - 2));
    if (axis < 0 || !joint) {
      raise(Errc::malformed_row, "unrecognized column '" + std::string(name) + "'");
    }
    layout.joint_axis[c] = {static_cast<int>(*joint), axis};
    axes_seen[static_cast<std::size_t>(*joint)] |= static_cast<std::uint8_t>(1u << axis);
  }
  if (layout.t_column < 0) raise(Errc::malformed_row, "missing time column 't'");
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (axes_seen[j] == 0) continue;
    if (axes_seen[j] != 0b111) {
      const bool mandatory = mandatory_joint_mask() & (1u << j);
      raise(mandatory ? Errc::missing_joint : Errc::malformed_row,
            std::string("incomplete coordinate triple for ") + joint_name(static_cast<Joint>(j)));
    }
    layout.joints |= 1u << j;
  }
  if ((layout.joints & mandatory_joint_mask()) != mandatory_joint_mask()) {
    raise(Errc::missing_joint, "header lacks a mandatory lower-extremity joint triple");
  }
  return layout;
}

TrialRecording assemble(std::vector<SkeletalFrame> frames, std::uint32_t joints,
                        const TrialMeta& meta) {
  TrialRecording rec;
  rec.subject_id = meta.subject_id;
  rec.trial_no = meta.trial_no;
  rec.joints = joints;
  rec.frames = std::move(frames);
  rec.nominal_fps = infer_fps(rec.frames);
  validate_recording(rec);
  return rec;
}

std::vector<Joint> joints_in_order(std::uint32_t mask) {
  std::vector<Joint> joints;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    if (mask & (1u << j)) joints.push_back(static_cast<Joint>(j));
  }
  return joints;
}

void append_fixed(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  out += buf;
}

}  // namespace

TrialRecording parse_trial(std::string_view csv_text, const TrialMeta& meta) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= csv_text.size()) {
    const std::size_t nl = csv_text.find('\n', start);
    const std::string_view line =
        strip_cr(nl == std::string_view::npos ? csv_text.substr(start)
                                              : csv_text.substr(start, nl - start));
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) raise(Errc::too_short, "empty document");
  const auto header = split_line(lines[0]);
  const ColumnLayout layout = parse_header(header);
  if (lines.size() < 3) raise(Errc::too_short, "need at least 2 data rows");

  std::vector<SkeletalFrame> frames;
  frames.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (cells.size() != header.size()) {
      raise(Errc::malformed_row, "row " + std::to_string(r) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
    }
    SkeletalFrame frame;
    std::array<Vec3, kJointCount> pos{};
    std::array<std::uint8_t, kJointCount> axes{};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<int>(c) == layout.t_column) {
        frame.t = parse_number(cells[c], r);
        continue;
      }
      if (cells[c].empty()) continue;  // untracked sample
      const auto [joint, axis] = layout.joint_axis[c];
      const double value = parse_number(cells[c], r);
      auto& p = pos[static_cast<std::size_t>(joint)];
      (axis == 0 ? p.x : axis == 1 ? p.y : p.z) = value;
      axes[static_cast<std::size_t>(joint)] |= static_cast<std::uint8_t>(1u << axis);
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
      // A joint with any empty coordinate counts as missing for the frame.
      if (axes[j] == 0b111) frame.set(static_cast<Joint>(j), pos[j]);
    }
    frames.push_back(frame);
  }
  return assemble(std::move(frames), layout.joints, meta);
}

TrialRecording parse_trial_json(std::string_view json_text, const TrialMeta& meta) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::malformed_row, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) raise(Errc::malformed_row, "trial JSON must be an object of columns");

  std::vector<std::string_view> header;
  std::vector<const nlohmann::json*> columns;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    header.push_back(it.key());
    columns.push_back(&it.value());
  }
  const ColumnLayout layout = parse_header(header);

  std::size_t n_rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!columns[c]->is_array()) raise(Errc::malformed_row, "column values must be arrays");
    if (c == 0) {
      n_rows = columns[c]->size();
    } else if (columns[c]->size() != n_rows) {
      raise(Errc::malformed_row, "column lengths differ");
    }
  }
  if (n_rows < 2) raise(Errc::too_short, "need at least 2 data rows");

  std::vector<SkeletalFrame> frames(n_rows);
  std::vector<std::array<Vec3, kJointCount>> pos(n_rows);
  std::vector<std::array<std::uint8_t, kJointCount>> axes(n_rows);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < n_rows; ++r) {
      const auto& cell = (*columns[c])[r];
      if (cell.is_null()) continue;
      if (!cell.is_number()) raise(Errc::malformed_row, "non-numeric cell in row " + std::to_string(r));
      const double value = cell.get<double>();
      if (static_cast<int>(c) == layout.t_column) {
        frames[r].t = value;
        continue;
      }
      const auto [joint, axis] = layout.joint_axis[c];
      auto& p = pos[r][static_cast<std::size_t>(joint)];
      (axis == 0 ? p.x : axis == 1 ? p.y : p.z) = value;
      axes[r][static_cast<std::size_t>(joint)] |= static_cast<std::uint8_t>(1u << axis);
    }
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      if (axes[r][j] == 0b111) frames[r].set(static_cast<Joint>(j), pos[r][j]);
    }
  }
  return assemble(std::move(frames), layout.joints, meta);
}

std::string serialize_trial(const TrialRecording& rec) {
  const auto joints = joints_in_order(rec.joints);
  std::string out = "t";
  for (Joint j : joints) {
    for (const char* axis : {"_x", "_y", "_z"}) {
      out += ',';
      out += joint_name(j);
      out += axis;
    }
  }
  out += '\n';
  for (const auto& frame : rec.frames) {
    append_fixed(out, frame.t);
    for (Joint j : joints) {
      if (frame.has(j)) {
        const Vec3& p = frame.at(j);
        for (double v : {p.x, p.y, p.z}) {
          out += ',';
          append_fixed(out, v);
        }
      } else {
        out += ",,,";
      }
    }
    out += '\n';
  }
  return out;
}

std::string serialize_trial_json(const TrialRecording& rec) {
  nlohmann::json doc = nlohmann::json::object();
  auto& t = doc["t"] = nlohmann::json::array();
  for (const auto& frame : rec.frames) t.push_back(frame.t);
  for (Joint j : joints_in_order(rec.joints)) {
    for (int axis = 0; axis < 3; ++axis) {
      auto& col = doc[std::string(joint_name(j)) + (axis == 0 ? "_x" : axis == 1 ? "_y" : "_z")] =
          nlohmann::json::array();
      for (const auto& frame : rec.frames) {
        if (!frame.has(j)) {
          col.push_back(nullptr);
        } else {
          const Vec3& p = frame.at(j);
          col.push_back(axis == 0 ? p.x : axis == 1 ? p.y : p.z);
        }
      }
    }
  }
  return doc.dump();
}

TrialRecording interpolate_gaps(const TrialRecording& rec, std::size_t max_gap) {
  validate_recording(rec);
  TrialRecording out = rec;
  const std::size_t n = out.frames.size();
  for (Joint j : joints_in_order(rec.joints)) {
    std::size_t i = 0;
    while (i < n) {
      if (out.frames[i].has(j)) {
        ++i;
        continue;
      }
      std::size_t end = i;
      while (end < n && !out.frames[end].has(j)) ++end;
      const std::size_t run = end - i;
      if (i == 0 || end == n) {
        raise(Errc::gap_at_boundary, std::string(joint_name(j)) + " is untracked at a recording boundary");
      }
      if (run > max_gap) {
        raise(Errc::gap_too_long, std::string(joint_name(j)) + " untracked for " +
                                      std::to_string(run) + " frames (max_gap " +
                                      std::to_string(max_gap) + ")");
      }
      const SkeletalFrame& before = out.frames[i - 1];
      const SkeletalFrame& after = out.frames[end];
      const Vec3 a = before.at(j);
      const Vec3 b = after.at(j);
      for (std::size_t k = i; k < end; ++k) {
        const double u = (out.frames[k].t - before.t) / (after.t - before.t);
        out.frames[k].set(j, a + (b - a) * u);
      }
      i = end;
    }
  }
  return out;
}

ArtifactReport detect_artifacts(const TrialRecording& rec, const ArtifactOptions& options) {
  validate_recording(rec);
  ArtifactReport report;
  std::vector<bool> frame_flagged(rec.frames.size(), false);
  for (Joint j : joints_in_order(rec.joints & mandatory_joint_mask())) {
    std::vector<std::size_t> flagged;
    for (std::size_t i = 1; i < rec.frames.size(); ++i) {
      const auto& prev = rec.frames[i - 1];
      const auto& cur = rec.frames[i];
      if (!prev.has(j) || !cur.has(j)) continue;
      const double dt = cur.t - prev.t;
      const double speed = (cur.at(j) - prev.at(j)).norm() / dt;
      if (speed > options.speed_bound_mps) {
        flagged.push_back(i);
        frame_flagged[i] = true;
      }
    }
    if (!flagged.empty()) report.flagged.emplace_back(j, std::move(flagged));
  }
  report.flagged_frame_count =
      static_cast<std::size_t>(std::count(frame_flagged.begin(), frame_flagged.end(), true));
  report.severity = static_cast<double>(report.flagged_frame_count) /
                    static_cast<double>(rec.frames.size());
  report.exclude = report.severity > options.exclude_severity;
  return report;
}

}  // namespace gaitkit
