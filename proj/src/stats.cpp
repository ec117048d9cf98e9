#include "gaitkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "gaitkit/distributions.hpp"
#include "gaitkit/error.hpp"

namespace gaitkit::stats {

namespace {

constexpr std::array<const char*, kIndexCount> kIndexNames = {
    "v_n", "l_n", "s", "w", "rom_knee", "rom_hip", "d_k", "d_h"};

double sample_mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* index_name(IndexId id) { return kIndexNames[static_cast<int>(id)]; }

std::optional<IndexId> index_from_name(std::string_view name) {
  for (int i = 0; i < kIndexCount; ++i) {
    if (name == kIndexNames[i]) return static_cast<IndexId>(i);
  }
  return std::nullopt;
}

GroupSummary group_summary(std::span<const double> values, const std::string& group_label,
                           const std::string& index_label) {
  if (values.size() < 2) raise(Errc::too_few, "group summary needs at least 2 values");
  GroupSummary s;
  s.group = group_label;
  s.index = index_label;
  s.n = values.size();
  s.mean = sample_mean(values);
  s.sd = sample_sd(values, s.mean);
  return s;
}

IccResult icc(const std::vector<std::vector<double>>& table) {
  const std::size_t n = table.size();
  if (n < 2) raise(Errc::too_few, "ICC needs at least 2 subjects");
  const std::size_t k = table[0].size();
  if (k < 2) raise(Errc::too_few, "ICC needs at least 2 trials");
  for (const auto& row : table) {
    if (row.size() != k) raise(Errc::incomplete_matrix, "subjects have differing trial counts");
  }

  double grand = 0.0;
  for (const auto& row : table) {
    for (double v : row) grand += v;
  }
  grand /= static_cast<double>(n * k);

  std::vector<double> row_mean(n, 0.0);
  std::vector<double> col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += table[i][j];
      col_mean[j] += table[i][j];
    }
  }
  for (auto& m : row_mean) m /= static_cast<double>(k);
  for (auto& m : col_mean) m /= static_cast<double>(n);

  double ss_rows = 0.0;
  double ss_cols = 0.0;
  double ss_err = 0.0;
  double ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
    for (std::size_t j = 0; j < k; ++j) {
      const double resid = table[i][j] - row_mean[i] - col_mean[j] + grand;
      ss_err += resid * resid;
      ss_total += (table[i][j] - grand) * (table[i][j] - grand);
    }
  }
  for (std::size_t j = 0; j < k; ++j) ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);

  if (ss_total == 0.0) raise(Errc::degenerate_variance, "all table entries are identical");

  const double msr = static_cast<double>(k) * ss_rows / static_cast<double>(n - 1);
  const double msc = static_cast<double>(n) * ss_cols / static_cast<double>(k - 1);
  const double mse = ss_err / static_cast<double>((n - 1) * (k - 1));

  IccResult result;
  if (mse == 0.0 && msc == 0.0) {
    // No within-subject variation at all: perfect reliability.
    result.icc = 1.0;
    result.ci_low = 1.0;
    result.ci_high = 1.0;
    return result;
  }

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double denom = msr + (kd - 1.0) * mse + kd * (msc - mse) / nd;
  if (denom == 0.0) raise(Errc::degenerate_variance, "zero denominator in ICC");
  result.icc = (msr - mse) / denom;

  // Shrout-Fleiss 95% CI. g = a/b computed directly to stay finite as the
  // estimate approaches 1.
  const double r = result.icc;
  const double g = kd * r / (nd * (1.0 - r) + kd * r * (nd - 1.0));
  const double num = g * msc + mse;
  const double den = (g * msc) * (g * msc) / (kd - 1.0) + mse * mse / ((nd - 1.0) * (kd - 1.0));
  const double v = num * num / den;
  const double fl = dist::f_quantile(0.975, nd - 1.0, v);
  const double fu = dist::f_quantile(0.975, v, nd - 1.0);
  const double cross = kd * msc + (kd * nd - kd - nd) * mse;
  result.ci_low = nd * (msr - fl * mse) / (fl * cross + nd * msr);
  result.ci_high = nd * (fu * msr - mse) / (cross + nd * fu * msr);
  return result;
}

CorrelationResult pearson_ci(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(Errc::length_mismatch, "correlation inputs differ in length");
  if (x.size() < 4) raise(Errc::too_few, "correlation needs at least 4 pairs");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) raise(Errc::zero_variance, "an input has zero variance");

  CorrelationResult result;
  result.n = x.size();
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double half_width = 1.96 / std::sqrt(static_cast<double>(x.size() - 3));
  const double z = std::atanh(result.r);
  result.ci_low = std::tanh(z - half_width);
  result.ci_high = std::tanh(z + half_width);
  return result;
}

TTestResult paired_t(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(Errc::length_mismatch, "paired t-test inputs differ in length");
  if (x.size() < 2) raise(Errc::too_few, "paired t-test needs at least 2 pairs");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double mean = sample_mean(d);
  const double sd = sample_sd(d, mean);
  if (sd == 0.0) raise(Errc::zero_variance_differences, "paired differences have zero variance");

  TTestResult result;
  result.df = static_cast<double>(x.size() - 1);
  result.t = mean / (sd / std::sqrt(static_cast<double>(x.size())));
  result.p = 2.0 * dist::t_cdf(-std::fabs(result.t), result.df);
  return result;
}

namespace {

template <typename T, typename Fn>
StatCell<T> try_cell(Fn&& fn) {
  StatCell<T> cell;
  try {
    cell.value = fn();
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

std::vector<double> subject_values(const std::vector<SubjectIndexData>& group, IndexId id) {
  std::vector<double> out;
  for (const auto& s : group) {
    if (const auto& v = s.subject_value[static_cast<int>(id)]) out.push_back(*v);
  }
  return out;
}

std::vector<std::vector<double>> trial_matrix(const std::vector<SubjectIndexData>& group,
                                              IndexId id) {
  std::vector<std::vector<double>> table;
  std::size_t width = 0;
  for (const auto& s : group) {
    const auto& row = s.trial_values[static_cast<int>(id)];
    if (row.empty()) raise(Errc::incomplete_matrix, "subject without trial values");
    if (width == 0) width = row.size();
    if (row.size() != width) raise(Errc::incomplete_matrix, "subjects have differing trial counts");
    table.push_back(row);
  }
  if (table.empty()) raise(Errc::too_few, "empty group");
  return table;
}

CorrelationResult trial_level_correlation(const std::vector<SubjectIndexData>& patients,
                                          IndexId id, bool use_msws) {
  std::vector<double> values;
  std::vector<double> scores;
  for (const auto& s : patients) {
    double score = 0.0;
    if (use_msws) {
      if (!s.subject.msws) continue;
      score = *s.subject.msws;
    } else {
      if (!s.subject.ambulation_score) continue;
      score = static_cast<double>(*s.subject.ambulation_score);
    }
    for (double v : s.trial_values[static_cast<int>(id)]) {
      values.push_back(v);
      scores.push_back(score);
    }
  }
  return pearson_ci(values, scores);
}

TTestResult paired_group_test(const CohortIndexData& cohort, IndexId id) {
  std::vector<std::pair<std::string, std::string>> pairing = cohort.pairing;
  if (pairing.empty()) {
    const std::size_t m = std::min(cohort.patients.size(), cohort.controls.size());
    for (std::size_t i = 0; i < m; ++i) {
      pairing.emplace_back(cohort.patients[i].subject.subject_id,
                           cohort.controls[i].subject.subject_id);
    }
  }
  auto find = [](const std::vector<SubjectIndexData>& group, const std::string& sid)
      -> const SubjectIndexData* {
    for (const auto& s : group) {
      if (s.subject.subject_id == sid) return &s;
    }
    return nullptr;
  };
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [pid, cid] : pairing) {
    const auto* p = find(cohort.patients, pid);
    const auto* c = find(cohort.controls, cid);
    if (!p || !c) continue;
    const auto& pv = p->subject_value[static_cast<int>(id)];
    const auto& cv = c->subject_value[static_cast<int>(id)];
    if (!pv || !cv) continue;
    x.push_back(*pv);
    y.push_back(*cv);
  }
  return paired_t(x, y);
}

void compare(std::vector<Discrepancy>& out, const ReferenceTable* reference,
             const std::string& statistic, IndexId id, std::optional<double> recomputed) {
  if (!reference || !recomputed) return;
  for (const auto& row : reference->stats) {
    if (row.statistic != statistic || row.index != id) continue;
    if (std::fabs(*recomputed - row.value) > row.tolerance) {
      out.push_back({statistic, index_name(id), *recomputed, row.value, row.tolerance});
    }
    return;
  }
}

}  // namespace

CohortStats stats_tables(const CohortIndexData& cohort, const ReferenceTable* reference) {
  CohortStats stats;
  for (int i = 0; i < kIndexCount; ++i) {
    const IndexId id = static_cast<IndexId>(i);
    IndexStats& cell = stats.per_index[i];

    cell.ms_summary = try_cell<GroupSummary>([&] {
      return group_summary(subject_values(cohort.patients, id), "patient", index_name(id));
    });
    cell.control_summary = try_cell<GroupSummary>([&] {
      return group_summary(subject_values(cohort.controls, id), "control", index_name(id));
    });
    cell.ms_icc = try_cell<IccResult>([&] { return icc(trial_matrix(cohort.patients, id)); });
    cell.control_icc = try_cell<IccResult>([&] { return icc(trial_matrix(cohort.controls, id)); });
    cell.corr_ambulation = try_cell<CorrelationResult>(
        [&] { return trial_level_correlation(cohort.patients, id, false); });
    cell.corr_msws = try_cell<CorrelationResult>(
        [&] { return trial_level_correlation(cohort.patients, id, true); });
    cell.ttest = try_cell<TTestResult>([&] { return paired_group_test(cohort, id); });

    if (reference) {
      auto value_of = [](const StatCell<GroupSummary>& c, bool want_sd) -> std::optional<double> {
        if (!c.ok()) return std::nullopt;
        return want_sd ? c.value->sd : c.value->mean;
      };
      compare(stats.discrepancies, reference, "ms_mean", id, value_of(cell.ms_summary, false));
      compare(stats.discrepancies, reference, "ms_sd", id, value_of(cell.ms_summary, true));
      compare(stats.discrepancies, reference, "control_mean", id,
              value_of(cell.control_summary, false));
      compare(stats.discrepancies, reference, "control_sd", id,
              value_of(cell.control_summary, true));
      compare(stats.discrepancies, reference, "t_p", id,
              cell.ttest.ok() ? std::optional<double>(cell.ttest.value->p) : std::nullopt);
      compare(stats.discrepancies, reference, "ms_icc", id,
              cell.ms_icc.ok() ? std::optional<double>(cell.ms_icc.value->icc) : std::nullopt);
      compare(stats.discrepancies, reference, "control_icc", id,
              cell.control_icc.ok() ? std::optional<double>(cell.control_icc.value->icc)
                                    : std::nullopt);
      compare(stats.discrepancies, reference, "corr_ambulation", id,
              cell.corr_ambulation.ok() ? std::optional<double>(cell.corr_ambulation.value->r)
                                        : std::nullopt);
      compare(stats.discrepancies, reference, "corr_msws", id,
              cell.corr_msws.ok() ? std::optional<double>(cell.corr_msws.value->r) : std::nullopt);
    }
  }
  return stats;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double to_double(const std::string& cell, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    raise(Errc::malformed_row, "bad numeric cell '" + cell + "' in reference row " +
                                   std::to_string(row));
  }
}

}  // namespace

ReferenceTable parse_reference_csv(std::string_view text) {
  ReferenceTable table;
  std::map<std::string, ReferenceTable::SubjectRow*> patient_rows;
  std::map<std::string, ReferenceTable::SubjectRow*> control_rows;

  std::size_t start = 0;
  std::size_t row_no = 0;
  bool saw_header = false;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string line(nl == std::string_view::npos ? text.substr(start)
                                                  : text.substr(start, nl - start));
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row_no;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;  // header: table,key,index,value,tol
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) {
      raise(Errc::malformed_row, "reference row " + std::to_string(row_no) + " needs 5 cells");
    }
    const auto id = index_from_name(cells[2]);
    if (!id) raise(Errc::malformed_row, "unknown index '" + cells[2] + "' in reference table");
    const double value = to_double(cells[3], row_no);
    if (cells[0] == "indices_patients" || cells[0] == "indices_controls") {
      auto& rows = cells[0] == "indices_patients" ? table.patients : table.controls;
      auto& lookup = cells[0] == "indices_patients" ? patient_rows : control_rows;
      auto it = lookup.find(cells[1]);
      if (it == lookup.end()) {
        rows.push_back({cells[1], {}});
        it = lookup.emplace(cells[1], &rows.back()).first;
        // Re-seat pointers if the vector reallocated.
        lookup.clear();
        for (auto& r : rows) lookup.emplace(r.subject_id, &r);
        it = lookup.find(cells[1]);
      }
      it->second->values[static_cast<int>(*id)] = value;
    } else if (cells[0] == "stats") {
      const double tol = cells[4].empty() ? 0.0 : to_double(cells[4], row_no);
      table.stats.push_back({cells[1], *id, value, tol});
    } else {
      raise(Errc::malformed_row, "unknown reference table section '" + cells[0] + "'");
    }
  }
  return table;
}

CohortIndexData cohort_from_reference(const ReferenceTable& reference) {
  CohortIndexData cohort;
  auto convert = [](const std::vector<ReferenceTable::SubjectRow>& rows, Group group) {
    std::vector<SubjectIndexData> out;
    for (const auto& row : rows) {
      SubjectIndexData s;
      s.subject.subject_id = row.subject_id;
      s.subject.group = group;
      s.subject_value = row.values;
      out.push_back(std::move(s));
    }
    return out;
  };
  cohort.patients = convert(reference.patients, Group::Patient);
  cohort.controls = convert(reference.controls, Group::Control);
  return cohort;
}

}  // namespace gaitkit::stats
