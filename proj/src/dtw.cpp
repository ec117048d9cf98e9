#include "gaitkit/dtw.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "gaitkit/error.hpp"

namespace gaitkit::dtw {

namespace {

// Runs fn(i) for i in [0, n), fanning out to hardware threads when the task
// count warrants it. Each task writes only its own slot, so results are
// independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, bool parallel, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (!parallel || n < 32 || hw == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct LegTask {
  const std::vector<double>* own;
  const std::vector<double>* other;
};

// Tasks are laid out in (comparison subject, comparison trial, own trial)
// order and summed sequentially in that order, so the aggregate is
// bit-reproducible no matter how the evaluations are scheduled.
double averaged_distances(const std::vector<LegTask>& tasks, bool parallel) {
  std::vector<double> distances(tasks.size());
  parallel_for(tasks.size(), parallel, [&](std::size_t i) {
    distances[i] = dtw(*tasks[i].own, *tasks[i].other).distance;
  });
  double sum = 0.0;
  for (double d : distances) sum += d;
  return sum / static_cast<double>(tasks.size());
}

std::vector<LegTask> build_tasks(const std::vector<const std::vector<double>*>& own,
                                 const std::vector<SubjectSequences>& comparison,
                                 std::size_t exclude, Leg leg) {
  std::vector<LegTask> tasks;
  for (std::size_t q = 0; q < comparison.size(); ++q) {
    if (q == exclude) continue;
    const auto& seqs = leg == Leg::Left ? comparison[q].left : comparison[q].right;
    for (const auto& other : seqs) {
      for (const auto* mine : own) tasks.push_back({mine, &other});
    }
  }
  return tasks;
}

MeanDtwResult aggregate(const std::vector<const std::vector<double>*>& left,
                        const std::vector<const std::vector<double>*>& right,
                        const std::vector<SubjectSequences>& comparison, std::size_t exclude,
                        const MeanDtwOptions& options) {
  if (comparison.empty()) raise(Errc::empty_cohort, "no comparison subjects");
  if (left.empty() || right.empty()) {
    raise(Errc::missing_leg, "need at least one sequence per leg");
  }
  const auto left_tasks = build_tasks(left, comparison, exclude, Leg::Left);
  const auto right_tasks = build_tasks(right, comparison, exclude, Leg::Right);
  if (left_tasks.empty() || right_tasks.empty()) {
    raise(Errc::missing_leg, "comparison set has no sequences for one leg");
  }
  MeanDtwResult result;
  result.mean = 0.5 * (averaged_distances(left_tasks, options.parallel) +
                       averaged_distances(right_tasks, options.parallel));
  result.evaluations = left_tasks.size() + right_tasks.size();
  return result;
}

std::vector<const std::vector<double>*> pointers(const std::vector<std::vector<double>>& seqs) {
  std::vector<const std::vector<double>*> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(&s);
  return out;
}

}  // namespace

DtwResult dtw(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) raise(Errc::empty_sequence, "dtw requires nonempty sequences");

  // Accumulated-cost matrix, row-major.
  std::vector<double> acc(n * m);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };

  at(0, 0) = local_cost(a[0], b[0]);
  for (std::size_t j = 1; j < m; ++j) at(0, j) = at(0, j - 1) + local_cost(a[0], b[j]);
  for (std::size_t i = 1; i < n; ++i) at(i, 0) = at(i - 1, 0) + local_cost(a[i], b[0]);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < m; ++j) {
      const double best = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
      at(i, j) = best + local_cost(a[i], b[j]);
    }
  }

  DtwResult result;
  result.distance = at(n - 1, m - 1);

  std::vector<PathStep> reverse;
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  reverse.push_back({i, j});
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = at(i - 1, j - 1);
      const double vert = at(i - 1, j);
      const double horz = at(i, j - 1);
      if (diag <= vert && diag <= horz) {
        --i;
        --j;
      } else if (vert <= horz) {
        --i;
      } else {
        --j;
      }
    }
    reverse.push_back({i, j});
  }
  result.path.assign(reverse.rbegin(), reverse.rend());
  return result;
}

namespace {

void enumerate_paths(std::span<const double> a, std::span<const double> b, std::size_t i,
                     std::size_t j, double acc, double& best) {
  acc += local_cost(a[i], b[j]);
  if (i == a.size() - 1 && j == b.size() - 1) {
    best = std::min(best, acc);
    return;
  }
  if (i + 1 < a.size()) enumerate_paths(a, b, i + 1, j, acc, best);
  if (j + 1 < b.size()) enumerate_paths(a, b, i, j + 1, acc, best);
  if (i + 1 < a.size() && j + 1 < b.size()) enumerate_paths(a, b, i + 1, j + 1, acc, best);
}

}  // namespace

double brute_force_dtw(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) raise(Errc::empty_sequence, "dtw requires nonempty sequences");
  if (a.size() > 10 || b.size() > 10) {
    raise(Errc::too_long, "brute-force enumeration is limited to sequences of length 10");
  }
  double best = std::numeric_limits<double>::infinity();
  enumerate_paths(a, b, 0, 0, 0.0, best);
  return best;
}

MeanDtwResult mean_dtw_patient(const SubjectSequences& patient,
                               const std::vector<SubjectSequences>& controls,
                               const MeanDtwOptions& options) {
  return aggregate(pointers(patient.left), pointers(patient.right), controls, kNoExclusion,
                   options);
}

MeanDtwResult mean_dtw_control(std::size_t subject_index,
                               const std::vector<SubjectSequences>& controls,
                               const MeanDtwOptions& options) {
  if (controls.size() < 2) {
    raise(Errc::cohort_too_small, "leave-self-out aggregation needs at least 2 controls");
  }
  if (subject_index >= controls.size()) {
    raise(Errc::invalid_params, "control subject index out of range");
  }
  const auto& self = controls[subject_index];
  return aggregate(pointers(self.left), pointers(self.right), controls, subject_index, options);
}

MeanDtwResult mean_dtw_trial(const TrialSequences& trial,
                             const std::vector<SubjectSequences>& comparison,
                             std::size_t exclude_subject_index, const MeanDtwOptions& options) {
  if (comparison.empty()) raise(Errc::empty_cohort, "no comparison subjects");
  std::vector<LegTask> left_tasks;
  std::vector<LegTask> right_tasks;
  if (trial.left) {
    left_tasks = build_tasks({trial.left}, comparison, exclude_subject_index, Leg::Left);
  }
  if (trial.right) {
    right_tasks = build_tasks({trial.right}, comparison, exclude_subject_index, Leg::Right);
  }
  if (left_tasks.empty() && right_tasks.empty()) {
    raise(Errc::missing_leg, "trial has no sequences to compare");
  }
  MeanDtwResult result;
  double sum = 0.0;
  int legs = 0;
  if (!left_tasks.empty()) {
    sum += averaged_distances(left_tasks, options.parallel);
    ++legs;
  }
  if (!right_tasks.empty()) {
    sum += averaged_distances(right_tasks, options.parallel);
    ++legs;
  }
  result.mean = sum / legs;
  result.evaluations = left_tasks.size() + right_tasks.size();
  return result;
}

}  // namespace gaitkit::dtw
