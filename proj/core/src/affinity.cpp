#include "alsp/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "alsp/error.hpp"

namespace alsp {
namespace {

std::vector<double> row_norms(const HiddenSequence& seq) {
  std::vector<double> norms(seq.rows());
  for (std::size_t t = 0; t < seq.rows(); ++t) norms[t] = norm(seq.row(t));
  return norms;
}

// Same arithmetic as cosine(), with norms precomputed.
double cosine_with_norms(const HiddenSequence& seq, const std::vector<double>& norms,
                         std::size_t a, std::size_t b) {
  if (norms[a] < kZeroNorm || norms[b] < kZeroNorm) return 0.0;
  return std::clamp(dot(seq.row(a), seq.row(b)) / (norms[a] * norms[b]), -1.0, 1.0);
}

void check_percent(double percent) {
  if (!std::isfinite(percent) || percent <= 0.0 || percent > 100.0) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("budget {}% outside (0, 100]", percent));
  }
}

}  // namespace

void AffinityParams::validate() const {
  if (omega < 1) throw Error(ErrorCode::InvalidArgument, "omega must be >= 1");
  if (!std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be finite");
}

GroupMap affinity_groups(const HiddenSequence& seq, const AffinityParams& params) {
  params.validate();
  const std::size_t len = seq.rows();
  if (len == 0) return {};

  const auto norms = row_norms(seq);
  std::vector<std::size_t> starts{0};
  std::size_t group_start = 0;
  for (std::size_t t = 1; t < len; ++t) {
    // Groups are contiguous, so the last k raw members are rows t-k .. t-1.
    const std::size_t k = std::min(t - group_start, params.omega);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t back = 1; back <= k; ++back) {
      best = std::max(best, cosine_with_norms(seq, norms, t, t - back));
    }
    if (!(best >= params.tau)) {
      starts.push_back(t);
      group_start = t;
    }
  }
  return GroupMap(std::move(starts), len);
}

PoolResult affinity_pool(const HiddenSequence& seq, const AffinityParams& params) {
  GroupMap groups = affinity_groups(seq, params);
  return {apply_groupmap(seq, groups), std::move(groups)};
}

std::size_t budget_target(std::size_t len, double percent) {
  check_percent(percent);
  if (len == 0) return 0;
  const auto target = static_cast<std::size_t>(std::floor(percent * static_cast<double>(len) / 100.0));
  return std::clamp<std::size_t>(target, 1, len);
}

GroupMap budgeted_affinity_groups(const HiddenSequence& seq, double percent) {
  const std::size_t len = seq.rows();
  const std::size_t target = budget_target(len, percent);
  if (len == 0) return {};

  // A boundary's similarity only involves the two raw tokens adjacent to it,
  // so merging elsewhere never changes it: the greedy sequence removes the
  // len - target boundaries of highest similarity (ties to the left).
  const auto norms = row_norms(seq);
  std::vector<double> sim(len, 0.0);
  for (std::size_t b = 1; b < len; ++b) sim[b] = cosine_with_norms(seq, norms, b - 1, b);

  std::vector<std::size_t> order(len - 1);
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });

  std::vector<bool> removed(len, false);
  for (std::size_t i = 0; i < len - target; ++i) removed[order[i]] = true;

  std::vector<std::size_t> starts{0};
  for (std::size_t b = 1; b < len; ++b) {
    if (!removed[b]) starts.push_back(b);
  }
  return GroupMap(std::move(starts), len);
}

PoolResult budgeted_affinity(const HiddenSequence& seq, double percent) {
  GroupMap groups = budgeted_affinity_groups(seq, percent);
  return {apply_groupmap(seq, groups), std::move(groups)};
}

}  // namespace alsp
