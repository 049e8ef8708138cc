#pragma once

#include <cstddef>

#include "alsp/sequence.hpp"

namespace alsp {

/// Threshold and lookback window of affinity pooling.
struct AffinityParams {
  double tau = 0.8;
  std::size_t omega = 1;

  void validate() const;
  friend bool operator==(const AffinityParams&, const AffinityParams&) = default;
};

struct PoolResult {
  HiddenSequence pooled;
  GroupMap groups;
};

/// Greedy temporal grouping. Token t joins the current group when its cosine
/// to any of the last min(|group|, omega) raw tokens of that group is >= tau;
/// otherwise the group is closed and t opens a new one.
GroupMap affinity_groups(const HiddenSequence& seq, const AffinityParams& params);

/// affinity_groups followed by per-group mean pooling.
PoolResult affinity_pool(const HiddenSequence& seq, const AffinityParams& params);

/// max(1, floor(percent / 100 * T)); 0 for T = 0.
std::size_t budget_target(std::size_t len, double percent);

/// Exact-budget variant: repeatedly merges the adjacent group pair whose
/// boundary cosine (last raw token of the left group against the first raw
/// token of the right group) is largest, ties to the smaller left index,
/// until budget_target(T, percent) groups remain.
GroupMap budgeted_affinity_groups(const HiddenSequence& seq, double percent);
PoolResult budgeted_affinity(const HiddenSequence& seq, double percent);

}  // namespace alsp
