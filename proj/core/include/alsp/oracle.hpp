#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "alsp/sequence.hpp"

namespace alsp {

// Word-aligned interventions: every aligned unit is reduced to at most R
// tokens. Units with n <= R are kept whole and unaligned gap tokens pass
// through unchanged.

enum class OracleOp { random_drop, uniform_drop, uniform_merge };

std::string_view to_string(OracleOp op) noexcept;
/// Accepts "random-drop", "uniform_drop", etc. Throws InvalidArgument.
OracleOp parse_oracle_op(std::string_view name);

struct InterventionSpec {
  OracleOp op = OracleOp::uniform_merge;
  std::size_t budget = 1;
  int layer = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const InterventionSpec&, const InterventionSpec&) = default;
};

struct UnitOutcome {
  std::size_t unit = 0;
  std::size_t input_len = 0;
  std::size_t output_len = 0;
};

struct InterventionResult {
  HiddenSequence states;
  /// Input tokens represented by each output token, in temporal order.
  /// Drops produce singletons; merges produce their bins.
  std::vector<Span> members;
  std::vector<UnitOutcome> units;
  std::size_t gap_tokens = 0;
  /// Set when the members partition the input (uniform_merge).
  std::optional<GroupMap> groups;
};

/// floor(j * n / R) for j in [0, R), deduplicated; all of [0, n) when n <= R.
std::vector<std::size_t> uniform_drop_indices(std::size_t n, std::size_t budget);

/// min(R, n) bin sizes; the first n mod R bins hold one extra token.
std::vector<std::size_t> uniform_merge_sizes(std::size_t n, std::size_t budget);

InterventionResult random_drop(const HiddenSequence& seq, const Alignment& align,
                               std::size_t budget, std::uint64_t seed);
InterventionResult uniform_drop(const HiddenSequence& seq, const Alignment& align,
                                std::size_t budget);
InterventionResult uniform_merge(const HiddenSequence& seq, const Alignment& align,
                                 std::size_t budget);

InterventionResult apply_intervention(const HiddenSequence& seq, const Alignment& align,
                                      const InterventionSpec& spec);

}  // namespace alsp
