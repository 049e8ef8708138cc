#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "alsp/affinity.hpp"
#include "alsp/oracle.hpp"
#include "alsp/sequence.hpp"
#include "alsp/trace_io.hpp"

namespace alsp {

struct BudgetedAffinity {
  double percent = 100.0;
  friend bool operator==(const BudgetedAffinity&, const BudgetedAffinity&) = default;
};

struct Interpolation {
  double percent = 100.0;
  friend bool operator==(const Interpolation&, const Interpolation&) = default;
};

using StageMethod = std::variant<AffinityParams, BudgetedAffinity, InterventionSpec, Interpolation>;

/// Compression applied to the output states of `layer` (layer 0 = input
/// embeddings); blocks after it see the shortened sequence.
struct Stage {
  int layer = 0;
  StageMethod method;
};

struct CompressionPlan {
  std::vector<Stage> stages;
  /// Number of decoder blocks L. 0 derives it from the trace's deepest layer.
  std::size_t total_layers = 0;

  /// Throws InvalidArgument unless stage layers are non-negative and strictly increasing.
  void validate() const;

  /// Input-layer affinity (omega 1) plus deep-layer affinity (omega 3).
  static CompressionPlan dual(int l_in, double tau_in, int l_deep, double tau_deep,
                              std::size_t omega_in = 1, std::size_t omega_deep = 3,
                              std::size_t total_layers = 0);
  /// tau_in 0.80, tau_deep 0.70.
  static CompressionPlan aggressive(int l_in, int l_deep, std::size_t total_layers = 0);
  /// tau_in 0.90, tau_deep 0.80.
  static CompressionPlan conservative(int l_in, int l_deep, std::size_t total_layers = 0);
};

struct StageOutcome {
  int layer = 0;
  std::size_t before = 0;
  std::size_t after = 0;
  /// Input states were reconstructed from uncompressed dumps after an
  /// earlier stage, not produced by a live model.
  bool approx = false;
};

struct CompressionReport {
  std::size_t original_len = 0;
  std::size_t final_len = 0;
  /// Length of H^(l) as produced, l = 0..L. Compression at layer l shows up
  /// from index l + 1 onward.
  std::vector<std::size_t> layer_lengths;
  std::vector<StageOutcome> stages;
  /// Original tokens represented by each surviving token.
  std::vector<Span> members;

  /// final_len / original_len (1 for empty input).
  double frr() const noexcept;
  /// Tokens processed by each of the L decoder blocks (layer_lengths[1..L]).
  std::vector<std::size_t> block_lengths() const;
  bool any_approx() const noexcept;
};

/// Supplies layer-`layer` states for the current tokens, given which original
/// tokens each current token represents. Consulted for layers absent from the trace.
using LayerAdvanceHook =
    std::function<HiddenSequence(int layer, std::span<const Span> members)>;

/// Mean of `states` rows over each member span (trace replay).
HiddenSequence replay_states(const HiddenSequence& states, std::span<const Span> members);

/// Runs every stage in layer order. Stage inputs come from the trace's dumped
/// layer restricted to the surviving members, or from `hook` when the layer
/// is not dumped. Throws MissingLayer or HookFailure.
CompressionReport dual_affinity(const TraceFile& trace, const CompressionPlan& plan,
                                const LayerAdvanceHook& hook = {});

}  // namespace alsp
