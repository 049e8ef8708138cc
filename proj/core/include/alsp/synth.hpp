#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "alsp/sequence.hpp"
#include "alsp/trace_io.hpp"

namespace alsp {

/// Parameters of a synthetic trace with word-structured similarity.
///
/// Each word has a unit direction; tokens are that direction scaled by a
/// signal amplitude plus isotropic Gaussian noise of norm ~noise_sigma. The
/// amplitude is chosen so the expected within-word cosine equals the target,
/// and word directions share a common component so that tokens of adjacent
/// words have the across-word target cosine. noise_sigma = 0 yields exact
/// copies of the word direction.
struct SynthSpec {
  std::size_t word_count = 20;
  std::size_t min_tokens_per_word = 3;
  std::size_t max_tokens_per_word = 8;
  std::size_t dim = 64;
  double within_word_similarity = 0.9;
  double across_word_similarity = 0.1;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
  double frame_rate = 25.0;
  /// Unaligned tokens inserted between words, uniform in [0, max_gap_tokens].
  std::size_t max_gap_tokens = 0;
  std::vector<int> layers{0};
  /// Within-word target at the last listed layer; targets are interpolated
  /// linearly over the layer list. Defaults to within_word_similarity.
  std::optional<double> deep_within_similarity;

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
};

inline constexpr double kSynthTolerance = 0.05;
inline constexpr int kSynthMaxAttempts = 10;

/// Deterministic in `spec`. Throws UnreachableTarget when the measured
/// within-word similarity of some layer misses its target by more than
/// kSynthTolerance after kSynthMaxAttempts draws.
TraceFile generate_synthetic(const SynthSpec& spec);

/// Mean cosine over adjacent token pairs inside each unit; nullopt when no
/// unit has two tokens.
std::optional<double> measure_within_word_similarity(const HiddenSequence& seq,
                                                     const Alignment& align);

/// Mean cosine between the last token of each unit and the first token of
/// the next unit; nullopt for fewer than two units.
std::optional<double> measure_across_word_similarity(const HiddenSequence& seq,
                                                     const Alignment& align);

}  // namespace alsp
