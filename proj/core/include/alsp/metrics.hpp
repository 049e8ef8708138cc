#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alsp/sequence.hpp"

namespace alsp {

// ---------------------------------------------------------------------------
// Transcript scoring

enum class TokenMode { word, character };

/// Word mode lowercases ASCII letters, drops ASCII punctuation other than the
/// apostrophe, and splits on whitespace. Character mode yields every
/// non-whitespace UTF-8 code point.
std::vector<std::string> tokenize(std::string_view text, TokenMode mode);

/// Unit-cost Levenshtein distance over token sequences.
std::size_t edit_distance(std::span<const std::string> reference,
                          std::span<const std::string> hypothesis);

struct ScoredPair {
  std::size_t edits = 0;
  std::size_t reference_len = 0;
};

ScoredPair score_pair(std::string_view reference, std::string_view hypothesis, TokenMode mode);

/// sum(E) / sum(N), or sum(min(E, N)) / sum(N) when clamped.
/// Throws EmptyReferenceCorpus when sum(N) = 0.
double corpus_wer(std::span<const ScoredPair> pairs, bool clamp);

// ---------------------------------------------------------------------------
// Cosine dynamics

enum class NeighborMode { temporal, feature };

/// Mean over tokens of the average cosine to each token's k nearest other
/// tokens. Temporal mode ranks by |i - j| and includes every token tied with
/// the k-th nearest distance; feature mode takes the k largest cosines.
/// Throws TooShort when T < 2.
double neighbor_similarity(const HiddenSequence& seq, std::size_t k,
                           NeighborMode mode = NeighborMode::temporal);

/// Mean cosine over all T(T-1)/2 unordered pairs. Throws TooShort when T < 2.
double global_mean_similarity(const HiddenSequence& seq);

/// Mean over units with >= 2 tokens of the largest adjacent cosine inside
/// the unit. Throws NoQualifyingUnits when no unit qualifies.
double max_within_words(const HiddenSequence& seq, const Alignment& align);

// ---------------------------------------------------------------------------
// Retention

struct RetentionReport {
  std::size_t original_len = 0;
  std::size_t retained = 0;
  /// retained / original over all tokens (gap-inclusive); 1 for empty input.
  double retention_ratio = 1.0;
  /// Same ratio restricted to tokens inside aligned units.
  double aligned_ratio = 1.0;
  std::vector<std::size_t> per_unit_lengths;
  std::size_t gap_input = 0;
  std::size_t gap_output = 0;
};

/// `members` lists, per surviving token, the original tokens it represents.
/// A token is credited to the unit containing its first member.
RetentionReport retention_report(std::span<const Span> members, const Alignment& align);
RetentionReport retention_report(const GroupMap& groups, const Alignment& align);

}  // namespace alsp
