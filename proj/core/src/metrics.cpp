#include "alsp/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>

#include <fmt/format.h>

#include "alsp/error.hpp"

namespace alsp {
namespace {

bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: emit as-is
}

void require_rows(const HiddenSequence& seq, std::size_t min_rows) {
  if (seq.rows() < min_rows) {
    throw Error(ErrorCode::TooShort,
                fmt::format("needs at least {} tokens, got {}", min_rows, seq.rows()));
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, TokenMode mode) {
  std::vector<std::string> tokens;
  if (mode == TokenMode::character) {
    for (std::size_t i = 0; i < text.size();) {
      const auto c = static_cast<unsigned char>(text[i]);
      const std::size_t n = std::min(utf8_length(c), text.size() - i);
      const std::string_view cp = text.substr(i, n);
      i += n;
      if (n == 1 && is_ascii_space(c)) continue;
      if (cp == "\xE3\x80\x80") continue;  // U+3000 ideographic space
      tokens.emplace_back(cp);
    }
    return tokens;
  }
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_ascii_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (c == '\'' || !is_ascii_punct(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t edit_distance(std::span<const std::string> reference,
                          std::span<const std::string> hypothesis) {
  const std::size_t m = hypothesis.size();
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= reference.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

ScoredPair score_pair(std::string_view reference, std::string_view hypothesis, TokenMode mode) {
  const auto ref = tokenize(reference, mode);
  const auto hyp = tokenize(hypothesis, mode);
  return {edit_distance(ref, hyp), ref.size()};
}

double corpus_wer(std::span<const ScoredPair> pairs, bool clamp) {
  std::size_t edits = 0;
  std::size_t total = 0;
  for (const auto& p : pairs) {
    edits += clamp ? std::min(p.edits, p.reference_len) : p.edits;
    total += p.reference_len;
  }
  if (total == 0) {
    throw Error(ErrorCode::EmptyReferenceCorpus, "total reference length is zero");
  }
  return static_cast<double>(edits) / static_cast<double>(total);
}

double neighbor_similarity(const HiddenSequence& seq, std::size_t k, NeighborMode mode) {
  require_rows(seq, 2);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const std::size_t len = seq.rows();
  const std::size_t kk = std::min(k, len - 1);
  double total = 0.0;

  if (mode == NeighborMode::temporal) {
    for (std::size_t i = 0; i < len; ++i) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t dist = 1; count < kk; ++dist) {
        if (dist <= i) {
          sum += cosine(seq.row(i), seq.row(i - dist));
          ++count;
        }
        if (i + dist < len) {
          sum += cosine(seq.row(i), seq.row(i + dist));
          ++count;
        }
      }
      total += sum / static_cast<double>(count);
    }
    return total / static_cast<double>(len);
  }

  std::vector<double> sims;
  sims.reserve(len - 1);
  for (std::size_t i = 0; i < len; ++i) {
    sims.clear();
    for (std::size_t j = 0; j < len; ++j) {
      if (j != i) sims.push_back(cosine(seq.row(i), seq.row(j)));
    }
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(kk), sims.end(),
                      std::greater<>());
    total += std::accumulate(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(kk), 0.0) /
             static_cast<double>(kk);
  }
  return total / static_cast<double>(len);
}

double global_mean_similarity(const HiddenSequence& seq) {
  require_rows(seq, 2);
  const std::size_t len = seq.rows();
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = i + 1; j < len; ++j) sum += cosine(seq.row(i), seq.row(j));
  }
  return sum / (static_cast<double>(len) * static_cast<double>(len - 1) / 2.0);
}

double max_within_words(const HiddenSequence& seq, const Alignment& align) {
  if (align.covers() != seq.rows()) {
    throw Error(ErrorCode::AlignmentMismatch,
                fmt::format("alignment covers {} tokens, sequence has {}", align.covers(),
                            seq.rows()));
  }
  double sum = 0.0;
  std::size_t units = 0;
  for (const auto& u : align.units()) {
    if (u.size() < 2) continue;
    double best = -1.0;
    for (std::size_t t = u.start_token + 1; t < u.end_token; ++t) {
      best = std::max(best, cosine(seq.row(t - 1), seq.row(t)));
    }
    sum += best;
    ++units;
  }
  if (units == 0) throw Error(ErrorCode::NoQualifyingUnits, "no unit spans two or more tokens");
  return sum / static_cast<double>(units);
}

RetentionReport retention_report(std::span<const Span> members, const Alignment& align) {
  RetentionReport report;
  report.original_len = align.covers();
  report.retained = members.size();
  report.per_unit_lengths.assign(align.units().size(), 0);
  const auto owner = align.token_owner();
  for (const Span& m : members) {
    if (m.empty() || m.end > align.covers()) {
      throw Error(ErrorCode::LengthMismatch,
                  fmt::format("member [{}, {}) outside {} tokens", m.begin, m.end, align.covers()));
    }
    const std::size_t u = owner[m.begin];
    if (u == Alignment::npos) {
      ++report.gap_output;
    } else {
      ++report.per_unit_lengths[u];
    }
  }
  const std::size_t aligned = align.aligned_tokens();
  report.gap_input = report.original_len - aligned;
  if (report.original_len > 0) {
    report.retention_ratio =
        static_cast<double>(report.retained) / static_cast<double>(report.original_len);
  }
  if (aligned > 0) {
    report.aligned_ratio = static_cast<double>(report.retained - report.gap_output) /
                           static_cast<double>(aligned);
  }
  return report;
}

RetentionReport retention_report(const GroupMap& groups, const Alignment& align) {
  if (groups.original_len() != align.covers()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("group map covers {} tokens, alignment {}", groups.original_len(),
                            align.covers()));
  }
  const auto spans = groups.spans();
  return retention_report(spans, align);
}

}  // namespace alsp
