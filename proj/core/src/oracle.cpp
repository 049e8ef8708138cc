#include "alsp/oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include <fmt/format.h>

#include "alsp/error.hpp"
#include "rng.hpp"

namespace alsp {
namespace {

// Per-unit rule: given the unit size, returns the relative spans of its output tokens.
using UnitRule = std::function<std::vector<Span>(std::size_t n)>;

InterventionResult run(const HiddenSequence& seq, const Alignment& align, std::size_t budget,
                       const UnitRule& rule) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget R must be >= 1");
  if (align.covers() != seq.rows()) {
    throw Error(ErrorCode::AlignmentMismatch,
                fmt::format("alignment covers {} tokens, sequence has {}", align.covers(),
                            seq.rows()));
  }
  InterventionResult result;
  std::size_t pos = 0;
  auto pass_gap = [&](std::size_t until) {
    for (; pos < until; ++pos) {
      result.members.push_back({pos, pos + 1});
      ++result.gap_tokens;
    }
  };
  for (std::size_t u = 0; u < align.units().size(); ++u) {
    const auto& unit = align.units()[u];
    pass_gap(unit.start_token);
    const auto spans = rule(unit.size());
    for (const Span& s : spans) {
      result.members.push_back({unit.start_token + s.begin, unit.start_token + s.end});
    }
    result.units.push_back({u, unit.size(), spans.size()});
    pos = unit.end_token;
  }
  pass_gap(seq.rows());

  std::vector<float> data;
  data.reserve(result.members.size() * seq.dim());
  bool partition = true;
  std::size_t expected = 0;
  for (const Span& m : result.members) {
    partition = partition && m.begin == expected;
    expected = m.end;
    if (m.size() == 1) {
      const auto row = seq.row(m.begin);
      data.insert(data.end(), row.begin(), row.end());
    } else {
      const auto pooled = mean_pool(seq, m);
      data.insert(data.end(), pooled.begin(), pooled.end());
    }
  }
  partition = partition && expected == seq.rows();
  result.states = HiddenSequence(result.members.size(), seq.dim(), std::move(data),
                                 seq.frame_rate(), seq.role());
  if (partition) {
    std::vector<std::size_t> starts;
    starts.reserve(result.members.size());
    for (const Span& m : result.members) starts.push_back(m.begin);
    result.groups = GroupMap(std::move(starts), seq.rows());
  }
  return result;
}

std::vector<Span> singletons(const std::vector<std::size_t>& indices) {
  std::vector<Span> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back({i, i + 1});
  return out;
}

}  // namespace

std::string_view to_string(OracleOp op) noexcept {
  switch (op) {
    case OracleOp::random_drop: return "random-drop";
    case OracleOp::uniform_drop: return "uniform-drop";
    case OracleOp::uniform_merge: return "uniform-merge";
  }
  return "unknown";
}

OracleOp parse_oracle_op(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '_', '-');
  if (norm == "random-drop") return OracleOp::random_drop;
  if (norm == "uniform-drop") return OracleOp::uniform_drop;
  if (norm == "uniform-merge") return OracleOp::uniform_merge;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown operator '{}'", name));
}

std::vector<std::size_t> uniform_drop_indices(std::size_t n, std::size_t budget) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget R must be >= 1");
  std::vector<std::size_t> out;
  if (n <= budget) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (std::size_t j = 0; j < budget; ++j) {
    const std::size_t idx = j * n / budget;
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

std::vector<std::size_t> uniform_merge_sizes(std::size_t n, std::size_t budget) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget R must be >= 1");
  const std::size_t bins = std::min(budget, n);
  std::vector<std::size_t> sizes;
  if (bins == 0) return sizes;
  const std::size_t base = n / bins;
  const std::size_t extra = n % bins;
  for (std::size_t b = 0; b < bins; ++b) sizes.push_back(base + (b < extra ? 1 : 0));
  return sizes;
}

InterventionResult random_drop(const HiddenSequence& seq, const Alignment& align,
                               std::size_t budget, std::uint64_t seed) {
  detail::Rng rng(seed);
  return run(seq, align, budget, [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n > budget) {
      // Partial Fisher-Yates: the first `budget` slots become the sample.
      for (std::size_t i = 0; i < budget; ++i) {
        const std::size_t j = i + detail::uniform_index(rng, n - i);
        std::swap(idx[i], idx[j]);
      }
      idx.resize(budget);
      std::sort(idx.begin(), idx.end());
    }
    return singletons(idx);
  });
}

InterventionResult uniform_drop(const HiddenSequence& seq, const Alignment& align,
                                std::size_t budget) {
  return run(seq, align, budget,
             [&](std::size_t n) { return singletons(uniform_drop_indices(n, budget)); });
}

InterventionResult uniform_merge(const HiddenSequence& seq, const Alignment& align,
                                 std::size_t budget) {
  return run(seq, align, budget, [&](std::size_t n) {
    std::vector<Span> spans;
    std::size_t pos = 0;
    for (std::size_t s : uniform_merge_sizes(n, budget)) {
      spans.push_back({pos, pos + s});
      pos += s;
    }
    return spans;
  });
}

InterventionResult apply_intervention(const HiddenSequence& seq, const Alignment& align,
                                      const InterventionSpec& spec) {
  switch (spec.op) {
    case OracleOp::random_drop: return random_drop(seq, align, spec.budget, spec.seed);
    case OracleOp::uniform_drop: return uniform_drop(seq, align, spec.budget);
    case OracleOp::uniform_merge: return uniform_merge(seq, align, spec.budget);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown operator");
}

}  // namespace alsp
