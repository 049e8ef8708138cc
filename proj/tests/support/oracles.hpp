#pragma once

// Straightforward reference implementations, written against the
// definitions rather than the production code. Slow on purpose.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

using Row = std::vector<double>;
using Rows = std::vector<Row>;

inline double cos_sim(const Row& a, const Row& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (std::sqrt(aa) < 1e-12 || std::sqrt(bb) < 1e-12) return 0.0;
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

inline Row mean_of(const Rows& group) {
  Row m(group.front().size(), 0.0);
  for (const auto& h : group) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += h[i];
  }
  for (auto& v : m) v /= static_cast<double>(group.size());
  return m;
}

struct Pooled {
  std::vector<std::size_t> sizes;
  Rows rows;
};

// The greedy pooling loop, line by line: keep the current group as a list of
// raw tokens, compare each new token with the group's last k raw tokens.
inline Pooled affinity_pool(const Rows& h, double tau, std::size_t omega) {
  Pooled out;
  if (h.empty()) return out;
  Rows current{h[0]};
  for (std::size_t t = 1; t < h.size(); ++t) {
    const std::size_t k = std::min(current.size(), omega);
    double s_max = -1e300;
    for (std::size_t i = current.size() - k; i < current.size(); ++i) {
      s_max = std::max(s_max, cos_sim(h[t], current[i]));
    }
    if (s_max >= tau) {
      current.push_back(h[t]);
    } else {
      out.rows.push_back(mean_of(current));
      out.sizes.push_back(current.size());
      current = {h[t]};
    }
  }
  out.rows.push_back(mean_of(current));
  out.sizes.push_back(current.size());
  return out;
}

// Exact-budget merging replayed literally: merge the best adjacent pair,
// recompute, repeat.
inline std::vector<std::size_t> budget_merge(const Rows& h, std::size_t target) {
  struct G {
    std::size_t first, last, size;
  };
  std::vector<G> groups;
  for (std::size_t t = 0; t < h.size(); ++t) groups.push_back({t, t, 1});
  while (groups.size() > target) {
    std::size_t best = 0;
    double best_sim = -1e300;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      const double s = cos_sim(h[groups[g].last], h[groups[g + 1].first]);
      if (s > best_sim) {
        best_sim = s;
        best = g;
      }
    }
    groups[best].last = groups[best + 1].last;
    groups[best].size += groups[best + 1].size;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) sizes.push_back(g.size);
  return sizes;
}

// Nearest-k by temporal distance, keeping every token tied at the cutoff distance.
inline double neighbor_temporal(const Rows& h, std::size_t k) {
  const std::size_t n = h.size();
  k = std::min(k, n - 1);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> dist;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.push_back(i > j ? i - j : j - i);
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t cutoff = dist[k - 1];
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      if (j != i && d <= cutoff) {
        sum += cos_sim(h[i], h[j]);
        ++count;
      }
    }
    total += sum / static_cast<double>(count);
  }
  return total / static_cast<double>(n);
}

inline double neighbor_feature(const Rows& h, std::size_t k) {
  const std::size_t n = h.size();
  k = std::min(k, n - 1);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sims;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sims.push_back(cos_sim(h[i], h[j]));
    }
    std::sort(sims.rbegin(), sims.rend());
    double sum = 0;
    for (std::size_t j = 0; j < k; ++j) sum += sims[j];
    total += sum / static_cast<double>(k);
  }
  return total / static_cast<double>(n);
}

inline double global_mean(const Rows& h) {
  double sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (i < j) {
        sum += cos_sim(h[i], h[j]);
        ++pairs;
      }
    }
  }
  return sum / static_cast<double>(pairs);
}

// Full-matrix Levenshtein.
template <typename T>
std::size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
  }
  return d[a.size()][b.size()];
}

// Kept positions of an evenly spaced drop, by enumeration: position i is
// kept when some j in [0, R) lands in [i*R, (i+1)*R) after scaling by n.
inline std::vector<std::size_t> uniform_drop_enumerated(std::size_t n, std::size_t r) {
  if (n <= r) {
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back(i);
    return all;
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (j * n >= i * r && j * n < (i + 1) * r) {
        kept.push_back(i);
        break;
      }
    }
  }
  return kept;
}

// Per-layer cost written out term by term.
inline std::uint64_t flops_by_hand(std::uint64_t d, std::uint64_t kv, std::uint64_t ffn,
                                   bool gated, const std::vector<std::uint64_t>& lengths,
                                   bool scores = true) {
  std::uint64_t total = 0;
  for (std::uint64_t t : lengths) {
    const std::uint64_t q = 2 * t * d * d;
    const std::uint64_t k = 2 * t * d * kv;
    const std::uint64_t v = 2 * t * d * kv;
    const std::uint64_t o = 2 * t * d * d;
    const std::uint64_t qk = 2 * t * t * d;
    const std::uint64_t av = 2 * t * t * d;
    const std::uint64_t mlp = (gated ? 3 : 2) * 2 * t * d * ffn;
    total += q + k + v + o + (scores ? qk + av : 0) + mlp;
  }
  return total;
}

}  // namespace oracle
