#include "alsp/sequence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "alsp/error.hpp"

namespace alsp {

HiddenSequence::HiddenSequence(std::size_t rows, std::size_t dim, std::vector<float> data,
                               double frame_rate, Role role)
    : rows_(rows), dim_(dim), data_(std::move(data)), frame_rate_(frame_rate), role_(role) {
  if (dim_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "dim must be >= 1");
  }
  if (data_.size() != rows_ * dim_) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("data has {} values, expected {}x{}", data_.size(), rows_, dim_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCode::NonFinite,
                  fmt::format("entry ({}, {}) is not finite", i / dim_, i % dim_));
    }
  }
  if (!std::isfinite(frame_rate_) || frame_rate_ <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "frame_rate must be positive");
  }
}

HiddenSequence HiddenSequence::from_rows(const std::vector<std::vector<float>>& rows,
                                         double frame_rate, Role role) {
  if (rows.empty()) {
    return HiddenSequence(0, 1, {}, frame_rate, role);
  }
  const std::size_t dim = rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) {
      throw Error(ErrorCode::LengthMismatch, "rows have differing lengths");
    }
    data.insert(data.end(), r.begin(), r.end());
  }
  return HiddenSequence(rows.size(), dim, std::move(data), frame_rate, role);
}

GroupMap::GroupMap(std::vector<std::size_t> boundaries, std::size_t original_len)
    : boundaries_(std::move(boundaries)), original_len_(original_len) {
  if (original_len_ == 0) {
    if (!boundaries_.empty()) {
      throw Error(ErrorCode::InvalidArgument, "empty sequence cannot have groups");
    }
    return;
  }
  if (boundaries_.empty() || boundaries_.front() != 0) {
    throw Error(ErrorCode::InvalidArgument, "first group must start at 0");
  }
  for (std::size_t g = 1; g < boundaries_.size(); ++g) {
    if (boundaries_[g] <= boundaries_[g - 1]) {
      throw Error(ErrorCode::InvalidArgument, "boundaries must be strictly increasing");
    }
  }
  if (boundaries_.back() >= original_len_) {
    throw Error(ErrorCode::InvalidArgument, "boundary beyond sequence end");
  }
}

GroupMap GroupMap::identity(std::size_t original_len) {
  std::vector<std::size_t> b(original_len);
  for (std::size_t i = 0; i < original_len; ++i) b[i] = i;
  return GroupMap(std::move(b), original_len);
}

GroupMap GroupMap::single(std::size_t original_len) {
  if (original_len == 0) return {};
  return GroupMap({0}, original_len);
}

GroupMap GroupMap::from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> b;
  b.reserve(sizes.size());
  std::size_t pos = 0;
  for (std::size_t s : sizes) {
    if (s == 0) throw Error(ErrorCode::InvalidArgument, "group sizes must be >= 1");
    b.push_back(pos);
    pos += s;
  }
  return GroupMap(std::move(b), pos);
}

std::vector<Span> GroupMap::spans() const {
  std::vector<Span> out;
  out.reserve(group_count());
  for (std::size_t g = 0; g < group_count(); ++g) out.push_back(group(g));
  return out;
}

std::vector<std::size_t> GroupMap::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(group_count());
  for (std::size_t g = 0; g < group_count(); ++g) out.push_back(group(g).size());
  return out;
}

double GroupMap::retention_ratio() const noexcept {
  if (original_len_ == 0) return 1.0;
  return static_cast<double>(group_count()) / static_cast<double>(original_len_);
}

Alignment::Alignment(std::vector<AlignedUnit> units, std::size_t covers)
    : units_(std::move(units)), covers_(covers) {
  std::size_t prev_end = 0;
  for (std::size_t u = 0; u < units_.size(); ++u) {
    const auto& unit = units_[u];
    if (unit.start_token >= unit.end_token) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("unit {} ('{}') is empty", u, unit.label));
    }
    if (unit.end_token > covers_) {
      throw Error(ErrorCode::OutOfRange,
                  fmt::format("unit {} ('{}') ends at {} beyond {}", u, unit.label,
                              unit.end_token, covers_));
    }
    if (u > 0 && unit.start_token < prev_end) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("unit {} ('{}') overlaps its predecessor", u, unit.label));
    }
    prev_end = unit.end_token;
  }
}

std::size_t Alignment::aligned_tokens() const noexcept {
  std::size_t n = 0;
  for (const auto& u : units_) n += u.size();
  return n;
}

std::vector<std::size_t> Alignment::token_owner() const {
  std::vector<std::size_t> owner(covers_, npos);
  for (std::size_t u = 0; u < units_.size(); ++u) {
    for (std::size_t i = units_[u].start_token; i < units_[u].end_token; ++i) owner[i] = u;
  }
  return owner;
}

double dot(std::span<const float> u, std::span<const float> v) noexcept {
  double acc = 0.0;
  const std::size_t n = std::min(u.size(), v.size());
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(u[i]) * v[i];
  return acc;
}

double norm(std::span<const float> v) noexcept { return std::sqrt(dot(v, v)); }

CosineResult cosine_checked(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("cosine of vectors with lengths {} and {}", u.size(), v.size()));
  }
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu < kZeroNorm || nv < kZeroNorm) return {0.0, true};
  return {std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0), false};
}

double cosine(std::span<const float> u, std::span<const float> v) {
  return cosine_checked(u, v).value;
}

std::vector<float> mean_pool(const HiddenSequence& seq, Span interval) {
  if (interval.begin >= interval.end) {
    throw Error(ErrorCode::EmptyInterval,
                fmt::format("interval [{}, {})", interval.begin, interval.end));
  }
  if (interval.end > seq.rows()) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("interval end {} beyond {} rows", interval.end, seq.rows()));
  }
  const std::size_t d = seq.dim();
  std::vector<double> acc(d, 0.0);
  for (std::size_t r = interval.begin; r < interval.end; ++r) {
    const auto row = seq.row(r);
    for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
  }
  const double n = static_cast<double>(interval.size());
  std::vector<float> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j] / n);
  return out;
}

HiddenSequence apply_groupmap(const HiddenSequence& seq, const GroupMap& gm) {
  if (gm.original_len() != seq.rows()) {
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("group map covers {} tokens, sequence has {}", gm.original_len(),
                            seq.rows()));
  }
  std::vector<float> data;
  data.reserve(gm.group_count() * seq.dim());
  for (std::size_t g = 0; g < gm.group_count(); ++g) {
    const Span s = gm.group(g);
    if (s.size() == 1) {
      const auto row = seq.row(s.begin);
      data.insert(data.end(), row.begin(), row.end());
    } else {
      const auto pooled = mean_pool(seq, s);
      data.insert(data.end(), pooled.begin(), pooled.end());
    }
  }
  return HiddenSequence(gm.group_count(), seq.dim(), std::move(data), seq.frame_rate(),
                        seq.role());
}

HiddenSequence select_rows(const HiddenSequence& seq, const std::vector<std::size_t>& indices) {
  std::vector<float> data;
  data.reserve(indices.size() * seq.dim());
  for (std::size_t i : indices) {
    if (i >= seq.rows()) {
      throw Error(ErrorCode::OutOfRange, fmt::format("row {} beyond {} rows", i, seq.rows()));
    }
    const auto row = seq.row(i);
    data.insert(data.end(), row.begin(), row.end());
  }
  return HiddenSequence(indices.size(), seq.dim(), std::move(data), seq.frame_rate(), seq.role());
}

}  // namespace alsp
