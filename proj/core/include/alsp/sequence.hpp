#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace alsp {

enum class Role { audio, text };

/// Half-open token interval [begin, end) over an original sequence.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return end <= begin; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// T x d row-major matrix of token embeddings for one layer.
///
/// Entries are validated finite on construction. A default-constructed
/// sequence has zero rows and dimension 1.
class HiddenSequence {
 public:
  HiddenSequence() = default;
  HiddenSequence(std::size_t rows, std::size_t dim, std::vector<float> data,
                 double frame_rate = 25.0, Role role = Role::audio);

  /// Builds a sequence from explicit rows; every row must have the same length.
  static HiddenSequence from_rows(const std::vector<std::vector<float>>& rows,
                                  double frame_rate = 25.0, Role role = Role::audio);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  double frame_rate() const noexcept { return frame_rate_; }
  Role role() const noexcept { return role_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  friend bool operator==(const HiddenSequence&, const HiddenSequence&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 1;
  std::vector<float> data_;
  double frame_rate_ = 25.0;
  Role role_ = Role::audio;
};

/// Ordered partition of [0, T) into contiguous groups, stored as group starts.
class GroupMap {
 public:
  GroupMap() = default;
  GroupMap(std::vector<std::size_t> boundaries, std::size_t original_len);

  static GroupMap identity(std::size_t original_len);
  static GroupMap single(std::size_t original_len);
  static GroupMap from_sizes(const std::vector<std::size_t>& sizes);

  const std::vector<std::size_t>& boundaries() const noexcept { return boundaries_; }
  std::size_t original_len() const noexcept { return original_len_; }
  std::size_t group_count() const noexcept { return boundaries_.size(); }

  Span group(std::size_t g) const noexcept {
    const std::size_t end = g + 1 < boundaries_.size() ? boundaries_[g + 1] : original_len_;
    return {boundaries_[g], end};
  }
  std::vector<Span> spans() const;
  std::vector<std::size_t> sizes() const;

  /// group_count / original_len; 1.0 for an empty sequence.
  double retention_ratio() const noexcept;
  bool is_identity() const noexcept { return group_count() == original_len_; }

  friend bool operator==(const GroupMap&, const GroupMap&) = default;

 private:
  std::vector<std::size_t> boundaries_;
  std::size_t original_len_ = 0;
};

/// A word (or other semantic unit) mapped to a token interval.
struct AlignedUnit {
  std::string label;
  std::size_t start_token = 0;
  std::size_t end_token = 0;

  Span span() const noexcept { return {start_token, end_token}; }
  std::size_t size() const noexcept { return end_token - start_token; }
  friend bool operator==(const AlignedUnit&, const AlignedUnit&) = default;
};

/// Ordered, non-overlapping units over [0, covers). Gaps are unaligned tokens.
class Alignment {
 public:
  Alignment() = default;
  Alignment(std::vector<AlignedUnit> units, std::size_t covers);

  const std::vector<AlignedUnit>& units() const noexcept { return units_; }
  std::size_t covers() const noexcept { return covers_; }
  std::size_t aligned_tokens() const noexcept;

  /// Unit index of every token, or npos for gap tokens.
  std::vector<std::size_t> token_owner() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  friend bool operator==(const Alignment&, const Alignment&) = default;

 private:
  std::vector<AlignedUnit> units_;
  std::size_t covers_ = 0;
};

struct CosineResult {
  double value = 0.0;
  bool zero_vector = false;
};

/// Norm below which a vector is treated as zero by cosine().
inline constexpr double kZeroNorm = 1e-12;

/// Cosine similarity with the zero-vector diagnostic exposed.
CosineResult cosine_checked(std::span<const float> u, std::span<const float> v);

/// Cosine similarity in [-1, 1]; 0 when either argument is (numerically) zero.
double cosine(std::span<const float> u, std::span<const float> v);

/// Euclidean norm accumulated in double.
double norm(std::span<const float> v) noexcept;
double dot(std::span<const float> u, std::span<const float> v) noexcept;

/// Mean of rows [interval.begin, interval.end), accumulated in double.
std::vector<float> mean_pool(const HiddenSequence& seq, Span interval);

/// Mean-pools every group of `gm`; metadata of `seq` is preserved.
HiddenSequence apply_groupmap(const HiddenSequence& seq, const GroupMap& gm);

/// Gathers the listed rows, in the given order.
HiddenSequence select_rows(const HiddenSequence& seq, const std::vector<std::size_t>& indices);

}  // namespace alsp
