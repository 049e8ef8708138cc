#include "alsp/baselines.hpp"

#include <cmath>

#include "alsp/affinity.hpp"
#include "alsp/error.hpp"

namespace alsp {

std::vector<double> interpolation_positions(std::size_t len, std::size_t target) {
  if (len == 0 || target == 0) return {};
  if (target == 1) return {static_cast<double>(len - 1) / 2.0};
  std::vector<double> pos(target);
  for (std::size_t j = 0; j < target; ++j) {
    pos[j] = static_cast<double>(j) * static_cast<double>(len - 1) /
             static_cast<double>(target - 1);
  }
  pos.back() = static_cast<double>(len - 1);
  return pos;
}

HiddenSequence interpolate(const HiddenSequence& seq, double percent) {
  const std::size_t len = seq.rows();
  if (len < 2) throw Error(ErrorCode::TooShort, "interpolation needs at least 2 rows");
  const std::size_t target = budget_target(len, percent);
  if (target == len) return seq;

  const std::size_t d = seq.dim();
  if (target == 1) {
    auto mean = mean_pool(seq, {0, len});
    return HiddenSequence(1, d, std::move(mean), seq.frame_rate(), seq.role());
  }
  std::vector<float> data;
  data.reserve(target * d);
  for (double p : interpolation_positions(len, target)) {
    const auto lo = static_cast<std::size_t>(std::floor(p));
    const double w = p - static_cast<double>(lo);
    const auto a = seq.row(lo);
    if (w == 0.0 || lo + 1 >= len) {
      data.insert(data.end(), a.begin(), a.end());
      continue;
    }
    const auto b = seq.row(lo + 1);
    for (std::size_t j = 0; j < d; ++j) {
      data.push_back(static_cast<float>((1.0 - w) * a[j] + w * b[j]));
    }
  }
  return HiddenSequence(target, d, std::move(data), seq.frame_rate(), seq.role());
}

}  // namespace alsp
