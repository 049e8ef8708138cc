#pragma once

#include <cstddef>
#include <vector>

#include "alsp/sequence.hpp"

namespace alsp {

/// Fractional source positions j * (T - 1) / (m - 1) for j in [0, m); a
/// single position (T - 1) / 2 when m = 1.
std::vector<double> interpolation_positions(std::size_t len, std::size_t target);

/// Signal-agnostic downsampling to m = max(1, floor(K / 100 * T)) rows by
/// linear interpolation with inclusive endpoints. m = 1 yields the global mean.
HiddenSequence interpolate(const HiddenSequence& seq, double percent);

}  // namespace alsp
