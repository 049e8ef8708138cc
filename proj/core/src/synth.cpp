#include "alsp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <fmt/format.h>

#include "alsp/error.hpp"
#include "rng.hpp"

namespace alsp {
namespace {

using detail::Rng;

std::vector<double> gaussian_vector(Rng& rng, std::size_t dim, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
}

struct Layout {
  std::vector<Span> words;
  std::size_t total = 0;
};

Layout draw_layout(const SynthSpec& spec, Rng& rng) {
  Layout layout;
  const std::size_t span = spec.max_tokens_per_word - spec.min_tokens_per_word + 1;
  std::size_t pos = 0;
  for (std::size_t w = 0; w < spec.word_count; ++w) {
    if (spec.max_gap_tokens > 0) pos += detail::uniform_index(rng, spec.max_gap_tokens + 1);
    const std::size_t n = spec.min_tokens_per_word + detail::uniform_index(rng, span);
    layout.words.push_back({pos, pos + n});
    pos += n;
  }
  if (spec.max_gap_tokens > 0) pos += detail::uniform_index(rng, spec.max_gap_tokens + 1);
  layout.total = pos;
  return layout;
}

HiddenSequence draw_layer(const SynthSpec& spec, const Layout& layout,
                          const std::vector<double>& shared,
                          const std::vector<std::vector<double>>& own, double within, Rng& rng) {
  const std::size_t d = spec.dim;
  const bool exact = spec.noise_sigma == 0.0 || within >= 1.0;
  const double amplitude =
      exact ? 1.0 : spec.noise_sigma * std::sqrt(within / (1.0 - within));
  const double noise_std = exact ? 0.0 : spec.noise_sigma / std::sqrt(static_cast<double>(d));
  const double mix = std::clamp(spec.across_word_similarity / within, 0.0, 1.0);

  std::vector<float> data(layout.total * d, 0.0f);
  // Gap tokens: low-energy noise, unrelated to any word.
  std::normal_distribution<double> gap(0.0, 0.1 / std::sqrt(static_cast<double>(d)));
  for (auto& x : data) x = static_cast<float>(gap(rng));

  for (std::size_t w = 0; w < layout.words.size(); ++w) {
    std::vector<double> dir(d);
    for (std::size_t j = 0; j < d; ++j) {
      dir[j] = std::sqrt(mix) * shared[j] + std::sqrt(1.0 - mix) * own[w][j];
    }
    normalize(dir);
    for (std::size_t t = layout.words[w].begin; t < layout.words[w].end; ++t) {
      const auto noise = exact ? std::vector<double>(d, 0.0) : gaussian_vector(rng, d, noise_std);
      for (std::size_t j = 0; j < d; ++j) {
        data[t * d + j] = static_cast<float>(amplitude * dir[j] + noise[j]);
      }
    }
  }
  return HiddenSequence(layout.total, d, std::move(data), spec.frame_rate);
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (dim < 2) fail("dim must be >= 2");
  if (min_tokens_per_word < 1 || max_tokens_per_word < min_tokens_per_word) {
    fail("tokens_per_word range must satisfy 1 <= min <= max");
  }
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!in_unit(within_word_similarity) || !in_unit(across_word_similarity)) {
    fail("similarity targets must lie in [0, 1]");
  }
  if (!(within_word_similarity > across_word_similarity)) {
    fail("within_word_similarity must exceed across_word_similarity");
  }
  if (deep_within_similarity) {
    if (!in_unit(*deep_within_similarity) || !(*deep_within_similarity > across_word_similarity)) {
      fail("deep_within_similarity must lie in (across, 1]");
    }
  }
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) fail("noise_sigma must be >= 0");
  if (!std::isfinite(frame_rate) || frame_rate <= 0.0) fail("frame_rate must be positive");
  if (layers.empty()) fail("at least one layer is required");
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (layers[i] <= layers[i - 1]) fail("layers must be strictly increasing");
  }
  if (layers.front() < 0) fail("layer indices must be >= 0");
}

std::optional<double> measure_within_word_similarity(const HiddenSequence& seq,
                                                     const Alignment& align) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& u : align.units()) {
    for (std::size_t t = u.start_token + 1; t < u.end_token; ++t) {
      sum += cosine(seq.row(t - 1), seq.row(t));
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> measure_across_word_similarity(const HiddenSequence& seq,
                                                     const Alignment& align) {
  const auto& units = align.units();
  if (units.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t u = 1; u < units.size(); ++u) {
    sum += cosine(seq.row(units[u - 1].end_token - 1), seq.row(units[u].start_token));
  }
  return sum / static_cast<double>(units.size() - 1);
}

TraceFile generate_synthetic(const SynthSpec& spec) {
  spec.validate();

  Rng layout_rng(detail::derive_seed(spec.seed, 0));
  const Layout layout = draw_layout(spec, layout_rng);

  TraceFile trace;
  trace.model = "synthetic";
  trace.dim = spec.dim;
  trace.frame_rate = spec.frame_rate;
  trace.text_len = spec.word_count;
  for (std::size_t w = 0; w < layout.words.size(); ++w) {
    const std::string label = fmt::format("w{}", w);
    trace.words.push_back({label, static_cast<double>(layout.words[w].begin) / spec.frame_rate,
                           static_cast<double>(layout.words[w].end) / spec.frame_rate});
    if (w > 0) trace.transcript += ' ';
    trace.transcript += label;
  }
  trace.attributes["synth.seed"] = std::to_string(spec.seed);

  std::vector<AlignedUnit> units;
  for (std::size_t w = 0; w < layout.words.size(); ++w) {
    units.push_back({trace.words[w].label, layout.words[w].begin, layout.words[w].end});
  }
  const Alignment align(std::move(units), layout.total);

  const double deep = spec.deep_within_similarity.value_or(spec.within_word_similarity);
  const std::size_t layer_count = spec.layers.size();
  for (std::size_t li = 0; li < layer_count; ++li) {
    const double frac =
        layer_count > 1 ? static_cast<double>(li) / static_cast<double>(layer_count - 1) : 0.0;
    const double within =
        spec.within_word_similarity + frac * (deep - spec.within_word_similarity);

    bool accepted = false;
    double measured = 0.0;
    for (int attempt = 0; attempt < kSynthMaxAttempts && !accepted; ++attempt) {
      Rng rng(detail::derive_seed(spec.seed, 1 + li * kSynthMaxAttempts + attempt));
      auto shared = gaussian_vector(rng, spec.dim, 1.0);
      normalize(shared);
      std::vector<std::vector<double>> own;
      for (std::size_t w = 0; w < spec.word_count; ++w) {
        auto r = gaussian_vector(rng, spec.dim, 1.0);
        double proj = 0.0;
        for (std::size_t j = 0; j < spec.dim; ++j) proj += r[j] * shared[j];
        for (std::size_t j = 0; j < spec.dim; ++j) r[j] -= proj * shared[j];
        normalize(r);
        own.push_back(std::move(r));
      }
      HiddenSequence states = draw_layer(spec, layout, shared, own, within, rng);
      const auto m = measure_within_word_similarity(states, align);
      measured = m.value_or(within);
      const bool exact = spec.noise_sigma == 0.0 || within >= 1.0;
      if (exact || !m || std::abs(measured - within) <= kSynthTolerance) {
        trace.layers.push_back({spec.layers[li], std::move(states)});
        accepted = true;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::UnreachableTarget,
                  fmt::format("layer {}: within-word similarity {:.4f} misses target {:.4f} after {} "
                              "attempts",
                              spec.layers[li], measured, within, kSynthMaxAttempts));
    }
  }
  return trace;
}

}  // namespace alsp
