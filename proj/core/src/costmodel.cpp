#include "alsp/costmodel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "alsp/csv.hpp"
#include "alsp/error.hpp"

namespace alsp {
namespace {

using json = nlohmann::json;

volatile std::size_t g_sink = 0;

std::string format_double(double v) { return fmt::format("{:.1f}", v); }

}  // namespace

void ArchProfile::validate() const {
  auto fail = [this](const std::string& what) {
    throw Error(ErrorCode::ConfigError, fmt::format("arch '{}': {}", name, what));
  };
  if (layers < 1 || d_model < 1 || heads < 1 || head_dim < 1 || ffn_dim < 1) {
    fail("layers, d_model, heads, head_dim and ffn_dim must all be >= 1");
  }
  if (heads * head_dim != d_model) {
    fail(fmt::format("heads * head_dim = {} differs from d_model = {}", heads * head_dim, d_model));
  }
  if (kv_heads != 0 && (kv_heads > heads || heads % kv_heads != 0)) {
    fail("kv_heads must divide heads");
  }
}

ArchProfile arch_preset(std::string_view name) {
  // Public model-card shapes of the language backbones; approximate.
  if (name == "qwen2-audio-7b") {
    return {"qwen2-audio-7b", 32, 4096, 32, 128, 0, 11008, FfnKind::gated};
  }
  if (name == "kimi-audio") {
    return {"kimi-audio", 28, 3584, 28, 128, 4, 18944, FfnKind::gated};
  }
  throw Error(ErrorCode::ConfigError, fmt::format("unknown arch preset '{}'", name));
}

std::vector<std::string> arch_preset_names() { return {"qwen2-audio-7b", "kimi-audio"}; }

ArchProfile parse_arch_profile(std::string_view text) {
  ArchProfile arch;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "arch profile must be a JSON object");
    arch.name = j.value("name", std::string("custom"));
    arch.layers = j.at("layers").get<std::size_t>();
    arch.d_model = j.at("d_model").get<std::size_t>();
    arch.heads = j.at("heads").get<std::size_t>();
    arch.head_dim = j.at("head_dim").get<std::size_t>();
    arch.kv_heads = j.value("kv_heads", std::size_t{0});
    arch.ffn_dim = j.at("ffn_dim").get<std::size_t>();
    const auto kind = j.value("ffn_kind", std::string("standard"));
    if (kind == "standard") {
      arch.ffn_kind = FfnKind::standard;
    } else if (kind == "gated") {
      arch.ffn_kind = FfnKind::gated;
    } else {
      throw Error(ErrorCode::ConfigError, fmt::format("ffn_kind '{}' is not standard|gated", kind));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  arch.validate();
  return arch;
}

ArchProfile load_arch_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot open {}", path.string()));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_arch_profile(text);
}

std::string dump_arch_profile(const ArchProfile& arch) {
  json j;
  j["name"] = arch.name;
  j["layers"] = arch.layers;
  j["d_model"] = arch.d_model;
  j["heads"] = arch.heads;
  j["head_dim"] = arch.head_dim;
  if (arch.kv_heads != 0) j["kv_heads"] = arch.kv_heads;
  j["ffn_dim"] = arch.ffn_dim;
  j["ffn_kind"] = arch.ffn_kind == FfnKind::gated ? "gated" : "standard";
  return j.dump(2);
}

std::uint64_t prefill_flops(const ArchProfile& arch, std::span<const std::size_t> lengths,
                            const FlopsOptions& options) {
  arch.validate();
  if (lengths.size() != arch.layers) {
    throw Error(ErrorCode::LengthCountMismatch,
                fmt::format("{} lengths for {} layers", lengths.size(), arch.layers));
  }
  const std::uint64_t d = arch.d_model;
  const std::uint64_t kv = arch.kv_dim();
  const std::uint64_t ffn_mults = arch.ffn_kind == FfnKind::gated ? 6 : 4;
  std::uint64_t total = 0;
  for (std::size_t len : lengths) {
    const std::uint64_t t = len;
    total += 4 * t * d * (d + kv);
    if (options.include_attention_scores) total += 4 * t * t * d;
    total += ffn_mults * t * d * arch.ffn_dim;
  }
  return total;
}

double flops_ratio(const ArchProfile& arch, std::span<const std::size_t> plan_lengths,
                   std::span<const std::size_t> vanilla_lengths, const FlopsOptions& options) {
  const auto plan = prefill_flops(arch, plan_lengths, options);
  const auto vanilla = prefill_flops(arch, vanilla_lengths, options);
  if (vanilla == 0) return plan == 0 ? 100.0 : std::numeric_limits<double>::infinity();
  return ratio_percent(static_cast<double>(plan), static_cast<double>(vanilla));
}

double ratio_percent(double plan, double vanilla) {
  if (!(vanilla > 0.0) || !std::isfinite(vanilla) || !std::isfinite(plan)) {
    throw Error(ErrorCode::InvalidArgument, "vanilla total must be positive and finite");
  }
  return 100.0 * plan / vanilla;
}

std::vector<BenchRow> bench_pooling(std::span<const BenchSize> sizes, const AffinityParams& params,
                                    std::size_t repetitions, std::size_t warmup,
                                    std::uint64_t seed) {
  if (repetitions < 5) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 5");
  params.validate();
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (const auto& size : sizes) {
    std::mt19937_64 rng(seed + size.tokens * 1315423911ULL + size.dim);
    std::normal_distribution<float> normal(0.0f, 1.0f);
    // Smoothly drifting rows so groups of realistic size form.
    std::vector<float> data(size.tokens * size.dim);
    for (std::size_t t = 0; t < size.tokens; ++t) {
      for (std::size_t j = 0; j < size.dim; ++j) {
        const float prev = t > 0 ? data[(t - 1) * size.dim + j] : 0.0f;
        data[t * size.dim + j] = 0.8f * prev + normal(rng);
      }
    }
    const HiddenSequence seq(size.tokens, size.dim, std::move(data));

    for (std::size_t i = 0; i < warmup; ++i) {
      auto r = affinity_groups(seq, params);
      (void)r;
    }
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t i = 0; i < repetitions; ++i) {
      const auto start = std::chrono::steady_clock::now();
      const auto result = affinity_pool(seq, params);
      const auto stop = std::chrono::steady_clock::now();
      g_sink = result.groups.group_count();
      samples.push_back(
          static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()));
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const double median = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    const double p95 = samples[std::max<std::size_t>(rank, 1) - 1];
    rows.push_back({size.tokens, size.dim, params.omega, params.tau, median, p95});
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  CsvWriter csv(out, "bench", {"T", "d", "omega", "tau", "median_ns", "p95_ns"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.tokens), std::to_string(r.dim), std::to_string(r.omega),
             fmt::format("{:.4f}", r.tau), format_double(r.median_ns), format_double(r.p95_ns)});
  }
}

}  // namespace alsp
