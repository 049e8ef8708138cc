#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alsp/affinity.hpp"

namespace alsp {

enum class FfnKind { standard, gated };

/// Decoder shape used by the prefill cost model.
struct ArchProfile {
  std::string name;
  std::size_t layers = 1;
  std::size_t d_model = 1;
  std::size_t heads = 1;
  std::size_t head_dim = 1;
  /// 0 means "same as heads"; otherwise grouped-query K/V projections.
  std::size_t kv_heads = 0;
  std::size_t ffn_dim = 1;
  FfnKind ffn_kind = FfnKind::standard;

  /// Throws ConfigError.
  void validate() const;
  std::size_t kv_dim() const noexcept { return (kv_heads == 0 ? heads : kv_heads) * head_dim; }
};

/// Built-in approximate shapes: "qwen2-audio-7b", "kimi-audio". Throws ConfigError.
ArchProfile arch_preset(std::string_view name);
std::vector<std::string> arch_preset_names();

/// JSON object with keys name, layers, d_model, heads, head_dim, [kv_heads],
/// ffn_dim, ffn_kind ("standard" | "gated"). Throws ConfigError.
ArchProfile parse_arch_profile(std::string_view text);
ArchProfile load_arch_profile(const std::filesystem::path& path);
std::string dump_arch_profile(const ArchProfile& arch);

struct FlopsOptions {
  /// Disables the T^2 attention score/value term (linearity diagnostics).
  bool include_attention_scores = true;
};

// Per layer with T tokens (multiply-accumulate = 2 flops):
//   projections   4 * T * d * (d + kv_dim)   (= 8 T d^2 without GQA)
//   scores/values 4 * T^2 * d
//   FFN           (4 | 6) * T * d * ffn_dim
// Embeddings, LM head, norms, softmax and the audio encoder are excluded.

/// `lengths` holds the token count processed by each decoder layer. Throws
/// LengthCountMismatch unless lengths.size() == arch.layers.
std::uint64_t prefill_flops(const ArchProfile& arch, std::span<const std::size_t> lengths,
                            const FlopsOptions& options = {});

/// 100 * prefill_flops(plan) / prefill_flops(vanilla).
double flops_ratio(const ArchProfile& arch, std::span<const std::size_t> plan_lengths,
                   std::span<const std::size_t> vanilla_lengths, const FlopsOptions& options = {});

/// 100 * plan / vanilla for externally reported totals. Throws InvalidArgument
/// unless vanilla > 0.
double ratio_percent(double plan, double vanilla);

struct BenchRow {
  std::size_t tokens = 0;
  std::size_t dim = 0;
  std::size_t omega = 0;
  double tau = 0.0;
  double median_ns = 0.0;
  double p95_ns = 0.0;
};

struct BenchSize {
  std::size_t tokens = 0;
  std::size_t dim = 0;
};

/// Times affinity_pool on seeded random inputs, one row per size. Requires
/// repetitions >= 5; `warmup` untimed runs precede each cell.
std::vector<BenchRow> bench_pooling(std::span<const BenchSize> sizes, const AffinityParams& params,
                                    std::size_t repetitions, std::size_t warmup = 2,
                                    std::uint64_t seed = 0);

/// CSV with header T,d,omega,tau,median_ns,p95_ns.
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace alsp
