#include "alsp/dap.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "alsp/baselines.hpp"
#include "alsp/error.hpp"

namespace alsp {
namespace {

// Lifts a grouping of the current tokens to spans over original tokens.
std::vector<Span> lift(std::span<const Span> members, const GroupMap& groups) {
  std::vector<Span> out;
  out.reserve(groups.group_count());
  for (std::size_t g = 0; g < groups.group_count(); ++g) {
    const Span s = groups.group(g);
    out.push_back({members[s.begin].begin, members[s.end - 1].end});
  }
  return out;
}

std::vector<Span> lift(std::span<const Span> members, std::span<const Span> local) {
  std::vector<Span> out;
  out.reserve(local.size());
  for (const Span& s : local) out.push_back({members[s.begin].begin, members[s.end - 1].end});
  return out;
}

// Word alignment of the original tokens, projected onto the current tokens.
Alignment project_alignment(const TraceFile& trace, std::span<const Span> members) {
  const Alignment original = trace_alignment(trace);
  const auto owner = original.token_owner();
  std::vector<AlignedUnit> units;
  std::size_t j = 0;
  while (j < members.size()) {
    const std::size_t u = owner[members[j].begin];
    if (u == Alignment::npos) {
      ++j;
      continue;
    }
    const std::size_t begin = j;
    while (j < members.size() && owner[members[j].begin] == u) ++j;
    units.push_back({original.units()[u].label, begin, j});
  }
  return Alignment(std::move(units), members.size());
}

bool is_identity(std::span<const Span> members) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] != Span{i, i + 1}) return false;
  }
  return true;
}

struct StageInput {
  HiddenSequence states;
  bool approx = false;
};

StageInput stage_input(const TraceFile& trace, int layer, std::span<const Span> members,
                       const LayerAdvanceHook& hook) {
  if (const auto* dumped = trace.find_layer(layer)) {
    if (dumped->rows() != trace.audio_len()) {
      throw Error(ErrorCode::LengthMismatch,
                  fmt::format("layer {} has {} rows, trace audio has {}", layer, dumped->rows(),
                              trace.audio_len()));
    }
    return {replay_states(*dumped, members), !is_identity(members)};
  }
  if (!hook) {
    throw Error(ErrorCode::MissingLayer,
                fmt::format("layer {} is not in the trace and no hook was supplied", layer));
  }
  HiddenSequence states;
  try {
    states = hook(layer, members);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::HookFailure, fmt::format("layer {}: {}", layer, e.what()));
  }
  if (states.rows() != members.size()) {
    throw Error(ErrorCode::HookFailure, fmt::format("layer {}: hook returned {} rows for {} tokens",
                                                    layer, states.rows(), members.size()));
  }
  return {std::move(states), false};
}

std::vector<Span> run_stage(const TraceFile& trace, const StageMethod& method,
                            const HiddenSequence& states, std::span<const Span> members) {
  return std::visit(
      [&](const auto& m) -> std::vector<Span> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AffinityParams>) {
          return lift(members, affinity_groups(states, m));
        } else if constexpr (std::is_same_v<T, BudgetedAffinity>) {
          return lift(members, budgeted_affinity_groups(states, m.percent));
        } else if constexpr (std::is_same_v<T, InterventionSpec>) {
          const auto result = apply_intervention(states, project_alignment(trace, members), m);
          return lift(members, result.members);
        } else {
          const std::size_t len = states.rows();
          if (len < 2) return {members.begin(), members.end()};
          std::vector<Span> out;
          for (double p : interpolation_positions(len, budget_target(len, m.percent))) {
            const auto lo = static_cast<std::size_t>(std::floor(p));
            const auto hi = std::min(static_cast<std::size_t>(std::ceil(p)), len - 1);
            out.push_back({members[lo].begin, members[hi].end});
          }
          if (out.size() == 1) out.front() = {members.front().begin, members.back().end};
          return out;
        }
      },
      method);
}

}  // namespace

void CompressionPlan::validate() const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].layer < 0) throw Error(ErrorCode::InvalidArgument, "stage layer must be >= 0");
    if (i > 0 && stages[i].layer <= stages[i - 1].layer) {
      throw Error(ErrorCode::InvalidArgument, "stage layers must be strictly increasing");
    }
    if (const auto* p = std::get_if<AffinityParams>(&stages[i].method)) p->validate();
  }
}

CompressionPlan CompressionPlan::dual(int l_in, double tau_in, int l_deep, double tau_deep,
                                      std::size_t omega_in, std::size_t omega_deep,
                                      std::size_t total_layers) {
  CompressionPlan plan;
  plan.stages.push_back({l_in, AffinityParams{tau_in, omega_in}});
  plan.stages.push_back({l_deep, AffinityParams{tau_deep, omega_deep}});
  plan.total_layers = total_layers;
  plan.validate();
  return plan;
}

CompressionPlan CompressionPlan::aggressive(int l_in, int l_deep, std::size_t total_layers) {
  return dual(l_in, 0.80, l_deep, 0.70, 1, 3, total_layers);
}

CompressionPlan CompressionPlan::conservative(int l_in, int l_deep, std::size_t total_layers) {
  return dual(l_in, 0.90, l_deep, 0.80, 1, 3, total_layers);
}

double CompressionReport::frr() const noexcept {
  if (original_len == 0) return 1.0;
  return static_cast<double>(final_len) / static_cast<double>(original_len);
}

std::vector<std::size_t> CompressionReport::block_lengths() const {
  if (layer_lengths.size() < 2) return {};
  return {layer_lengths.begin() + 1, layer_lengths.end()};
}

bool CompressionReport::any_approx() const noexcept {
  return std::any_of(stages.begin(), stages.end(), [](const auto& s) { return s.approx; });
}

HiddenSequence replay_states(const HiddenSequence& states, std::span<const Span> members) {
  std::vector<float> data;
  data.reserve(members.size() * states.dim());
  for (const Span& m : members) {
    const auto pooled = mean_pool(states, m);
    data.insert(data.end(), pooled.begin(), pooled.end());
  }
  return HiddenSequence(members.size(), states.dim(), std::move(data), states.frame_rate(),
                        states.role());
}

CompressionReport dual_affinity(const TraceFile& trace, const CompressionPlan& plan,
                                const LayerAdvanceHook& hook) {
  plan.validate();
  std::size_t total_layers = plan.total_layers;
  if (total_layers == 0) {
    int deepest = 1;
    for (int l : trace.layer_indices()) deepest = std::max(deepest, l);
    for (const auto& s : plan.stages) deepest = std::max(deepest, s.layer);
    total_layers = static_cast<std::size_t>(deepest);
  }
  for (const auto& s : plan.stages) {
    if (static_cast<std::size_t>(s.layer) > total_layers) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("stage layer {} beyond {} layers", s.layer, total_layers));
    }
  }

  CompressionReport report;
  report.original_len = trace.audio_len();
  report.members.reserve(report.original_len);
  for (std::size_t i = 0; i < report.original_len; ++i) report.members.push_back({i, i + 1});
  report.layer_lengths.assign(total_layers + 1, 0);

  std::size_t next = 0;
  for (std::size_t l = 0; l <= total_layers; ++l) {
    report.layer_lengths[l] = report.members.size();
    if (next < plan.stages.size() && static_cast<std::size_t>(plan.stages[next].layer) == l) {
      const auto& stage = plan.stages[next++];
      const std::size_t before = report.members.size();
      auto input = stage_input(trace, stage.layer, report.members, hook);
      report.members = run_stage(trace, stage.method, input.states, report.members);
      report.stages.push_back({stage.layer, before, report.members.size(), input.approx});
    }
  }
  report.final_len = report.members.size();
  return report;
}

}  // namespace alsp
