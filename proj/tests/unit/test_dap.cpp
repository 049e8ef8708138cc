#include <doctest.h>

#include "alsp/baselines.hpp"
#include "alsp/dap.hpp"
#include "alsp/error.hpp"
#include "alsp/synth.hpp"

using namespace alsp;

namespace {

TraceFile two_layer_trace() {
  SynthSpec spec;
  spec.word_count = 30;
  spec.dim = 32;
  spec.seed = 5;
  spec.layers = {0, 6};
  spec.max_gap_tokens = 2;
  spec.deep_within_similarity = 0.95;
  return generate_synthetic(spec);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an alsp::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("presets") {
  const auto a = CompressionPlan::aggressive(0, 20);
  REQUIRE(a.stages.size() == 2);
  CHECK(std::get<AffinityParams>(a.stages[0].method) == AffinityParams{0.80, 1});
  CHECK(std::get<AffinityParams>(a.stages[1].method) == AffinityParams{0.70, 3});
  const auto c = CompressionPlan::conservative(0, 20);
  CHECK(std::get<AffinityParams>(c.stages[0].method) == AffinityParams{0.90, 1});
  CHECK(std::get<AffinityParams>(c.stages[1].method) == AffinityParams{0.80, 3});
  CHECK_THROWS_AS(CompressionPlan::aggressive(5, 5), Error);
}

TEST_CASE("no stages leaves every layer at full length") {
  const auto trace = two_layer_trace();
  CompressionPlan plan;
  plan.total_layers = 8;
  const auto r = dual_affinity(trace, plan);
  CHECK(r.frr() == 1.0);
  CHECK(r.layer_lengths == std::vector<std::size_t>(9, trace.audio_len()));
  CHECK_FALSE(r.any_approx());
}

TEST_CASE("single input stage matches affinity pooling") {
  const auto trace = two_layer_trace();
  CompressionPlan plan;
  plan.stages.push_back({0, AffinityParams{0.7, 1}});
  plan.total_layers = 8;
  const auto r = dual_affinity(trace, plan);
  const auto gm = affinity_groups(trace.layer(0), {0.7, 1});
  const std::size_t t = trace.audio_len();
  CHECK(r.final_len == gm.group_count());
  CHECK(r.members == gm.spans());
  CHECK(r.frr() == doctest::Approx(static_cast<double>(gm.group_count()) / static_cast<double>(t)));
  CHECK(r.layer_lengths[0] == t);
  for (std::size_t l = 1; l <= 8; ++l) CHECK(r.layer_lengths[l] == gm.group_count());
  CHECK(r.block_lengths().size() == 8);
  CHECK_FALSE(r.stages[0].approx);
}

TEST_CASE("two stages compose like two separate runs") {
  const auto trace = two_layer_trace();
  const auto plan = CompressionPlan::aggressive(0, 6, 8);
  const auto r = dual_affinity(trace, plan);

  const auto first = affinity_groups(trace.layer(0), {0.8, 1});
  const auto replayed = apply_groupmap(trace.layer(6), first);
  const auto second = affinity_groups(replayed, {0.7, 3});
  CHECK(r.final_len == second.group_count());
  const double composed = first.retention_ratio() * second.retention_ratio();
  CHECK(r.frr() == doctest::Approx(composed).epsilon(1e-12));
  REQUIRE(r.stages.size() == 2);
  CHECK(r.stages[0].after == first.group_count());
  CHECK(r.stages[1].before == first.group_count());
  CHECK_FALSE(r.stages[0].approx);
  CHECK(r.stages[1].approx);
  CHECK(r.any_approx());
  for (std::size_t l = 1; l <= 6; ++l) CHECK(r.layer_lengths[l] == first.group_count());
  for (std::size_t l = 7; l <= 8; ++l) CHECK(r.layer_lengths[l] == second.group_count());

  // Members tile the original tokens in order.
  std::size_t pos = 0;
  for (const auto& m : r.members) {
    CHECK(m.begin == pos);
    pos = m.end;
  }
  CHECK(pos == trace.audio_len());
}

TEST_CASE("missing layers and hooks") {
  const auto trace = two_layer_trace();
  const auto plan = CompressionPlan::aggressive(0, 3, 8);
  CHECK(code_of([&] { dual_affinity(trace, plan); }) == ErrorCode::MissingLayer);

  int calls = 0;
  const LayerAdvanceHook hook = [&](int layer, std::span<const Span> members) {
    ++calls;
    CHECK(layer == 3);
    return replay_states(trace.layer(6), members);
  };
  const auto r = dual_affinity(trace, plan, hook);
  CHECK(calls == 1);
  CHECK_FALSE(r.stages[1].approx);
  CHECK(r.final_len == dual_affinity(trace, CompressionPlan::aggressive(0, 6, 8)).final_len);

  const LayerAdvanceHook throws = [](int, std::span<const Span>) -> HiddenSequence {
    throw std::runtime_error("model unavailable");
  };
  CHECK(code_of([&] { dual_affinity(trace, plan, throws); }) == ErrorCode::HookFailure);
  const LayerAdvanceHook short_rows = [](int, std::span<const Span>) {
    return HiddenSequence(1, 32, std::vector<float>(32, 1.0f));
  };
  CHECK(code_of([&] { dual_affinity(trace, plan, short_rows); }) == ErrorCode::HookFailure);

  CompressionPlan deep;
  deep.stages.push_back({9, AffinityParams{}});
  deep.total_layers = 8;
  CHECK(code_of([&] { dual_affinity(trace, deep); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("other stage methods") {
  const auto trace = two_layer_trace();
  const std::size_t t = trace.audio_len();

  CompressionPlan budget;
  budget.stages.push_back({0, BudgetedAffinity{60}});
  budget.total_layers = 2;
  CHECK(dual_affinity(trace, budget).final_len == budget_target(t, 60));

  CompressionPlan merge;
  merge.stages.push_back({0, InterventionSpec{OracleOp::uniform_merge, 1, 0, 0}});
  merge.total_layers = 2;
  const auto align = trace_alignment(trace);
  CHECK(dual_affinity(trace, merge).final_len == align.units().size() + (t - align.aligned_tokens()));

  // Merge by word at the input, then a single token per word survives deeper too.
  CompressionPlan twice;
  twice.stages.push_back({0, InterventionSpec{OracleOp::uniform_merge, 2, 0, 0}});
  twice.stages.push_back({6, InterventionSpec{OracleOp::uniform_drop, 1, 6, 0}});
  twice.total_layers = 8;
  CHECK(dual_affinity(trace, twice).final_len == align.units().size() + (t - align.aligned_tokens()));

  CompressionPlan interp;
  interp.stages.push_back({0, Interpolation{50}});
  interp.total_layers = 2;
  const auto ri = dual_affinity(trace, interp);
  CHECK(ri.final_len == budget_target(t, 50));
  CHECK(ri.members.front().begin == 0);
  CHECK(ri.members.back().end == t);
}

TEST_CASE("plans validate layer order") {
  CompressionPlan p;
  p.stages.push_back({4, AffinityParams{}});
  p.stages.push_back({2, AffinityParams{}});
  CHECK_THROWS_AS(p.validate(), Error);
  p.stages = {{-1, AffinityParams{}}};
  CHECK_THROWS_AS(p.validate(), Error);
}
