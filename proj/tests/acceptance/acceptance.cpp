// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "alsp/affinity.hpp"
#include "alsp/cli/cli.hpp"
#include "alsp/costmodel.hpp"
#include "alsp/csv.hpp"
#include "alsp/metrics.hpp"
#include "alsp/oracle.hpp"
#include "alsp/synth.hpp"
#include "alsp/trace_io.hpp"
#include "gen.hpp"

using namespace alsp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("alsp_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome oracle_equivalence() {
  Outcome o;
  gen::Rng rng(1);
  const double taus[] = {0.6, 0.7, 0.8, 0.9};
  const std::size_t omegas[] = {1, 2, 3, 5};
  const auto start = Clock::now();
  for (int c = 0; c < 1000; ++c) {
    const auto seq = gen::plateaus(rng, gen::uniform(rng, 1, 512), gen::uniform(rng, 1, 64));
    const AffinityParams params{taus[gen::uniform(rng, 0, 3)], omegas[gen::uniform(rng, 0, 3)]};
    const auto got = affinity_pool(seq, params);
    const auto want = oracle::affinity_pool(gen::to_rows(seq), params.tau, params.omega);
    if (got.groups.sizes() != want.sizes) {
      o.fail("group maps differ on sequence " + std::to_string(c));
      continue;
    }
    for (std::size_t g = 0; g < want.rows.size(); ++g) {
      const auto row = got.pooled.row(g);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (std::abs(row[j] - want.rows[g][j]) > 1e-6) o.fail("pooled row differs on sequence " + std::to_string(c));
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) o.fail("took " + fixed(elapsed, 1) + " s");
  if (o.pass) o.detail = "1000 sequences identical, " + fixed(elapsed, 2) + " s";
  return o;
}

Outcome boundary_theorem() {
  Outcome o;
  gen::Rng rng(2);
  for (int c = 0; c < 1000; ++c) {
    const std::size_t len = gen::uniform(rng, 1, 512);
    const auto seq = gen::plateaus(rng, len, gen::uniform(rng, 1, 64));
    const auto rows = gen::to_rows(seq);
    std::size_t previous = 0;
    for (double tau : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
      const auto gm = affinity_groups(seq, {tau, 1});
      std::vector<std::size_t> breaks{0};
      for (std::size_t t = 1; t < len; ++t) {
        if (oracle::cos_sim(rows[t], rows[t - 1]) < tau) breaks.push_back(t);
      }
      if (!(gm == GroupMap(breaks, len))) o.fail("boundaries differ on sequence " + std::to_string(c));
      if (gm.group_count() < previous) o.fail("group count fell as tau rose on sequence " + std::to_string(c));
      previous = gm.group_count();
    }
  }
  if (o.pass) o.detail = "1000 sequences, 6 thresholds each";
  return o;
}

Outcome budget_exactness() {
  Outcome o;
  gen::Rng rng(3);
  const auto dir = scratch("budget");
  for (int c = 0; c < 100; ++c) {
    const std::size_t len = gen::uniform(rng, 1, 400);
    TraceFile trace;
    trace.model = "budget";
    trace.dim = 16;
    trace.layers.push_back({0, gen::plateaus(rng, len, 16)});
    const auto path = (dir / "t.trc").string();
    write_trace(path, trace);
    for (int k : {60, 70, 80, 90}) {
      const std::size_t want = std::max<std::size_t>(1, len * static_cast<std::size_t>(k) / 100);
      if (budgeted_affinity_groups(trace.layer(0), k).group_count() != want) {
        o.fail("library missed target on sequence " + std::to_string(c));
      }
      const auto run = cli_run({"compress", "--trace", path, "--layer", "0", "--budget", std::to_string(k)});
      const auto rows = parse_csv(run.out);
      if (run.code != 0 || rows.size() != 2 || rows[1][5] != std::to_string(want)) {
        o.fail("compress --budget missed target on sequence " + std::to_string(c));
      }
    }
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = "100 sequences x K in {60,70,80,90}, library and CLI";
  return o;
}

Outcome operator_contracts() {
  Outcome o;
  gen::Rng rng(4);
  for (int c = 0; c < 300; ++c) {
    const std::size_t len = gen::uniform(rng, 1, 200);
    const auto seq = gen::gaussian(rng, len, 8);
    const auto rows = gen::to_rows(seq);
    const auto align = gen::alignment(rng, len, 25, 3);
    const std::size_t budget = gen::uniform(rng, 1, 12);
    for (auto op : {OracleOp::random_drop, OracleOp::uniform_drop, OracleOp::uniform_merge}) {
      const auto r = apply_intervention(seq, align, {op, budget, 0, rng()});
      for (std::size_t u = 0; u < r.units.size(); ++u) {
        if (r.units[u].output_len != std::min(budget, align.units()[u].size())) {
          o.fail(std::string(to_string(op)) + " kept the wrong count in case " + std::to_string(c));
        }
      }
    }
    const auto merged = uniform_merge(seq, align, 1);
    for (const auto& unit : align.units()) {
      std::size_t i = 0;
      while (i < merged.members.size() && merged.members[i].begin != unit.start_token) ++i;
      if (i == merged.members.size() || merged.members[i].end != unit.end_token) {
        o.fail("R=1 merge did not collapse a unit in case " + std::to_string(c));
        continue;
      }
      const auto mean = oracle::mean_of({rows.begin() + static_cast<long>(unit.start_token),
                                         rows.begin() + static_cast<long>(unit.end_token)});
      const auto got = merged.states.row(i);
      for (std::size_t j = 0; j < mean.size(); ++j) {
        if (std::abs(got[j] - mean[j]) > 1e-6) o.fail("R=1 merge is not the word mean in case " + std::to_string(c));
      }
    }
  }
  for (std::size_t n = 1; n <= 64; ++n) {
    for (std::size_t r = 1; r <= 16; ++r) {
      if (uniform_drop_indices(n, r) != oracle::uniform_drop_enumerated(n, r)) {
        o.fail("uniform drop indices differ at n=" + std::to_string(n) + " R=" + std::to_string(r));
      }
    }
  }
  if (o.pass) o.detail = "300 alignments x 3 operators, enumeration n<=64 R<=16";
  return o;
}

Outcome error_rates() {
  Outcome o;
  gen::Rng rng(5);
  for (int c = 0; c < 500; ++c) {
    std::vector<ScoredPair> pairs(gen::uniform(rng, 1, 20));
    for (auto& p : pairs) p = {gen::uniform(rng, 0, 60), gen::uniform(rng, 0, 20)};
    pairs.front().reference_len += 1;  // keep the corpus non-empty
    std::size_t e = 0, n = 0, clamped = 0;
    for (const auto& p : pairs) {
      e += p.edits;
      n += p.reference_len;
      clamped += std::min(p.edits, p.reference_len);
    }
    const double wer = corpus_wer(pairs, false);
    const double cwer = corpus_wer(pairs, true);
    if (std::abs(wer - double(e) / double(n)) > 1e-12) o.fail("WER differs on corpus " + std::to_string(c));
    if (std::abs(cwer - double(clamped) / double(n)) > 1e-12) o.fail("cWER differs on corpus " + std::to_string(c));
    if (cwer > std::min(wer, 1.0) + 1e-12) o.fail("cWER above min(WER, 1) on corpus " + std::to_string(c));
  }
  for (int c = 0; c < 1000; ++c) {
    auto word = [&rng] {
      std::vector<std::string> w(gen::uniform(rng, 0, 30));
      for (auto& s : w) s = std::string(1, static_cast<char>('a' + gen::uniform(rng, 0, 4)));
      return w;
    };
    const auto a = word(), b = word();
    if (edit_distance(a, b) != oracle::levenshtein(a, b)) o.fail("edit distance differs on pair " + std::to_string(c));
  }
  if (o.pass) o.detail = "500 corpora, 1000 string pairs";
  return o;
}

Outcome flops_ratios() {
  Outcome o;
  const char* pairs[][3] = {{"566.30", "780.94", "72.52"}, {"612.93", "780.94", "78.49"}, {"718.12", "780.94", "91.96"}};
  std::string got;
  for (const auto& p : pairs) {
    const auto run = cli_run({"cost", "--ratio-only", p[0], p[1]});
    const double value = std::stod(run.out);
    if (run.code != 0 || std::abs(value - std::stod(p[2])) > 0.01) o.fail(std::string("ratio for ") + p[0] + " was " + run.out);
    got += (got.empty() ? "" : " ") + run.out.substr(0, run.out.size() - 1);
  }
  // L=2, d=4, ffn=8, standard MLP, T=(3,2).
  const ArchProfile tiny{"tiny", 2, 4, 1, 4, 0, 8, FfnKind::standard};
  const std::vector<std::size_t> lengths{3, 2};
  const auto flops = prefill_flops(tiny, lengths);
  if (flops != 1456) {
    o.fail("ratios " + got + " ok; prefill_flops gives " + std::to_string(flops) +
           " for the hand case, not 1456 (the per-layer terms sum to 912 + 576 = 1488)");
  }
  if (o.pass) o.detail = "ratios " + got + ", hand case 1456";
  return o;
}

HiddenSequence scale_rows(const HiddenSequence& seq, gen::Rng& rng) {
  std::uniform_real_distribution<float> factor(0.25f, 8.0f);
  std::vector<float> data(seq.data().begin(), seq.data().end());
  for (std::size_t t = 0; t < seq.rows(); ++t) {
    const float f = factor(rng);
    for (std::size_t j = 0; j < seq.dim(); ++j) data[t * seq.dim() + j] *= f;
  }
  return HiddenSequence(seq.rows(), seq.dim(), std::move(data));
}

Outcome dynamics_metrics() {
  Outcome o;
  gen::Rng rng(7);
  for (int c = 0; c < 100; ++c) {
    const std::size_t len = gen::uniform(rng, 2, 80);
    const std::size_t dim = gen::uniform(rng, 1, 32);
    const auto align = gen::alignment(rng, len, 10, 2);
    std::vector<float> one(dim);
    for (auto& v : one) v = static_cast<float>(gen::uniform(rng, 1, 9)) * 0.5f;
    std::vector<float> data;
    for (std::size_t t = 0; t < len; ++t) data.insert(data.end(), one.begin(), one.end());
    const HiddenSequence constant(len, dim, data);
    const std::size_t k = gen::uniform(rng, 1, 10);
    bool has_pair = false;
    for (const auto& u : align.units()) has_pair |= u.size() >= 2;
    if (std::abs(neighbor_similarity(constant, k) - 1.0) > 1e-6 ||
        std::abs(neighbor_similarity(constant, k, NeighborMode::feature) - 1.0) > 1e-6 ||
        std::abs(global_mean_similarity(constant) - 1.0) > 1e-6 ||
        (has_pair && std::abs(max_within_words(constant, align) - 1.0) > 1e-6)) {
      o.fail("constant trace scored below 1 in case " + std::to_string(c));
    }

    const auto seq = gen::plateaus(rng, len, dim);
    const double global = global_mean_similarity(seq);
    if (std::abs(neighbor_similarity(seq, len - 1, NeighborMode::feature) - global) > 1e-6) {
      o.fail("feature k=T-1 differs from the global mean in case " + std::to_string(c));
    }
    const auto scaled = scale_rows(seq, rng);
    bool same = std::abs(global_mean_similarity(scaled) - global) <= 1e-6 &&
                std::abs(neighbor_similarity(scaled, k) - neighbor_similarity(seq, k)) <= 1e-6 &&
                std::abs(neighbor_similarity(scaled, k, NeighborMode::feature) -
                         neighbor_similarity(seq, k, NeighborMode::feature)) <= 1e-6;
    if (has_pair) same = same && std::abs(max_within_words(scaled, align) - max_within_words(seq, align)) <= 1e-6;
    if (!same) o.fail("a metric moved under per-token scaling in case " + std::to_string(c));
  }
  if (o.pass) o.detail = "100 constant and 100 random traces";
  return o;
}

double retention_at(double within, std::uint64_t seed) {
  SynthSpec spec;
  spec.word_count = 150;
  spec.within_word_similarity = within;
  spec.across_word_similarity = 0.1;
  spec.seed = seed;
  const auto trace = generate_synthetic(spec);
  return affinity_groups(trace.layer(0), {0.7, 3}).retention_ratio();
}

Outcome synthetic_trend() {
  Outcome o;
  const auto start = Clock::now();
  double worst_high = 0.0, worst_low = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    worst_high = std::max(worst_high, retention_at(0.9, seed));
    worst_low = std::min(worst_low, retention_at(0.3, seed));
  }
  const double elapsed = seconds_since(start);
  const std::string numbers = "within 0.9 keeps at most " + fixed(100 * worst_high, 1) +
                              "%, within 0.3 keeps at least " + fixed(100 * worst_low, 1) + "%, " +
                              fixed(elapsed, 2) + " s";
  if (worst_high >= 0.5 || worst_low <= 0.8 || elapsed >= 10.0) o.fail(numbers);
  if (o.pass) o.detail = numbers;
  return o;
}

std::vector<std::string> pipeline(const fs::path& dir) {
  const auto p = [&dir](const char* f) { return (dir / f).string(); };
  std::vector<std::string> outs;
  auto step = [&outs](std::vector<std::string> args) {
    const auto run = cli_run(std::move(args));
    outs.push_back(std::to_string(run.code));
    outs.push_back(run.out);
  };
  step({"synth", "--seed", "42", "--words", "60", "--gap", "2", "--layers", "0,12", "-o", p("s.trc")});
  step({"compress", "--trace", p("s.trc"), "--layer", "0", "--tau", "0.8", "-o", p("c.trc"), "--report", p("c.csv")});
  step({"dynamics", "--trace", p("s.trc"), "-o", p("d.csv")});
  step({"viz", "--trace", p("s.trc"), "--layer", "12", "--tau", "0.7", "--omega", "3", "-o", p("v.svg")});
  for (const char* f : {"s.trc", "c.trc", "c.csv", "d.csv", "v.svg"}) outs.push_back(slurp(dir / f));
  return outs;
}

Outcome determinism() {
  Outcome o;
  // Same directory both times: status lines echo output paths.
  const auto first = pipeline(scratch("run"));
  const auto second = pipeline(scratch("run"));
  for (std::size_t i = 0; i < 8; i += 2) {
    if (first[i] != "0") o.fail("step exited with " + first[i]);
  }
  if (first != second) o.fail("outputs differ between runs");
  std::size_t bytes = 0;
  for (const auto& s : first) bytes += s.size();
  if (o.pass) o.detail = "synth, compress, dynamics, viz: " + std::to_string(bytes) + " bytes identical";
  fs::remove_all(fs::temp_directory_path() / "alsp_accept_run");
  return o;
}

Outcome not_reproducible() {
  return {true,
          "stated: WER/cWER of real models, TTFT and memory, and absolute GFLOPs need model "
          "inference and are not reproduced here; the property suites stand in for them"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle-equivalence", oracle_equivalence},
      {"omega1-boundary-theorem", boundary_theorem},
      {"budget-exactness", budget_exactness},
      {"operator-contracts", operator_contracts},
      {"error-rate-formulas", error_rates},
      {"flops-ratios", flops_ratios},
      {"dynamics-metrics", dynamics_metrics},
      {"synthetic-trend", synthetic_trend},
      {"end-to-end-determinism", determinism},
      {"not-reproducible", not_reproducible},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
  }
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
