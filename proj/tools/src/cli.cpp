#include "alsp/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "alsp/affinity.hpp"
#include "alsp/cli/viz.hpp"
#include "alsp/costmodel.hpp"
#include "alsp/csv.hpp"
#include "alsp/dap.hpp"
#include "alsp/error.hpp"
#include "alsp/metrics.hpp"
#include "alsp/oracle.hpp"
#include "alsp/synth.hpp"
#include "alsp/trace_io.hpp"

namespace alsp::cli {
namespace {

namespace fs = std::filesystem;

// Thrown for failures that map to a specific exit code without a library error.
struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void usage(std::string message) { throw ExitError{kUsage, std::move(message)}; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingLayer:
      return kMissingLayer;
    case ErrorCode::AlignmentMismatch:
    case ErrorCode::NoQualifyingUnits:
      return kMissingAlignment;
    case ErrorCode::EmptyReferenceCorpus:
      return kCorpusMismatch;
    case ErrorCode::ConfigError:
      return kConfigError;
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnreachableTarget:
    case ErrorCode::TooShort:
    case ErrorCode::LengthCountMismatch:
      return kUsage;
    default:
      return kFailure;
  }
}

std::string pct(double ratio) { return fmt::format("{:.2f}", 100.0 * ratio); }
std::string ratio4(double v) { return fmt::format("{:.4f}", v); }
std::string num6(double v) { return fmt::format("{:.6f}", v); }

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T value{};
    if (!(is >> value) || !(is >> std::ws).eof()) {
      usage(fmt::format("{}: cannot parse '{}'", what, item));
    }
    out.push_back(value);
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorCode::IoError, fmt::format("short write to {}", path.string()));
}

// Writes to the named file, or to `fallback` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
  } else {
    write_text(path, text);
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

ArchProfile resolve_arch(const std::string& arch) {
  if (fs::is_regular_file(arch)) return load_arch_profile(arch);
  return arch_preset(arch);
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += std::to_string(sizes[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  std::optional<std::uint64_t> seed;
  std::optional<double> deep_within;
  std::string layers = "0";
  std::string output;
};

int cmd_synth(SynthArgs& a, std::ostream& out) {
  a.spec.seed = *a.seed;
  a.spec.layers = parse_list<int>(a.layers, "--layers");
  a.spec.deep_within_similarity = a.deep_within;
  const TraceFile trace = generate_synthetic(a.spec);
  write_trace(a.output, trace);
  out << fmt::format("wrote {} ({} tokens, {} words, {} layers)\n", a.output, trace.audio_len(),
                     trace.words.size(), trace.layers.size());
  return kOk;
}

struct CompressArgs {
  std::string trace;
  int layer = 0;
  double tau = 0.8;
  std::size_t omega = 1;
  std::optional<double> budget;
  std::string output;
  std::string report;
};

int cmd_compress(const CompressArgs& a, std::ostream& out) {
  TraceFile trace = read_trace(a.trace);
  const HiddenSequence& states = trace.layer(a.layer);
  PoolResult result;
  if (a.budget) {
    result = budgeted_affinity(states, *a.budget);
  } else {
    result = affinity_pool(states, AffinityParams{a.tau, a.omega});
  }

  std::ostringstream csv_text;
  CsvWriter csv(csv_text, "compress",
                {"layer", "tau", "omega", "budget", "T_before", "T_after", "retention"});
  csv.row({std::to_string(a.layer), a.budget ? "" : ratio4(a.tau),
           a.budget ? "" : std::to_string(a.omega), a.budget ? pct(*a.budget / 100.0) : "",
           std::to_string(states.rows()), std::to_string(result.groups.group_count()),
           pct(result.groups.retention_ratio())});
  emit(a.report, csv_text.str(), out);

  if (!a.output.empty()) {
    // Every layer is pooled over the same groups, so a later stage can run
    // on a deeper layer of the output (trace replay).
    TraceFile compressed = trace;
    for (auto& l : compressed.layers) {
      l.states = l.index == a.layer ? result.pooled : apply_groupmap(l.states, result.groups);
    }
    // Word timestamps no longer index the pooled tokens.
    compressed.words.clear();
    compressed.attributes["compress.layer"] = std::to_string(a.layer);
    if (a.budget) {
      compressed.attributes["compress.budget"] = pct(*a.budget / 100.0);
    } else {
      compressed.attributes["compress.tau"] = ratio4(a.tau);
      compressed.attributes["compress.omega"] = std::to_string(a.omega);
    }
    compressed.attributes["compress.group_sizes"] = join_sizes(result.groups.sizes());
    write_trace(a.output, compressed);
  }
  return kOk;
}

struct InterveneArgs {
  std::string trace;
  int layer = 0;
  std::string op;
  std::size_t budget = 1;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string report;
};

int cmd_intervene(const InterveneArgs& a, std::ostream& out) {
  InterventionSpec spec;
  spec.op = parse_oracle_op(a.op);
  spec.budget = a.budget;
  spec.layer = a.layer;
  if (spec.op == OracleOp::random_drop && !a.seed) usage("random-drop requires --seed");
  spec.seed = a.seed.value_or(0);

  TraceFile trace = read_trace(a.trace);
  const HiddenSequence& states = trace.layer(a.layer);
  if (trace.words.empty()) {
    throw ExitError{kMissingAlignment, fmt::format("{} has no word timestamps", a.trace)};
  }
  const Alignment align = trace_alignment(trace);
  InterventionResult result = apply_intervention(states, align, spec);

  std::ostringstream csv_text;
  CsvWriter csv(csv_text, "intervene",
                {"unit", "label", "start_token", "end_token", "input_len", "output_len"});
  for (const auto& u : result.units) {
    const auto& unit = align.units()[u.unit];
    csv.row({std::to_string(u.unit), unit.label, std::to_string(unit.start_token),
             std::to_string(unit.end_token), std::to_string(u.input_len),
             std::to_string(u.output_len)});
  }
  emit(a.report, csv_text.str(), out);

  if (!a.output.empty()) {
    TraceFile reduced = trace;
    for (auto& l : reduced.layers) {
      l.states = l.index == a.layer ? result.states : replay_states(l.states, result.members);
    }
    reduced.words.clear();
    reduced.attributes["intervene.op"] = std::string(to_string(spec.op));
    reduced.attributes["intervene.budget"] = std::to_string(spec.budget);
    reduced.attributes["intervene.layer"] = std::to_string(spec.layer);
    if (a.seed) reduced.attributes["intervene.seed"] = std::to_string(*a.seed);
    reduced.attributes["intervene.gap_tokens"] = std::to_string(result.gap_tokens);
    write_trace(a.output, reduced);
  }
  return kOk;
}

struct DapArgs {
  std::string trace;
  std::string preset;
  std::optional<double> tau_in;
  std::optional<double> tau_deep;
  std::optional<int> l_in;
  std::optional<int> l_deep;
  std::optional<std::size_t> omega_in;
  std::optional<std::size_t> omega_deep;
  std::string arch = "qwen2-audio-7b";
  std::string report;
};

int cmd_dap(const DapArgs& a, std::ostream& out) {
  const ArchProfile arch = resolve_arch(a.arch);

  std::optional<double> tau_in = a.tau_in;
  std::optional<double> tau_deep = a.tau_deep;
  std::size_t omega_in = a.omega_in.value_or(1);
  std::size_t omega_deep = a.omega_deep.value_or(3);
  if (!a.preset.empty()) {
    const CompressionPlan preset =
        a.preset == "aggressive" ? CompressionPlan::aggressive(0, 1) : CompressionPlan::conservative(0, 1);
    const auto& in = std::get<AffinityParams>(preset.stages[0].method);
    const auto& deep = std::get<AffinityParams>(preset.stages[1].method);
    if (!tau_in) tau_in = in.tau;
    if (!tau_deep) tau_deep = deep.tau;
    if (!a.omega_in) omega_in = in.omega;
    if (!a.omega_deep) omega_deep = deep.omega;
  }

  CompressionPlan plan;
  plan.total_layers = arch.layers;
  if (a.l_in) {
    if (!tau_in) usage("--l-in needs --tau-in or --preset");
    plan.stages.push_back({*a.l_in, AffinityParams{*tau_in, omega_in}});
  }
  if (a.l_deep) {
    if (!tau_deep) usage("--l-deep needs --tau-deep or --preset");
    plan.stages.push_back({*a.l_deep, AffinityParams{*tau_deep, omega_deep}});
  }

  const TraceFile trace = read_trace(a.trace);
  const CompressionReport report = dual_affinity(trace, plan);

  const std::vector<std::size_t> vanilla(arch.layers, report.original_len);
  const auto blocks = report.block_lengths();
  const double ratio =
      report.original_len == 0 ? 100.0 : flops_ratio(arch, blocks, vanilla);

  CsvWriter csv(out, "dap",
                {"arch", "original_tokens", "final_tokens", "frr", "flops_ratio", "stages", "approx"});
  csv.row({arch.name, std::to_string(report.original_len), std::to_string(report.final_len),
           pct(report.frr()), fmt::format("{:.2f}", ratio), std::to_string(report.stages.size()),
           report.any_approx() ? "yes" : "no"});

  if (!a.report.empty()) {
    std::ostringstream text;
    CsvWriter layers(text, "dap_layers", {"layer", "tokens", "stage_after", "approx"});
    for (std::size_t l = 0; l < report.layer_lengths.size(); ++l) {
      std::string stage_after;
      std::string approx;
      for (const auto& s : report.stages) {
        if (static_cast<std::size_t>(s.layer) == l) {
          stage_after = std::to_string(s.after);
          approx = s.approx ? "yes" : "no";
        }
      }
      layers.row({std::to_string(l), std::to_string(report.layer_lengths[l]), stage_after, approx});
    }
    write_text(a.report, text.str());
  }
  return kOk;
}

struct DynamicsArgs {
  std::vector<std::string> traces;
  std::string ks = "1,3,5,10";
  std::string mode = "temporal";
  std::string aggregate = "utterance";
  std::vector<int> layers;
  std::string output;
};

// Running per-utterance mean and weighted (corpus-pooled) mean of one metric.
struct MetricTotals {
  double sum = 0.0;
  std::size_t count = 0;
  double weighted = 0.0;
  double weight = 0.0;

  void add(double value, double w) {
    sum += value;
    ++count;
    weighted += w * value;
    weight += w;
  }
};

int cmd_dynamics(const DynamicsArgs& a, std::ostream& out, std::ostream& err) {
  const auto ks = parse_list<std::size_t>(a.ks, "--k");
  if (ks.empty()) usage("--k needs at least one value");
  const NeighborMode mode = a.mode == "feature" ? NeighborMode::feature : NeighborMode::temporal;

  // Keyed by (layer, metric, k); k is empty for the two k-free metrics.
  std::map<std::tuple<int, int, std::string>, MetricTotals> totals;
  bool within_missing = false;
  for (const auto& path : a.traces) {
    const TraceFile trace = read_trace(path);
    const std::vector<int> layers = a.layers.empty() ? trace.layer_indices() : a.layers;
    for (int l : layers) trace.layer(l);

    const bool aligned = !trace.words.empty();
    const Alignment align = aligned ? trace_alignment(trace) : Alignment();
    double units = 0.0;
    for (const auto& u : align.units()) units += u.size() >= 2 ? 1.0 : 0.0;
    within_missing |= !aligned;

    for (int l : layers) {
      const HiddenSequence& seq = trace.layer(l);
      if (seq.rows() < 2) continue;
      const auto len = static_cast<double>(seq.rows());
      for (std::size_t k : ks) {
        totals[{l, 0, std::to_string(k)}].add(neighbor_similarity(seq, k, mode), len);
      }
      totals[{l, 1, ""}].add(global_mean_similarity(seq), len * (len - 1) / 2);
      if (!aligned) continue;
      try {
        totals[{l, 2, ""}].add(max_within_words(seq, align), units);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoQualifyingUnits) throw;
        within_missing = true;
      }
    }
  }

  static const char* const kMetric[] = {"neighbor", "global_mean", "max_within_words"};
  std::ostringstream text;
  CsvWriter csv(text, "dynamics", {"layer", "metric", "k", "value", "aggregate"});
  for (const auto& [key, t] : totals) {
    const auto& [layer, metric, k] = key;
    if (a.aggregate != "pooled") {
      csv.row({std::to_string(layer), kMetric[metric], k, num6(t.sum / static_cast<double>(t.count)),
               "utterance"});
    }
    if (a.aggregate != "utterance") {
      csv.row({std::to_string(layer), kMetric[metric], k, num6(t.weighted / t.weight), "pooled"});
    }
  }
  emit(a.output, text.str(), out);
  if (within_missing) {
    err << "alsp: no usable word alignment; max_within_words omitted\n";
    return kMissingAlignment;
  }
  return kOk;
}

struct SweepArgs {
  std::vector<std::string> traces;
  std::string layers;
  std::string taus;
  std::string omegas;
  std::string output;
};

std::size_t sweep_threads(std::size_t cells) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ALSP_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      usage(fmt::format("ALSP_THREADS='{}' is not a positive integer", env));
    }
  }
  return std::max<std::size_t>(1, std::min(n, cells));
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  auto layers = parse_list<int>(a.layers, "--layers");
  auto taus = parse_list<double>(a.taus, "--taus");
  auto omegas = parse_list<std::size_t>(a.omegas, "--omegas");
  auto sort_unique = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(layers);
  sort_unique(taus);
  sort_unique(omegas);
  if (layers.empty() || taus.empty() || omegas.empty()) usage("empty sweep grid");
  for (std::size_t w : omegas) AffinityParams{0.0, w}.validate();

  std::vector<fs::path> paths;
  for (const auto& t : a.traces) {
    if (fs::is_directory(t)) {
      for (const auto& entry : fs::directory_iterator(t)) {
        if (entry.is_regular_file() && entry.path().extension() == ".trc") {
          paths.push_back(entry.path());
        }
      }
    } else {
      paths.emplace_back(t);
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) usage("no trace files to sweep");

  std::vector<TraceFile> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths) {
    traces.push_back(read_trace(p));
    for (int l : layers) traces.back().layer(l);
  }

  struct Cell {
    std::size_t trace;
    int layer;
    double tau;
    std::size_t omega;
    std::size_t groups = 0;
    double retention = 1.0;
    long long wall_ns = 0;
  };
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (int l : layers) {
      for (double tau : taus) {
        for (std::size_t w : omegas) cells.push_back({t, l, tau, w});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      const auto start = std::chrono::steady_clock::now();
      const GroupMap groups =
          affinity_groups(traces[c.trace].layer(c.layer), AffinityParams{c.tau, c.omega});
      const auto stop = std::chrono::steady_clock::now();
      c.groups = groups.group_count();
      c.retention = groups.retention_ratio();
      c.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    }
  };
  const std::size_t n_threads = sweep_threads(cells.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream text;
  CsvWriter csv(text, "sweep", {"trace", "layer", "tau", "omega", "retention", "groups", "wall_ns"});
  for (const auto& c : cells) {
    csv.row({paths[c.trace].filename().string(), std::to_string(c.layer), ratio4(c.tau),
             std::to_string(c.omega), pct(c.retention), std::to_string(c.groups),
             std::to_string(c.wall_ns)});
  }
  emit(a.output, text.str(), out);
  return kOk;
}

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  bool clamp = false;
  std::string mode = "word";
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const auto refs = split_lines(read_text(a.ref));
  const auto hyps = split_lines(read_text(a.hyp));
  if (refs.size() != hyps.size()) {
    throw ExitError{kCorpusMismatch, fmt::format("{} reference lines but {} hypothesis lines",
                                                 refs.size(), hyps.size())};
  }
  const TokenMode mode = a.mode == "char" ? TokenMode::character : TokenMode::word;
  std::vector<ScoredPair> pairs;
  pairs.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) pairs.push_back(score_pair(refs[i], hyps[i], mode));
  const double cwer = corpus_wer(pairs, true);
  if (a.clamp) {
    out << fmt::format("cWER {}\n", pct(cwer));
  } else {
    out << fmt::format("WER {}\ncWER {}\n", pct(corpus_wer(pairs, false)), pct(cwer));
  }
  return kOk;
}

struct VizArgs {
  std::string trace;
  int layer = 0;
  double tau = 0.8;
  std::size_t omega = 1;
  std::optional<double> budget;
  std::string format = "svg";
  std::string output;
};

int cmd_viz(const VizArgs& a, std::ostream& out) {
  const TraceFile trace = read_trace(a.trace);
  const HiddenSequence& states = trace.layer(a.layer);
  const GroupMap groups = a.budget ? budgeted_affinity_groups(states, *a.budget)
                                   : affinity_groups(states, AffinityParams{a.tau, a.omega});
  const Alignment align = trace.words.empty() ? Alignment({}, states.rows()) : trace_alignment(trace);
  const std::string text =
      a.format == "text" ? viz::render_text(groups, align) : viz::render_svg(groups, align);
  emit(a.output, text, out);
  return kOk;
}

struct CostArgs {
  std::string arch;
  std::string lengths;
  std::optional<std::size_t> vanilla;
  std::string from_dap;
  std::vector<double> ratio_only;
  bool no_scores = false;
};

std::vector<std::size_t> read_lengths(const std::string& arg) {
  const bool inline_list =
      !arg.empty() && arg.find_first_not_of("0123456789, ") == std::string::npos && !fs::exists(arg);
  std::string text = inline_list ? arg : read_text(arg);
  std::replace_if(text.begin(), text.end(), [](char c) { return c == '\n' || c == '\r' || c == ' ' || c == '\t'; }, ',');
  return parse_list<std::size_t>(text, "--lengths");
}

int cmd_cost(const CostArgs& a, std::ostream& out) {
  if (!a.ratio_only.empty()) {
    out << fmt::format("{:.2f}\n", ratio_percent(a.ratio_only[0], a.ratio_only[1]));
    return kOk;
  }
  if (a.arch.empty()) usage("--arch is required unless --ratio-only is given");
  const ArchProfile arch = resolve_arch(a.arch);

  std::vector<std::size_t> plan;
  std::size_t vanilla_len = 0;
  if (!a.from_dap.empty()) {
    const auto rows = parse_csv(read_text(a.from_dap));
    if (rows.size() < 2 || rows[0].empty() || rows[0][0] != "layer" || rows[0].size() < 2) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("{} is not a dap layer report", a.from_dap));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const std::size_t len = std::stoull(rows[r].at(1));
      if (r == 1) {
        vanilla_len = len;
      } else {
        plan.push_back(len);
      }
    }
  } else if (!a.lengths.empty()) {
    plan = read_lengths(a.lengths);
    if (plan.empty()) usage("--lengths is empty");
    vanilla_len = *std::max_element(plan.begin(), plan.end());
  } else {
    usage("one of --lengths, --from-dap or --ratio-only is required");
  }
  if (a.vanilla) vanilla_len = *a.vanilla;

  const FlopsOptions options{!a.no_scores};
  const std::vector<std::size_t> vanilla(arch.layers, vanilla_len);
  const std::uint64_t plan_flops = prefill_flops(arch, plan, options);
  const std::uint64_t vanilla_flops = prefill_flops(arch, vanilla, options);
  const double ratio =
      vanilla_flops == 0 ? 100.0
                         : ratio_percent(static_cast<double>(plan_flops), static_cast<double>(vanilla_flops));

  CsvWriter csv(out, "cost",
                {"arch", "plan_flops", "vanilla_flops", "plan_gflops", "vanilla_gflops", "ratio"},
                "flops: multiply-accumulate = 2; decoder blocks only (no embeddings, LM head, "
                "norms, softmax, rotary or audio encoder)");
  csv.row({arch.name, std::to_string(plan_flops), std::to_string(vanilla_flops),
           fmt::format("{:.2f}", static_cast<double>(plan_flops) / 1e9),
           fmt::format("{:.2f}", static_cast<double>(vanilla_flops) / 1e9), fmt::format("{:.2f}", ratio)});
  return kOk;
}

struct BenchArgs {
  std::string sizes = "1000x64,2000x64,4000x64";
  double tau = 0.8;
  std::size_t omega = 3;
  std::size_t reps = 11;
  std::size_t warmup = 2;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<BenchSize> sizes;
  for (const auto& item : parse_list<std::string>(a.sizes, "--sizes")) {
    const auto x = item.find('x');
    if (x == std::string::npos) usage(fmt::format("--sizes: expected TxD, got '{}'", item));
    try {
      sizes.push_back({std::stoull(item.substr(0, x)), std::stoull(item.substr(x + 1))});
    } catch (const std::exception&) {
      usage(fmt::format("--sizes: expected TxD, got '{}'", item));
    }
  }
  const auto rows = bench_pooling(sizes, AffinityParams{a.tau, a.omega}, a.reps, a.warmup, a.seed);
  std::ostringstream text;
  write_bench_csv(text, rows);
  emit(a.output, text.str(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affinity pooling toolkit for speech-LM hidden-state traces", "alsp"};
  app.set_version_flag("--version", "alsp 0.1.0");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic word-structured trace");
  s->add_option("--words", synth.spec.word_count, "Number of words");
  s->add_option("--min-tokens", synth.spec.min_tokens_per_word, "Fewest tokens per word");
  s->add_option("--max-tokens", synth.spec.max_tokens_per_word, "Most tokens per word");
  s->add_option("--dim", synth.spec.dim, "Hidden dimension");
  s->add_option("--within", synth.spec.within_word_similarity, "Within-word cosine target");
  s->add_option("--across", synth.spec.across_word_similarity, "Across-word cosine target");
  s->add_option("--deep-within", synth.deep_within, "Within-word target at the last layer");
  s->add_option("--sigma", synth.spec.noise_sigma, "Noise norm");
  s->add_option("--gap", synth.spec.max_gap_tokens, "Max unaligned tokens between words");
  s->add_option("--frame-rate", synth.spec.frame_rate, "Audio tokens per second");
  s->add_option("--layers", synth.layers, "Comma-separated layer indices");
  s->add_option("--seed", synth.seed, "RNG seed")->required();
  s->add_option("-o,--output", synth.output, "Output trace")->required();

  CompressArgs compress;
  auto* c = app.add_subcommand("compress", "Affinity-pool one layer of a trace");
  c->add_option("--trace", compress.trace)->required();
  c->add_option("--layer", compress.layer)->required();
  c->add_option("--tau", compress.tau, "Similarity threshold");
  c->add_option("--omega", compress.omega, "Lookback window");
  c->add_option("--budget", compress.budget, "Keep exactly K% of tokens (overrides tau/omega)");
  c->add_option("-o,--output", compress.output, "Compressed trace");
  c->add_option("--report", compress.report, "CSV report path (default stdout)");

  InterveneArgs intervene;
  auto* iv = app.add_subcommand("intervene", "Word-aligned oracle compression");
  iv->add_option("--trace", intervene.trace)->required();
  iv->add_option("--layer", intervene.layer);
  iv->add_option("--op", intervene.op)
      ->required()
      ->check(CLI::IsMember({"random-drop", "uniform-drop", "uniform-merge"}));
  iv->add_option("--budget", intervene.budget, "Tokens kept per word")
      ->required()
      ->check(CLI::PositiveNumber);
  iv->add_option("--seed", intervene.seed);
  iv->add_option("-o,--output", intervene.output);
  iv->add_option("--report", intervene.report, "Per-unit CSV path (default stdout)");

  DapArgs dap;
  auto* d = app.add_subcommand("dap", "Dual affinity pooling with trace replay");
  d->add_option("--trace", dap.trace)->required();
  d->add_option("--preset", dap.preset)->check(CLI::IsMember({"aggressive", "conservative"}));
  d->add_option("--tau-in", dap.tau_in);
  d->add_option("--tau-deep", dap.tau_deep);
  d->add_option("--l-in", dap.l_in);
  d->add_option("--l-deep", dap.l_deep);
  d->add_option("--omega-in", dap.omega_in);
  d->add_option("--omega-deep", dap.omega_deep);
  d->add_option("--arch", dap.arch, "Arch preset name or profile JSON");
  d->add_option("--report", dap.report, "Per-layer lengths CSV");

  DynamicsArgs dynamics;
  auto* dy = app.add_subcommand("dynamics", "Layer-wise cosine similarity metrics");
  dy->add_option("--trace", dynamics.traces, "Trace file; repeat to average over utterances")->required();
  dy->add_option("--k", dynamics.ks, "Comma-separated neighbor counts");
  dy->add_option("--mode", dynamics.mode)->check(CLI::IsMember({"temporal", "feature"}));
  dy->add_option("--aggregate", dynamics.aggregate,
                 "utterance: mean of per-trace values; pooled: weighted by tokens, pairs or units")
      ->check(CLI::IsMember({"utterance", "pooled", "both"}));
  dy->add_option("--layer", dynamics.layers, "Layers to analyse (default all)");
  dy->add_option("-o,--output", dynamics.output);

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Grid of affinity pooling runs");
  sw->add_option("--trace", sweep.traces, "Trace files or directories of .trc files")->required();
  sw->add_option("--layers", sweep.layers)->required();
  sw->add_option("--taus", sweep.taus)->required();
  sw->add_option("--omegas", sweep.omegas)->required();
  sw->add_option("-o,--output", sweep.output);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Line-aligned WER / cWER");
  sc->add_option("--ref", score.ref)->required();
  sc->add_option("--hyp", score.hyp)->required();
  sc->add_flag("--clamp", score.clamp, "Report only the clamped cWER");
  sc->add_option("--mode", score.mode)->check(CLI::IsMember({"word", "char"}));

  VizArgs vz;
  auto* v = app.add_subcommand("viz", "Render token groups against word boundaries");
  v->add_option("--trace", vz.trace)->required();
  v->add_option("--layer", vz.layer)->required();
  v->add_option("--tau", vz.tau);
  v->add_option("--omega", vz.omega);
  v->add_option("--budget", vz.budget);
  v->add_option("--format", vz.format)->check(CLI::IsMember({"svg", "text"}));
  v->add_option("-o,--output", vz.output);

  CostArgs cost;
  auto* co = app.add_subcommand("cost", "Prefill FLOPs and ratio against vanilla");
  co->add_option("--arch", cost.arch, "Arch preset name or profile JSON");
  auto* lengths_opt = co->add_option("--lengths", cost.lengths, "Per-layer lengths: file or list");
  auto* dap_opt = co->add_option("--from-dap", cost.from_dap, "Per-layer report from `dap --report`");
  lengths_opt->excludes(dap_opt);
  co->add_option("--vanilla-length", cost.vanilla, "Uncompressed length (default max of lengths)");
  co->add_option("--ratio-only", cost.ratio_only, "PLAN VANILLA totals")->expected(2);
  co->add_flag("--no-attention-scores", cost.no_scores);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time affinity pooling on random inputs");
  b->add_option("--sizes", bench.sizes, "Comma-separated TxD sizes");
  b->add_option("--tau", bench.tau);
  b->add_option("--omega", bench.omega);
  b->add_option("--reps", bench.reps);
  b->add_option("--warmup", bench.warmup);
  b->add_option("--seed", bench.seed);
  b->add_option("-o,--output", bench.output);

  std::vector<const char*> argv{"alsp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_synth(synth, out);
    if (*c) return cmd_compress(compress, out);
    if (*iv) return cmd_intervene(intervene, out);
    if (*d) return cmd_dap(dap, out);
    if (*dy) return cmd_dynamics(dynamics, out, err);
    if (*sw) return cmd_sweep(sweep, out);
    if (*sc) return cmd_score(score, out);
    if (*v) return cmd_viz(vz, out);
    if (*co) return cmd_cost(cost, out);
    if (*b) return cmd_bench(bench, out);
  } catch (const ExitError& e) {
    err << "alsp: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "alsp: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "alsp: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace alsp::cli
