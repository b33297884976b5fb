// Copyright 2026 The Inextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "inextract/approx.hpp"
#include "inextract/attack_sim.hpp"
#include "inextract/bounds.hpp"
#include "inextract/estimator.hpp"
#include "inextract/report_io.hpp"
#include "inextract/rng.hpp"
#include "inextract/toy_lm.hpp"
#include "inextract/trace_io.hpp"
#include "inextract/version.hpp"

namespace inextract::cli {
namespace {

using nlohmann::ordered_json;

// Usage errors detected after parsing; reported with exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
void kv(std::ostream& out, std::string_view key, const T& value) {
  out << key << '=' << value << '\n';
}

void kv(std::ostream& out, std::string_view key, double value) {
  out << key << '=' << format_real(value) << '\n';
}

std::string seq_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seq-%06zu", index);
  return buf;
}

// Traces come either from trace files or from a toy model plus a corpus whose
// non-empty lines are the protected sequences.
struct TraceSource {
  std::vector<std::string> trace_paths;
  std::string model_path;
  std::string corpus_path;

  void add_flags(CLI::App* app) {
    app->add_option("--traces", trace_paths, "Trace file(s) in JSON-lines format");
    app->add_option("--model", model_path, "Toy model file (with --corpus)");
    app->add_option("--corpus", corpus_path, "Text corpus, one protected sequence per line");
  }

  bool from_model() const { return trace_paths.empty(); }

  std::vector<SequenceTrace> load(std::size_t m) const {
    if (!trace_paths.empty()) {
      if (!model_path.empty() || !corpus_path.empty()) {
        throw UsageError("give either --traces or --model with --corpus, not both");
      }
      std::vector<SequenceTrace> traces;
      for (const auto& path : trace_paths) {
        auto chunk = ingest_traces(path);
        traces.insert(traces.end(), std::make_move_iterator(chunk.begin()),
                      std::make_move_iterator(chunk.end()));
      }
      return traces;
    }
    if (model_path.empty() || corpus_path.empty()) {
      throw UsageError("need --traces, or --model together with --corpus");
    }
    return traces_from_model(ToyLm::load(model_path), read_file(corpus_path), m);
  }

  static std::vector<SequenceTrace> traces_from_model(const LanguageModel& model,
                                                      std::string_view corpus,
                                                      std::size_t m) {
    std::vector<SequenceTrace> traces;
    const auto lines = tokenize_lines(corpus);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      traces.push_back(teacher_forced_trace(model, lines[i], m, seq_name(i)));
    }
    return traces;
  }

  ordered_json describe() const {
    if (!trace_paths.empty()) return {{"traces", trace_paths}};
    return {{"model", model_path}, {"corpus", corpus_path}};
  }
};

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
}

std::string in_dir(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

struct TrainToy {
  std::string corpus;
  std::string out;
  std::size_t order = 2;
  double alpha = 1.0;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train-toy", "Train the byte-level toy language model");
    cmd->add_option("--corpus", corpus, "Training text")->required();
    cmd->add_option("--out", out, "Model file to write")->required();
    cmd->add_option("--order", order, "Context length")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Laplace pseudo-count")->capture_default_str();
    sub = cmd;
  }

  int run(std::ostream& os) const {
    const ToyLm model = ToyLm::train_text(read_file(corpus), {order, alpha});
    model.save(out);
    kv(os, "order", order);
    kv(os, "alpha", alpha);
    kv(os, "model", out);
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct DumpTraces {
  std::string model;
  std::string corpus;
  std::string out;
  std::size_t m = ToyLm::kVocabSize;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("dump-traces", "Teacher-force a corpus into a trace file");
    cmd->add_option("--model", model, "Toy model file")->required();
    cmd->add_option("--corpus", corpus, "Text, one sequence per non-empty line")->required();
    cmd->add_option("--m", m, "Top-m entries recorded per position")->capture_default_str();
    cmd->add_option("--out", out, "Trace file to write")->required();
    sub = cmd;
  }

  int run(std::ostream& os) const {
    if (m == 0) throw UsageError("--m must be >= 1");
    const auto traces =
        TraceSource::traces_from_model(ToyLm::load(model), read_file(corpus), m);
    write_traces(out, traces);
    kv(os, "sequences", traces.size());
    kv(os, "m", m);
    kv(os, "traces", out);
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Audit {
  TraceSource source;
  std::size_t l = 0;
  std::size_t m = ToyLm::kVocabSize;
  double b_target = 0.0;
  std::optional<double> delta;
  std::optional<double> untargeted_m;
  std::size_t b_max = 256;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("audit", "Rank-aware (l,b) audit of protected sequences");
    source.add_flags(cmd);
    cmd->add_option("--l", l, "Window length")->required();
    cmd->add_option("--m", m, "Top-m visible to the adversary")->capture_default_str();
    cmd->add_option("--b-target", b_target, "Claimed inextractability in bits")
        ->capture_default_str();
    cmd->add_option("--delta", delta, "Failure probability for the (l,b,delta) reading");
    cmd->add_option("--M", untargeted_m, "Protected l-gram count (default: total windows)");
    cmd->add_option("--b-max", b_max, "Histogram cap in bits")->capture_default_str();
    cmd->add_option("--seed", seed, "Echoed into the report")->capture_default_str();
    cmd->add_option("--out", out, "Directory for report.json, histogram.csv, windows.csv");
    sub = cmd;
  }

  int run(std::ostream& os) const {
    if (l == 0 || m == 0) throw UsageError("--l and --m must be >= 1");
    if (delta && !(*delta > 0.0 && *delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
    const auto traces = source.load(ToyLm::kVocabSize);
    const AuditReport report = audit(traces, l, m, {b_max, true});
    const double big_m =
        untargeted_m.value_or(static_cast<double>(std::max<std::uint64_t>(1, report.total_windows)));
    const double union_bits = untargeted_bound(report.b_min, big_m, UntargetedMode::kUnion);
    const double indep_bits = untargeted_bound(report.b_min, big_m, UntargetedMode::kIndependent);
    const std::size_t vocab = traces.front().vocab_size;

    kv(os, "tool", std::string(kToolName) + " " + kToolVersion);
    kv(os, "l", l);
    kv(os, "m", m);
    kv(os, "sequences", traces.size());
    kv(os, "total_windows", report.total_windows);
    kv(os, "b_min", report.b_min);
    kv(os, "argmin_seq_id", report.argmin_seq_id);
    kv(os, "argmin_offset", report.argmin_offset);
    kv(os, "greedy_windows", report.greedy_windows);
    kv(os, "greedy_rate", report.greedy_rate());
    kv(os, "uniform_baseline_bits", uniform_baseline(l, vocab));
    kv(os, "above_uniform_windows", report.above_uniform_windows);
    kv(os, "untargeted_M", big_m);
    kv(os, "untargeted_union_bits", union_bits);
    kv(os, "untargeted_independent_bits", indep_bits);
    ordered_json params = source.describe();
    params["b_target"] = b_target;
    params["M"] = big_m;
    params["seed"] = seed;
    if (delta) {
      const auto g = probabilistic_conversion(report.b_min, *delta);
      kv(os, "delta", *delta);
      kv(os, "n_exact", g.n_exact);
      kv(os, "b_delta", g.b_delta);
      params["delta"] = *delta;
    }
    if (!out.empty()) {
      ensure_dir(out);
      ordered_json extra = params;
      extra["untargeted_union_bits"] = real_to_json(union_bits);
      extra["untargeted_independent_bits"] = real_to_json(indep_bits);
      write_file(in_dir(out, "report.json"), emit_audit_report(report, extra));
      write_file(in_dir(out, "histogram.csv"), histogram_csv(report));
      write_file(in_dir(out, "windows.csv"), windows_csv(report.windows));
      kv(os, "report", in_dir(out, "report.json"));
    }
    const bool ok = report.b_min >= b_target;
    os << (ok ? "SATISFIES" : "VIOLATES") << " (" << l << "," << format_real(b_target)
       << ")\n";
    return ok ? 0 : 2;
  }

  CLI::App* sub = nullptr;
};

struct GreedyRateCmd {
  TraceSource source;
  std::size_t l = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("greedy-rate", "Fraction of windows emitted verbatim at k=1");
    source.add_flags(cmd);
    cmd->add_option("--l", l, "Window length")->required();
    cmd->add_option("--out", out, "CSV of greedy-extractable windows");
    sub = cmd;
  }

  int run(std::ostream& os) const {
    if (l == 0) throw UsageError("--l must be >= 1");
    const auto traces = source.load(1);
    const GreedyRate g = greedy_rate(traces, l);
    kv(os, "l", l);
    kv(os, "extractable", g.extractable);
    kv(os, "total", g.total);
    kv(os, "eta", g.rate());
    if (!out.empty()) {
      std::ostringstream csv;
      csv << "seq_id,offset\n";
      for (const auto& w : g.windows) csv << csv_field(w.seq_id) << ',' << w.offset << '\n';
      write_file(out, csv.str());
    }
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Compare {
  std::vector<std::string> target;
  std::vector<std::string> proxy;
  std::string target_model;
  std::string proxy_model;
  std::string corpus;
  std::size_t l = 0;
  std::size_t m = ToyLm::kVocabSize;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("compare", "Per-window cost difference against a proxy model");
    cmd->add_option("--target", target, "Target trace file(s)");
    cmd->add_option("--proxy", proxy, "Proxy trace file(s)");
    cmd->add_option("--target-model", target_model, "Target toy model (with --corpus)");
    cmd->add_option("--proxy-model", proxy_model, "Proxy toy model (with --corpus)");
    cmd->add_option("--corpus", corpus, "Protected sequences for the model inputs");
    cmd->add_option("--l", l, "Window length")->required();
    cmd->add_option("--m", m, "Top-m")->capture_default_str();
    cmd->add_option("--out", out, "CSV output (default: stdout)");
    sub = cmd;
  }

  std::vector<SequenceTrace> side(const std::vector<std::string>& paths,
                                  const std::string& model) const {
    TraceSource src;
    src.trace_paths = paths;
    src.model_path = model;
    src.corpus_path = model.empty() ? "" : corpus;
    return src.load(ToyLm::kVocabSize);
  }

  int run(std::ostream& os) const {
    if (l == 0 || m == 0) throw UsageError("--l and --m must be >= 1");
    const AuditReport t = audit(side(target, target_model), l, m);
    const AuditReport p = audit(side(proxy, proxy_model), l, m);
    const auto diffs = calibrated_cost(t, p);
    const std::string csv = differences_csv(diffs);
    std::size_t positive = 0;
    for (const auto& d : diffs) positive += d.diff > 0.0 ? 1 : 0;
    if (out.empty()) {
      os << csv;
    } else {
      write_file(out, csv);
      kv(os, "windows", diffs.size());
      kv(os, "target_more_extractable", positive);
      kv(os, "differences", out);
    }
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Convert {
  double b = 0.0;
  double delta = 0.0;
  bool json = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("convert", "Convert (l,b) into (l,b,delta) trial counts");
    cmd->add_option("--b", b, "Inextractability in bits")->required();
    cmd->add_option("--delta", delta, "Failure probability")->required();
    cmd->add_flag("--json", json, "Also print the JSON document");
    sub = cmd;
  }

  int run(std::ostream& os) const {
    const auto g = probabilistic_conversion(b, delta);
    kv(os, "b", g.b);
    kv(os, "delta", g.delta);
    kv(os, "n_exact", g.n_exact);
    kv(os, "n_stable", g.n_stable);
    kv(os, "b_delta", g.b_delta);
    if (json) {
      ordered_json doc{{"b", g.b},
                       {"delta", g.delta},
                       {"n_exact", real_to_json(g.n_exact)},
                       {"n_stable", real_to_json(g.n_stable)},
                       {"b_delta", real_to_json(g.b_delta)}};
      os << doc.dump(2) << '\n';
    }
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Bounds {
  std::optional<double> p;
  std::optional<double> n;
  std::optional<double> b;
  std::optional<double> big_m;
  std::optional<double> epsilon;
  double dp_delta = 0.0;
  std::optional<double> p0;
  std::optional<double> l0_pre;
  std::optional<double> l0_post;
  std::optional<double> c;
  std::optional<double> delta_b;
  bool json = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("bounds", "Closed-form bound calculators");
    cmd->add_option("--p", p, "Single-trial success probability (cost at n)");
    cmd->add_option("--n", n, "Trial count (cost at n)");
    cmd->add_option("--b", b, "Bits (untargeted bound)");
    cmd->add_option("--M", big_m, "Protected l-gram count (untargeted bound)");
    cmd->add_option("--epsilon", epsilon, "DP epsilon");
    cmd->add_option("--dp-delta", dp_delta, "DP delta")->capture_default_str();
    cmd->add_option("--p0", p0, "Prior success probability");
    cmd->add_option("--L0-pre", l0_pre, "Log-Lipschitz constant before a defense");
    cmd->add_option("--L0-post", l0_post, "Log-Lipschitz constant after a defense");
    cmd->add_option("--c", c, "Neighborhood radius");
    cmd->add_option("--delta-b", delta_b, "Length-normalized improvement in bits");
    cmd->add_flag("--json", json, "Also print the JSON document");
    sub = cmd;
  }

  int run(std::ostream& os) const {
    ordered_json doc;
    bool any = false;
    if (p || n) {
      if (!p || !n) throw UsageError("cost at n needs both --p and --n");
      const double bits = cost_at_n(*p, *n);
      kv(os, "p", *p);
      kv(os, "n", *n);
      kv(os, "cost_at_n_bits", bits);
      doc["cost_at_n"] = {{"p", *p}, {"n", *n}, {"bits", real_to_json(bits)}};
      any = true;
    }
    if (b || big_m) {
      if (!b || !big_m) throw UsageError("untargeted bound needs both --b and --M");
      const double u = untargeted_bound(*b, *big_m, UntargetedMode::kUnion);
      const double i = untargeted_bound(*b, *big_m, UntargetedMode::kIndependent);
      kv(os, "b", *b);
      kv(os, "M", *big_m);
      kv(os, "untargeted_union_bits", u);
      kv(os, "untargeted_independent_bits", i);
      doc["untargeted"] = {{"b", *b}, {"M", *big_m}, {"union_bits", real_to_json(u)},
                           {"independent_bits", real_to_json(i)}};
      any = true;
    }
    if (epsilon || p0) {
      if (!epsilon || !p0) throw UsageError("DP bounds need both --epsilon and --p0");
      const DpParameters dp{*epsilon, dp_delta, *p0};
      const auto rb = dp_reconstruction_bound(dp);
      kv(os, "epsilon", *epsilon);
      kv(os, "dp_delta", dp_delta);
      kv(os, "p0", *p0);
      kv(os, "reconstruction_bound", rb.bound);
      kv(os, "reconstruction_bound_loose", rb.loose_bound);
      ordered_json dpj{{"epsilon", *epsilon}, {"delta", dp_delta}, {"p0", *p0},
                       {"reconstruction_bound", rb.bound},
                       {"reconstruction_bound_loose", real_to_json(rb.loose_bound)}};
      if (dp_delta == 0.0) {
        const auto v = reducibility_region(dp);
        kv(os, "adv_dpd_bound", v.adv_dpd_bound);
        kv(os, "adv_de_bound", v.adv_de_bound);
        kv(os, "p0_threshold", v.p0_threshold);
        if (v.epsilon_threshold) {
          kv(os, "epsilon_threshold", *v.epsilon_threshold);
        } else {
          kv(os, "epsilon_threshold", std::string("none (dpd_not_reducible_to_de for all epsilon>0)"));
        }
        kv(os, "dpd_not_reducible_to_de", v.dpd_not_reducible_to_de ? "true" : "false");
        kv(os, "de_not_reducible_to_dpd", v.de_not_reducible_to_dpd ? "true" : "false");
        dpj["adv_dpd_bound"] = v.adv_dpd_bound;
        dpj["adv_de_bound"] = v.adv_de_bound;
        dpj["p0_threshold"] = v.p0_threshold;
        dpj["epsilon_threshold"] =
            v.epsilon_threshold ? ordered_json(*v.epsilon_threshold) : ordered_json(nullptr);
        dpj["dpd_not_reducible_to_de"] = v.dpd_not_reducible_to_de;
        dpj["de_not_reducible_to_dpd"] = v.de_not_reducible_to_dpd;
        dpj["separated_for_all_epsilon"] = v.separated_for_all_epsilon;
      }
      doc["dp"] = std::move(dpj);
      any = true;
    }
    if (l0_pre || l0_post || c || delta_b) {
      if (!l0_pre || !l0_post || !c || !delta_b) {
        throw UsageError("suppression check needs --L0-pre, --L0-post, --c and --delta-b");
      }
      const auto v = suppression_check(*l0_pre, *l0_post, *c, *delta_b);
      kv(os, "suppression_threshold_bits", v.threshold_bits);
      kv(os, "delta_b_bits", v.delta_b_bits);
      kv(os, "delta_b_scale", std::string("length-normalized"));
      kv(os, "suppressed", v.suppressed ? "true" : "false");
      doc["suppression"] = {{"L0_pre", *l0_pre}, {"L0_post", *l0_post}, {"c", *c},
                            {"delta_b_bits", *delta_b}, {"delta_b_scale", "length-normalized"},
                            {"threshold_bits", v.threshold_bits}, {"suppressed", v.suppressed}};
      any = true;
    }
    if (!any) throw UsageError("bounds: nothing to compute; see --help");
    if (json) os << doc.dump(2) << '\n';
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Simulate {
  TraceSource source;
  std::size_t l = 0;
  std::size_t seq_index = 0;
  std::size_t offset = 1;
  std::vector<std::size_t> k_grid;
  std::vector<double> t_grid{0.1, 0.5, 1.0, 2.0, 10.0, 1e6};
  std::vector<std::uint64_t> n_grid{1, 5, 20, 100};
  std::uint64_t batches = 1000;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Grid search and Monte Carlo attack replay");
    source.add_flags(cmd);
    cmd->add_option("--l", l, "Window length")->required();
    cmd->add_option("--seq-index", seq_index, "0-based sequence index")->capture_default_str();
    cmd->add_option("--offset", offset, "1-based window start")->capture_default_str();
    cmd->add_option("--k-grid", k_grid, "Comma-separated k values (default 1..|V|)")
        ->delimiter(',');
    cmd->add_option("--t-grid", t_grid, "Comma-separated temperatures")->delimiter(',');
    cmd->add_option("--n", n_grid, "Comma-separated trial counts")->delimiter(',');
    cmd->add_option("--batches", batches, "Batch repetitions per n")->capture_default_str();
    cmd->add_option("--seed", seed, "Root seed")->capture_default_str();
    cmd->add_option("--out", out, "Directory for simulate.json and rate_curve.csv");
    sub = cmd;
  }

  static ordered_json grid_json(const GridSearchResult& g) {
    auto configs = ordered_json::array();
    for (const auto& c : g.position_configs) configs.push_back(c.to_string());
    return {{"mode", g.mode == SearchMode::kGlobal ? "global" : "per-position"},
            {"best_p", g.best_p},
            {"best_bits", real_to_json(-std::log2(g.best_p))},
            {"ceiling", g.ceiling},
            {"best_config", g.best_config.to_string()},
            {"position_configs", std::move(configs)}};
  }

  int run(std::ostream& os) const {
    if (l == 0) throw UsageError("--l must be >= 1");
    if (batches == 0) throw UsageError("--batches must be >= 1");
    const auto traces = source.load(ToyLm::kVocabSize);
    if (seq_index >= traces.size()) throw UsageError("--seq-index beyond the available traces");
    const SequenceTrace& trace = traces[seq_index];
    std::vector<std::size_t> ks = k_grid;
    if (ks.empty()) {
      ks.resize(trace.vocab_size);
      std::iota(ks.begin(), ks.end(), std::size_t{1});
    }
    const auto global = grid_search(trace, offset, l, ks, t_grid, SearchMode::kGlobal);
    const auto adaptive = grid_search(trace, offset, l, ks, t_grid, SearchMode::kPerPosition);
    const double window_bits = window_cost(trace, offset, l, trace.vocab_size).cost_bits;

    kv(os, "seq_id", trace.seq_id);
    kv(os, "offset", offset);
    kv(os, "l", l);
    kv(os, "seed", seed);
    kv(os, "ceiling", global.ceiling);
    kv(os, "window_cost_bits", window_bits);
    kv(os, "global_best_p", global.best_p);
    kv(os, "global_best_config", global.best_config.to_string());
    kv(os, "adaptive_best_p", adaptive.best_p);

    ordered_json doc;
    doc["tool"] = kToolName;
    doc["tool_version"] = kToolVersion;
    doc["parameters"] = source.describe();
    doc["parameters"]["l"] = l;
    doc["parameters"]["seq_index"] = seq_index;
    doc["parameters"]["offset"] = offset;
    doc["parameters"]["t_grid"] = t_grid;
    doc["parameters"]["k_grid_size"] = ks.size();
    doc["parameters"]["batches"] = batches;
    doc["parameters"]["seed"] = seed;
    doc["seq_id"] = trace.seq_id;
    doc["window_cost_bits"] = real_to_json(window_bits);
    doc["global"] = grid_json(global);
    doc["per_position"] = grid_json(adaptive);

    std::ostringstream curve;
    curve << "n,batches,hits,empirical_rate,analytic_rate,sigma\n";
    auto outcomes = ordered_json::array();
    if (!source.from_model()) {
      kv(os, "monte_carlo", std::string("skipped (needs --model)"));
    } else {
      const ToyLm model = ToyLm::load(source.model_path);
      const std::span<const TokenId> tokens(trace.tokens);
      const auto prefix = tokens.subspan(0, offset - 1);
      const auto suffix = tokens.subspan(offset - 1, l);
      for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const auto r = repeat_batches(model, prefix, suffix, global.best_config, n_grid[i],
                                      batches, derive_seed(seed, i));
        curve << r.n << ',' << r.batches << ',' << r.hits << ',' << format_real(r.empirical_rate)
              << ',' << format_real(r.analytic_rate) << ',' << format_real(r.sigma) << '\n';
        kv(os, "rate_n" + std::to_string(r.n),
           format_real(r.empirical_rate) + " analytic=" + format_real(r.analytic_rate));
        outcomes.push_back(ordered_json{{"n", r.n},
                            {"batches", r.batches},
                            {"hits", r.hits},
                            {"empirical_rate", r.empirical_rate},
                            {"analytic_rate", r.analytic_rate},
                            {"sigma", r.sigma},
                            {"config", global.best_config.to_string()}});
      }
    }
    doc["rate_curve"] = std::move(outcomes);
    if (!out.empty()) {
      ensure_dir(out);
      write_file(in_dir(out, "simulate.json"), doc.dump(2) + "\n");
      write_file(in_dir(out, "rate_curve.csv"), curve.str());
    }
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Lipschitz {
  std::string model;
  std::string center;
  std::string prefix;
  std::string metric = "edit";
  double c = 0.1;
  std::size_t k = 200;
  double percentile = 0.95;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("lipschitz", "Estimate the local log-Lipschitz constant L0");
    cmd->add_option("--model", model, "Toy model file")->required();
    cmd->add_option("--center", center, "Center text z")->required();
    cmd->add_option("--prefix", prefix, "Context preceding every neighbor");
    cmd->add_option("--metric", metric, "edit, rougeL or bleu")->capture_default_str();
    cmd->add_option("--c", c, "Neighborhood radius")->capture_default_str();
    cmd->add_option("--K", k, "Neighbors to sample")->capture_default_str();
    cmd->add_option("--percentile", percentile, "Coverage level")->capture_default_str();
    cmd->add_option("--seed", seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--out", out, "Directory for scatter.csv and lipschitz.json");
    sub = cmd;
  }

  int run(std::ostream& os) const {
    const ToyLm lm = ToyLm::load(model);
    NeighborOptions opts;
    opts.radius = c;
    opts.count = k;
    opts.metric = parse_metric(metric);
    opts.seed = seed;
    const auto samples = sample_neighbors(bytes_to_tokens(center), lm.vocab_size(), opts,
                                          model_log_pv(lm, bytes_to_tokens(prefix)));
    const auto est = estimate_L0(samples, percentile);
    kv(os, "metric", to_string(opts.metric));
    kv(os, "c", c);
    kv(os, "K", k);
    kv(os, "seed", seed);
    kv(os, "percentile", est.percentile);
    kv(os, "L0", est.L0);
    kv(os, "sample_count", est.sample_count);
    kv(os, "excluded_zero_distance", est.excluded_zero_distance);
    kv(os, "log_pv_center", samples.front().log_pv_center);
    kv(os, "log_pv_scale", std::string("length-normalized"));
    if (!out.empty()) {
      ensure_dir(out);
      std::ostringstream csv;
      csv << "distance,abs_delta_log_pv\n";
      for (const auto& s : samples) {
        csv << format_real(s.distance) << ','
            << format_real(std::abs(s.log_pv_neighbor - s.log_pv_center)) << '\n';
      }
      write_file(in_dir(out, "scatter.csv"), csv.str());
      ordered_json doc{{"tool", kToolName},
                       {"tool_version", kToolVersion},
                       {"parameters",
                        {{"model", model}, {"center", center}, {"prefix", prefix},
                         {"metric", to_string(opts.metric)}, {"c", c}, {"K", k},
                         {"percentile", percentile}, {"seed", seed}}},
                       {"L0", est.L0},
                       {"sample_count", est.sample_count},
                       {"excluded_zero_distance", est.excluded_zero_distance},
                       {"radius", est.radius},
                       {"log_pv_center", samples.front().log_pv_center},
                       {"log_pv_scale", "length-normalized"}};
      write_file(in_dir(out, "lipschitz.json"), doc.dump(2) + "\n");
    }
    return 0;
  }

  CLI::App* sub = nullptr;
};

struct Baseline {
  std::string kind;
  std::size_t l = 0;
  std::size_t vocab = ToyLm::kVocabSize;
  std::string corpus;
  std::string text;
  std::string model;
  std::string prefix;
  std::string prompt{PromptTemplate::kRepeatAfterMe};
  std::size_t m = ToyLm::kVocabSize;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("baseline", "Blind and in-context reference costs");
    cmd->add_option("--kind", kind, "uniform, unigram, contextual or in-context")
        ->required()
        ->check(CLI::IsMember({"uniform", "unigram", "contextual", "in-context"}));
    cmd->add_option("--l", l, "Window length (uniform)");
    cmd->add_option("--vocab", vocab, "Vocabulary size (uniform)")->capture_default_str();
    cmd->add_option("--corpus", corpus, "Frequency corpus (unigram)");
    cmd->add_option("--text", text, "Window text");
    cmd->add_option("--model", model, "Proxy or target toy model");
    cmd->add_option("--prefix", prefix, "Context before the window (contextual)");
    cmd->add_option("--template", prompt, "Prompt with a {target} placeholder (in-context)");
    cmd->add_option("--m", m, "Top-m")->capture_default_str();
    sub = cmd;
  }

  int run(std::ostream& os) const {
    double bits = 0.0;
    const auto window = bytes_to_tokens(text);
    if (kind == "uniform") {
      if (l == 0) throw UsageError("uniform baseline needs --l");
      bits = uniform_baseline(l, vocab);
      kv(os, "l", l);
      kv(os, "vocab", vocab);
    } else if (kind == "unigram") {
      if (corpus.empty() || text.empty()) throw UsageError("unigram baseline needs --corpus and --text");
      const auto freqs = unigram_frequencies(tokenize_lines(read_file(corpus)), ToyLm::kVocabSize);
      bits = unigram_baseline(freqs, window);
      kv(os, "l", window.size());
    } else {
      if (model.empty() || text.empty()) throw UsageError(kind + " baseline needs --model and --text");
      const ToyLm lm = ToyLm::load(model);
      if (kind == "contextual") {
        std::vector<TokenId> tokens = bytes_to_tokens(prefix);
        const std::size_t offset = tokens.size() + 1;
        tokens.insert(tokens.end(), window.begin(), window.end());
        bits = contextual_baseline(teacher_forced_trace(lm, tokens, m), offset, window.size(), m);
      } else {
        bits = in_context_cost(lm, window, PromptTemplate::parse(prompt), m);
      }
      kv(os, "l", window.size());
      kv(os, "m", m);
    }
    kv(os, "kind", kind);
    kv(os, "bits", bits);
    return 0;
  }

  CLI::App* sub = nullptr;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit (l,b)-inextractability of language-model APIs", "inextract"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  TrainToy train_toy;
  DumpTraces dump_traces;
  Audit audit_cmd;
  GreedyRateCmd greedy;
  Compare compare;
  Convert convert;
  Bounds bounds;
  Simulate simulate;
  Lipschitz lipschitz;
  Baseline baseline;
  train_toy.add(app);
  dump_traces.add(app);
  audit_cmd.add(app);
  greedy.add(app);
  compare.add(app);
  convert.add(app);
  bounds.add(app);
  simulate.add(app);
  lipschitz.add(app);
  baseline.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_toy.sub) return train_toy.run(out);
    if (*dump_traces.sub) return dump_traces.run(out);
    if (*audit_cmd.sub) return audit_cmd.run(out);
    if (*greedy.sub) return greedy.run(out);
    if (*compare.sub) return compare.run(out);
    if (*convert.sub) return convert.run(out);
    if (*bounds.sub) return bounds.run(out);
    if (*simulate.sub) return simulate.run(out);
    if (*lipschitz.sub) return lipschitz.run(out);
    if (*baseline.sub) return baseline.run(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace inextract::cli
