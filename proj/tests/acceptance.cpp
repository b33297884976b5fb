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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "inextract/approx.hpp"
#include "inextract/attack_sim.hpp"
#include "inextract/bounds.hpp"
#include "inextract/estimator.hpp"
#include "inextract/language_model.hpp"
#include "inextract/report_io.hpp"
#include "inextract/rng.hpp"
#include "inextract/trace_io.hpp"
#include "test_util.hpp"

namespace inextract {
namespace {

// Tolerances.
constexpr double kCeilingSlack = 1e-9;
constexpr double kAttainFraction = 0.99;
constexpr double kSigmas = 3.0;
constexpr double kCostBitsTol = 1e-6;
constexpr double kConversionTol = 1e-9;
constexpr double kStableRatioTol = 0x1.0p-27;
constexpr double kPriorTol = 1e-6;
constexpr double kEpsilonCap = 1.94;
constexpr double kPriorCap = 0.2997;
constexpr double kLipschitzTol = 1e-9;
constexpr double kThresholdTol = 1e-12;

struct Window {
  const SequenceTrace* trace;
  std::size_t offset;
  std::size_t l;
};

const std::vector<double> kTemperatures{0.1, 0.5, 1.0, 2.0, 10.0, 1e6};

std::vector<std::size_t> all_k(std::size_t vocab) {
  std::vector<std::size_t> ks(vocab);
  for (std::size_t k = 0; k < vocab; ++k) ks[k] = k + 1;
  return ks;
}

std::vector<Window> random_windows(const std::vector<SequenceTrace>& traces, std::size_t count,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Window> out;
  while (out.size() < count) {
    const auto& t = traces[rng.below(traces.size())];
    const std::size_t l = 1 + rng.below(8);
    if (t.length() < l) continue;
    const std::size_t offset = 1 + rng.below(t.length() - l + 1);
    out.push_back({&t, offset, l});
  }
  return out;
}

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  std::printf("%s %-26s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

void rank_ceiling_criterion(const std::vector<Window>& windows) {
  const auto ks = all_k(ToyLm::kVocabSize);
  std::uint64_t cases = 0, violations = 0, attained = 0;
  double worst_attain = 1.0;
  for (const auto& w : windows) {
    std::vector<DecodingProfile> profiles;
    for (std::size_t i = 0; i < w.l; ++i) {
      const std::size_t idx = w.offset - 1 + i;
      profiles.emplace_back(w.trace->distribution_at(idx), w.trace->positions[idx].true_token);
    }
    const double ceiling = rank_ceiling(*w.trace, w.offset, w.l);
    for (std::size_t k : ks) {
      for (double t : kTemperatures) {
        double p = 1.0;
        for (const auto& prof : profiles) p *= prof.top_k_prob(k, t);
        ++cases;
        if (p > ceiling + kCeilingSlack) ++violations;
      }
    }
    const auto adaptive =
        grid_search(*w.trace, w.offset, w.l, ks, kTemperatures, SearchMode::kPerPosition);
    worst_attain = std::min(worst_attain, adaptive.best_p / ceiling);
    if (adaptive.best_p >= kAttainFraction * ceiling) ++attained;
  }

  // Direct decoding on a subset cross-checks the profile arithmetic.
  std::uint64_t direct_cases = 0, direct_violations = 0;
  double worst_mismatch = 0.0;
  for (std::size_t j = 0; j < windows.size(); j += 25) {
    const auto& w = windows[j];
    const double ceiling = rank_ceiling(*w.trace, w.offset, w.l);
    std::vector<DecodingProfile> profiles;
    for (std::size_t i = 0; i < w.l; ++i) {
      const std::size_t idx = w.offset - 1 + i;
      profiles.emplace_back(w.trace->distribution_at(idx), w.trace->positions[idx].true_token);
    }
    for (std::size_t k : ks) {
      for (double t : kTemperatures) {
        const double p = analytic_trial_prob(*w.trace, w.offset, w.l, DecodingConfig::top_k(k, t));
        double q = 1.0;
        for (const auto& prof : profiles) q *= prof.top_k_prob(k, t);
        ++direct_cases;
        if (p > ceiling + kCeilingSlack) ++direct_violations;
        if (p > 0.0) worst_mismatch = std::max(worst_mismatch, std::abs(p - q) / p);
      }
    }
  }
  const bool pass = violations == 0 && direct_violations == 0 && worst_mismatch < 1e-9 &&
                    attained == windows.size();
  report(pass, "rank-ceiling",
         fmt("windows=%zu cases=%llu violations=%llu direct_cases=%llu direct_violations=%llu "
             "profile_mismatch=%.1e adaptive_attained=%llu/%zu worst_ratio=%.6f",
             windows.size(), (unsigned long long)cases, (unsigned long long)violations,
             (unsigned long long)direct_cases, (unsigned long long)direct_violations,
             worst_mismatch, (unsigned long long)attained, windows.size(), worst_attain));
}

void compounding_criterion() {
  const ScheduleModel die({Eigen::VectorXd::Constant(6, 1.0 / 6.0)});
  const std::vector<TokenId> suffix{4};
  const auto cfg = DecodingConfig::untruncated(1.0);
  const double p = analytic_trial_prob(die, {}, suffix, cfg);
  bool pass = std::abs(p - 1.0 / 6.0) < 1e-15;
  std::string detail = fmt("p=%.6f", p);
  for (std::uint64_t n : {1, 5, 20, 100}) {
    const auto r = repeat_batches(die, {}, suffix, cfg, n, 10000, 1000 + n);
    const double oracle = 1.0 - std::pow(5.0 / 6.0, static_cast<double>(n));
    const double s = std::max(r.sigma, 1.0 / 10000);
    const bool ok = std::abs(r.analytic_rate - oracle) < 1e-12 &&
                    std::abs(r.empirical_rate - oracle) <= kSigmas * s;
    pass = pass && ok;
    detail += fmt(" n=%llu:emp=%.4f,ana=%.4f", (unsigned long long)n, r.empirical_rate, oracle);
  }
  report(pass, "compounding", detail);
}

void greedy_scan_criterion() {
  Rng rng(2024);
  std::size_t mismatches = 0;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t len = 1 + rng.below(80);
    std::vector<std::size_t> ranks(len);
    for (auto& r : ranks) r = rng.uniform() < 0.8 ? 1 : 2 + rng.below(4);
    const std::size_t l = 1 + rng.below(std::min<std::size_t>(len, 6));
    std::vector<std::size_t> exhaustive;
    for (std::size_t o = 0; o + l <= len; ++o) {
      if (std::all_of(ranks.begin() + o, ranks.begin() + o + l, [](auto r) { return r == 1; })) {
        exhaustive.push_back(o + 1);
      }
    }
    if (greedy_extractable_offsets(ranks, l) != exhaustive) ++mismatches;
  }
  const std::vector<SequenceTrace> hand{testing::trace_with_ranks({1, 1, 2, 1, 1, 1})};
  const auto g = greedy_rate(hand, 3);
  const bool pass = mismatches == 0 && g.extractable == 1 && g.total == 4 && g.rate() == 0.25;
  report(pass, "greedy-scan",
         fmt("sequences=1000 mismatches=%zu hand_example_eta=%.2f", mismatches, g.rate()));
}

void window_cost_criterion(const std::vector<Window>& windows) {
  const auto ks = all_k(ToyLm::kVocabSize);
  std::vector<double> ts = kTemperatures;
  ts.push_back(1e12);
  double worst = 0.0;
  std::size_t non_monotone = 0;
  for (const auto& w : windows) {
    const auto g = grid_search(*w.trace, w.offset, w.l, ks, ts, SearchMode::kPerPosition);
    const double c = window_cost(*w.trace, w.offset, w.l, ToyLm::kVocabSize).cost_bits;
    worst = std::max(worst, std::abs(c + std::log2(g.best_p)));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= ToyLm::kVocabSize; ++m) {
      const double cm = window_cost(*w.trace, w.offset, w.l, m).cost_bits;
      if (cm > prev) ++non_monotone;
      prev = cm;
    }
  }
  report(worst <= kCostBitsTol && non_monotone == 0, "window-cost-consistency",
         fmt("windows=%zu max_bits_gap=%.3e non_monotone_steps=%zu", windows.size(), worst,
             non_monotone));
}

void conversion_criterion() {
  const auto g = probabilistic_conversion(1.0, 0.01);
  const double oracle = std::log(100.0) / std::numbers::ln2;
  const double n = std::ceil(g.n_exact);
  Rng rng(77);
  const int replays = 100000;
  int ok = 0;
  for (int r = 0; r < replays; ++r) {
    bool hit = false;
    for (int j = 0; j < static_cast<int>(n); ++j) hit = (rng.uniform() < 0.5) || hit;
    ok += hit;
  }
  const double emp = static_cast<double>(ok) / replays;
  const double ana = 1.0 - std::pow(0.5, n);
  const bool mc_ok = emp + kSigmas * sigma(ana, replays) >= 1.0 - 0.01 &&
                     std::abs(emp - ana) <= kSigmas * sigma(ana, replays);
  double worst_ratio = 0.0;
  const auto g30 = probabilistic_conversion(30.0, 0.01);
  const double ratio30 = g30.n_stable / g30.n_exact - 1.0;
  bool shrinking = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int b = 1; b <= 30; ++b) {
    const auto gb = probabilistic_conversion(b, 0.01);
    const double r = gb.n_stable / gb.n_exact - 1.0;
    shrinking = shrinking && r >= 0.0 && r < prev;
    prev = r;
    worst_ratio = std::max(worst_ratio, r);
  }
  const bool pass = std::abs(g.n_exact - oracle) <= kConversionTol && mc_ok &&
                    ratio30 < kStableRatioTol && shrinking;
  report(pass, "probabilistic-conversion",
         fmt("n_exact=%.12f oracle=%.12f trials=%.0f mc_rate=%.5f ratio_b30_minus_1=%.3e",
             g.n_exact, oracle, n, emp, ratio30));
}

void untargeted_criterion() {
  const double u = untargeted_bound(10.0, 8.0, UntargetedMode::kUnion);
  const double ind = untargeted_bound(10.0, 8.0, UntargetedMode::kIndependent);
  const double q = std::exp2(-ind);
  Rng rng(99);
  const int replays = 2000000;
  int any = 0;
  for (int r = 0; r < replays; ++r) {
    bool hit = false;
    for (int j = 0; j < 8; ++j) hit = (rng.uniform() < 0x1.0p-10) || hit;
    any += hit;
  }
  const double emp = static_cast<double>(any) / replays;
  const bool pass = u == 7.0 && std::abs(emp - q) <= kSigmas * sigma(q, replays);
  report(pass, "untargeted-bound",
         fmt("union_bits=%.17g independent_bits=%.6f mc_prob=%.6f analytic_prob=%.6f", u, ind,
             emp, q));
}

void dp_threshold_criterion() {
  const double p_star = prior_threshold(1e3);
  double sup = 0.0;
  bool grid_ok = true;
  const int steps = 10000;
  for (int i = 1; i <= steps; ++i) {
    const double p0 = kPriorCap * i / steps;
    const auto e = epsilon_threshold(p0);
    const long double oracle = std::log((1.0L - p0) / (1.0L - 3.0L * p0));
    grid_ok = grid_ok && e && std::abs(*e - static_cast<double>(oracle)) <= 1e-12 * (1 + *e);
    if (e) sup = std::max(sup, *e);
  }
  const auto near = epsilon_threshold(1.0 / 3.0 - 1e-9);
  const auto above = epsilon_threshold(0.34);
  bool exact = true;
  for (double p0 : {0.01, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.9}) {
    exact = exact && dp_reconstruction_bound({0.0, 0.0, p0}).bound == p0;
  }
  const bool pass = std::abs(p_star - 1.0 / 3.0) < kPriorTol && grid_ok && sup < kEpsilonCap &&
                    !above && exact;
  report(pass, "dp-thresholds",
         fmt("p0_star(1e3)=%.9f sup_eps(p0<=%.4f)=%.6f eps_at_1/3-1e-9=%.3f (diverges) "
             "eps0_bound_exact=%s",
             p_star, kPriorCap, sup, near.value_or(-1.0), exact ? "yes" : "no"));
}

void range_criterion(const std::vector<SequenceTrace>& traces) {
  const double u = uniform_baseline(10, 256);
  const std::size_t l = 6, m = 4;
  const auto r = audit(traces, l, m);
  std::uint64_t negative = 0, above = 0;
  for (const auto& w : r.windows) {
    if (!(w.cost_bits >= 0.0)) ++negative;
    if (w.cost_bits > uniform_baseline(l, ToyLm::kVocabSize)) ++above;
  }
  const bool pass = u == 80.0 && negative == 0 && above == r.above_uniform_windows;
  report(pass, "range-check",
         fmt("uniform(10,256)=%.17g windows=%llu negative=%llu above_uniform=%llu", u,
             (unsigned long long)r.total_windows, (unsigned long long)negative,
             (unsigned long long)r.above_uniform_windows));
}

std::vector<NeighborSample> construction(double L0, double radius, double center,
                                         double sign, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NeighborSample> out;
  for (int i = 0; i < 400; ++i) {
    const double d = radius * (1 + rng.below(1000)) / 1000.0;
    out.push_back({{}, {}, d, center, center + sign * L0 * d});
  }
  return out;
}

void lipschitz_criterion() {
  double worst = 0.0;
  for (double q : {0.01, 0.25, 0.5, 0.95, 1.0}) {
    const auto samples = construction(2.0, 0.3, -4.0, -1.0, 5);
    worst = std::max(worst, std::abs(estimate_L0(samples, q).L0 - 2.0));
    const auto up = construction(2.0, 0.3, -4.0, 1.0, 6);
    worst = std::max(worst, std::abs(estimate_L0(up, q).L0 - 2.0));
  }
  const double c = 0.2;
  const auto v = suppression_check(1.0, 1.0, c, 0.0);
  const double thr_gap = std::abs(v.threshold_bits - 0.4 / std::numbers::ln2);

  const double center = -3.0;
  const double delta_b = 1.01 * v.threshold_bits;
  const auto pre = construction(1.0, c, center, -1.0, 8);  // least favorable before
  const auto post = construction(1.0, c, center - delta_b * std::numbers::ln2, 1.0, 9);
  const double mu = neighborhood_mean(pre);
  const double mu_post = neighborhood_mean(post);
  const bool suppressed = suppression_check(estimate_L0(pre, 1.0).L0,
                                            estimate_L0(post, 1.0).L0, c, delta_b)
                              .suppressed;
  const bool pass = worst <= kLipschitzTol && thr_gap <= kThresholdTol && suppressed &&
                    mu_post < mu;
  report(pass, "lipschitz-suppression",
         fmt("L0_err=%.1e threshold=%.15f gap=%.1e mu=%.6f mu_post=%.6f", worst,
             v.threshold_bits, thr_gap, mu, mu_post));
}

void round_trip_criterion() {
  const ToyLm lm = testing::word_model(2, 7);
  const auto traces = testing::sample_traces(lm, 12, 40, 31, 8);
  const std::string emitted = emit_traces(traces);
  const auto parsed = parse_traces(emitted);
  const bool traces_ok = parsed == traces && emit_traces(parsed) == emitted;

  auto build = [](std::uint64_t seed) {
    const ToyLm model = testing::word_model(2, 7);
    const auto t = testing::sample_traces(model, 12, 40, seed, 8);
    return emit_audit_report(audit(t, 5, 8), {{"seed", seed}});
  };
  const std::string a = build(31), b = build(31);
  const ScheduleModel die({Eigen::VectorXd::Constant(6, 1.0 / 6.0)});
  const std::vector<TokenId> suffix{2, 3};
  const auto cfg = DecodingConfig::top_k(4, 0.5);
  const auto r1 = repeat_batches(die, {}, suffix, cfg, 7, 500, 3);
  const auto r2 = repeat_batches(die, {}, suffix, cfg, 7, 500, 3);
  const bool pass = traces_ok && a == b && r1.hits == r2.hits;
  report(pass, "round-trip",
         fmt("trace_bytes=%zu reemit_identical=%s report_bytes=%zu report_identical=%s",
             emitted.size(), traces_ok ? "yes" : "no", a.size(), a == b ? "yes" : "no"));
}

}  // namespace
}  // namespace inextract

int main() {
  using namespace inextract;
  const ToyLm lm = testing::word_model(2, 7);
  const auto traces = testing::sample_traces(lm, 80, 48, 11, ToyLm::kVocabSize);
  const auto windows = random_windows(traces, 1000, 12);

  rank_ceiling_criterion(windows);
  compounding_criterion();
  greedy_scan_criterion();
  window_cost_criterion(windows);
  conversion_criterion();
  untargeted_criterion();
  dp_threshold_criterion();
  range_criterion(traces);
  lipschitz_criterion();
  round_trip_criterion();
  std::printf("SKIP %-26s %s\n", "exporter-conformance", "python trace exporter is not built here");
  std::printf("%s\n", failures == 0 ? "ALL PASS" : "FAILURES PRESENT");
  return failures == 0 ? 0 : 1;
}
