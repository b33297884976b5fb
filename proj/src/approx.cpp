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

#include "inextract/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "inextract/errors.hpp"
#include "inextract/estimator.hpp"
#include "inextract/rng.hpp"

namespace inextract {
namespace {

std::size_t levenshtein(std::span<const TokenId> x, std::span<const TokenId> y) {
  std::vector<std::size_t> row(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[y.size()];
}

std::size_t lcs_length(std::span<const TokenId> x, std::span<const TokenId> y) {
  std::vector<std::size_t> row(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = x[i - 1] == y[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[y.size()];
}

using Ngram = std::vector<TokenId>;

std::map<Ngram, std::size_t> ngram_counts(std::span<const TokenId> s, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[Ngram(s.begin() + static_cast<std::ptrdiff_t>(i),
                   s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double bleu(std::span<const TokenId> candidate, std::span<const TokenId> reference) {
  constexpr std::size_t kMaxOrder = 4;
  double log_precision = 0.0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [gram, c] : cand) {
      total += c;
      const auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(c, it->second);
    }
    // Add-one smoothing keeps short sequences from collapsing to zero.
    log_precision += std::log((static_cast<double>(matched) + 1.0) /
                              (static_cast<double>(total) + 1.0));
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double log_bp = c >= r ? 0.0 : 1.0 - r / c;
  return std::exp(log_bp + log_precision / static_cast<double>(kMaxOrder));
}

std::vector<TokenId> mutate_once(std::vector<TokenId> s, std::size_t vocab, Rng& rng) {
  const std::uint64_t len = s.size();
  const std::uint64_t subs = len * (vocab - 1);
  const std::uint64_t ins = (len + 1) * vocab;
  const std::uint64_t dels = len > 1 ? len : 0;
  std::uint64_t op = rng.below(subs + ins + dels);
  if (op < subs) {
    const auto pos = static_cast<std::size_t>(op / (vocab - 1));
    auto tok = static_cast<TokenId>(op % (vocab - 1));
    if (tok >= s[pos]) ++tok;  // skip the current token
    s[pos] = tok;
    return s;
  }
  op -= subs;
  if (op < ins) {
    const auto pos = static_cast<std::ptrdiff_t>(op / vocab);
    s.insert(s.begin() + pos, static_cast<TokenId>(op % vocab));
    return s;
  }
  op -= ins;
  s.erase(s.begin() + static_cast<std::ptrdiff_t>(op));
  return s;
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kEdit: return "edit";
    case Metric::kRougeL: return "rougeL";
    case Metric::kBleu: return "bleu";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "edit") return Metric::kEdit;
  if (name == "rougeL" || name == "rougel") return Metric::kRougeL;
  if (name == "bleu") return Metric::kBleu;
  throw std::invalid_argument("unknown metric \"" + std::string(name) + "\"");
}

double distance(std::span<const TokenId> x, std::span<const TokenId> y, Metric metric) {
  if (metric == Metric::kEdit) {
    const std::size_t longest = std::max(x.size(), y.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(x, y)) / static_cast<double>(longest);
  }
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("overlap metrics need non-empty sequences");
  }
  if (metric == Metric::kRougeL) {
    const double lcs = static_cast<double>(lcs_length(x, y));
    return 1.0 - 2.0 * lcs / static_cast<double>(x.size() + y.size());
  }
  if (std::equal(x.begin(), x.end(), y.begin(), y.end())) return 0.0;
  return std::clamp(1.0 - bleu(x, y), 0.0, 1.0);
}

double length_normalized_logp(const SequenceTrace& trace, std::size_t offset, std::size_t l) {
  const ExtractionWindow w = window_cost(trace, offset, l, trace.vocab_size);
  return w.log2_p * std::numbers::ln2 / static_cast<double>(l);
}

LogPvFn model_log_pv(const LanguageModel& model, std::vector<TokenId> prefix) {
  return [&model, prefix = std::move(prefix)](std::span<const TokenId> z) {
    if (z.empty()) throw std::invalid_argument("cannot score an empty sequence");
    std::vector<TokenId> tokens(prefix);
    tokens.insert(tokens.end(), z.begin(), z.end());
    const SequenceTrace trace = teacher_forced_trace(model, tokens, model.vocab_size());
    return length_normalized_logp(trace, prefix.size() + 1, z.size());
  };
}

std::vector<NeighborSample> sample_neighbors(std::span<const TokenId> center,
                                             std::size_t vocab_size,
                                             const NeighborOptions& options,
                                             const LogPvFn& log_pv) {
  if (!(options.radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  if (options.count == 0) throw std::invalid_argument("neighbor count must be >= 1");
  if (center.empty()) throw std::invalid_argument("center must be non-empty");
  if (vocab_size < 2) throw std::invalid_argument("vocabulary needs at least two tokens");

  const std::vector<TokenId> base(center.begin(), center.end());
  const double center_logp = log_pv(base);
  const auto max_edits = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::floor(options.radius * static_cast<double>(base.size()))));

  Rng rng(options.seed);
  std::vector<NeighborSample> out;
  out.reserve(options.count);
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    const std::uint64_t edits = 1 + rng.below(max_edits);
    std::vector<TokenId> cand = base;
    for (std::uint64_t e = 0; e < edits; ++e) cand = mutate_once(std::move(cand), vocab_size, rng);
    const double d = distance(base, cand, options.metric);
    if (d <= 0.0 || d > options.radius) continue;
    NeighborSample s;
    s.center = base;
    s.distance = d;
    s.log_pv_center = center_logp;
    s.log_pv_neighbor = log_pv(cand);
    s.neighbor = std::move(cand);
    out.push_back(std::move(s));
    if (out.size() == options.count) return out;
  }
  throw SamplingExhaustedError("found " + std::to_string(out.size()) + " of " +
                               std::to_string(options.count) + " neighbors within radius " +
                               std::to_string(options.radius) + " after " +
                               std::to_string(options.max_attempts) + " attempts");
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw std::invalid_argument("percentile must lie in (0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // A small slack absorbs q * N landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

LipschitzEstimate estimate_L0(std::span<const NeighborSample> samples, double percentile) {
  LipschitzEstimate est;
  est.percentile = percentile;
  std::vector<double> slopes;
  slopes.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.distance <= 0.0) {
      ++est.excluded_zero_distance;
      continue;
    }
    slopes.push_back(std::abs(s.log_pv_neighbor - s.log_pv_center) / s.distance);
    est.radius = std::max(est.radius, s.distance);
  }
  if (slopes.empty()) throw std::invalid_argument("no samples with positive distance");
  est.sample_count = slopes.size();
  est.L0 = nearest_rank_percentile(std::move(slopes), percentile);
  return est;
}

SuppressionVerdict suppression_check(double L0_pre, double L0_post, double radius,
                                     double delta_b_bits) {
  if (L0_pre < 0.0 || L0_post < 0.0 || radius < 0.0) {
    throw std::invalid_argument("Lipschitz constants and radius must be >= 0");
  }
  SuppressionVerdict v;
  v.threshold_bits = (L0_pre + L0_post) * radius / std::numbers::ln2;
  v.delta_b_bits = delta_b_bits;
  v.suppressed = delta_b_bits > v.threshold_bits;
  return v;
}

double neighborhood_mean(std::span<const NeighborSample> samples) {
  if (samples.empty()) throw std::invalid_argument("empty neighborhood");
  double sum = 0.0;
  for (const auto& s : samples) sum += std::exp(s.log_pv_neighbor);
  return sum / static_cast<double>(samples.size());
}

}  // namespace inextract
