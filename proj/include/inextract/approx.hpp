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

// Approximate extraction: sequence distances, seeded neighbor sampling,
// percentile estimates of the local log-Lipschitz constant L0, and the
// ratio-based suppression check for a defense.
//
// P_v denotes the length-normalized worst-case single-trial probability
// (p_z*)^(1/l). Both P_v and the defense improvement delta_b live on that
// per-token scale so neighbors of different lengths compare directly.

#ifndef INEXTRACT_APPROX_HPP_
#define INEXTRACT_APPROX_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inextract/language_model.hpp"
#include "inextract/trace.hpp"

namespace inextract {

enum class Metric { kEdit, kRougeL, kBleu };

std::string to_string(Metric metric);
// Accepts "edit", "rougeL" and "bleu"; throws std::invalid_argument otherwise.
Metric parse_metric(std::string_view name);

// edit: Levenshtein / max(|x|, |y|). rougeL: 1 - LCS F1. bleu: 1 - BLEU-4
// with add-one smoothed precisions and brevity penalty (x is the candidate).
// All lie in [0, 1]. Overlap metrics throw std::invalid_argument on empty
// input.
double distance(std::span<const TokenId> x, std::span<const TokenId> y, Metric metric);

// (1/l) ln p_z* for the window, with p_z* taken at m = |V|.
double length_normalized_logp(const SequenceTrace& trace, std::size_t offset, std::size_t l);

// Maps a candidate sequence z' to ln P_v(z').
using LogPvFn = std::function<double(std::span<const TokenId>)>;

// Teacher-forces prefix + z' through the model and returns ln P_v(z') over the
// z' positions.
LogPvFn model_log_pv(const LanguageModel& model, std::vector<TokenId> prefix = {});

struct NeighborSample {
  std::vector<TokenId> center;
  std::vector<TokenId> neighbor;
  double distance = 0.0;
  double log_pv_center = 0.0;
  double log_pv_neighbor = 0.0;
};

struct NeighborOptions {
  double radius = 0.1;  // c
  std::size_t count = 100;  // K
  Metric metric = Metric::kEdit;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 100000;
};

// Each attempt applies between 1 and max(1, floor(c * |z|)) random edits, each
// drawn uniformly over all single substitutions, insertions and deletions of
// the current sequence. Candidates at distance 0 or beyond c are rejected, as
// are empty ones. Throws SamplingExhaustedError after max_attempts.
std::vector<NeighborSample> sample_neighbors(std::span<const TokenId> center,
                                             std::size_t vocab_size,
                                             const NeighborOptions& options,
                                             const LogPvFn& log_pv);

struct LipschitzEstimate {
  double L0 = 0.0;
  double percentile = 0.95;
  std::size_t sample_count = 0;    // samples used
  std::size_t excluded_zero_distance = 0;
  double radius = 0.0;             // largest distance among the used samples
};

// Slope L_k = |log P_v(z'_k) - log P_v(z)| / d_k for every sample, reduced to
// its nearest-rank percentile (element ceil(q N) of the sorted slopes). Zero
// distance samples are counted and skipped. Throws std::invalid_argument when
// nothing usable remains or the percentile lies outside (0, 1].
LipschitzEstimate estimate_L0(std::span<const NeighborSample> samples,
                              double percentile = 0.95);

// Nearest-rank percentile of arbitrary values.
double nearest_rank_percentile(std::vector<double> values, double percentile);

struct SuppressionVerdict {
  double threshold_bits = 0.0;  // (L0 + L0') c / ln 2
  double delta_b_bits = 0.0;
  bool suppressed = false;      // delta_b > threshold
};

SuppressionVerdict suppression_check(double L0_pre, double L0_post, double radius,
                                     double delta_b_bits);

// Mean of P_v over the sampled neighbors.
double neighborhood_mean(std::span<const NeighborSample> samples);

}  // namespace inextract

#endif  // INEXTRACT_APPROX_HPP_
