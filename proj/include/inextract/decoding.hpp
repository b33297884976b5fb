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

// Truncation-sampling pipeline over next-token distributions: temperature
// scaling, top-k / top-p truncation and renormalization, plus deterministic
// token ranks. Ranks order tokens by probability descending and break ties by
// ascending token id.

#ifndef INEXTRACT_DECODING_HPP_
#define INEXTRACT_DECODING_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "inextract/errors.hpp"

namespace inextract {

using TokenId = std::uint32_t;

template <typename Scalar>
using ProbVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Truncation { kNone, kTopK, kTopP };

struct DecodingConfig {
  Truncation truncation = Truncation::kNone;
  std::size_t k = 0;   // used by kTopK
  double p = 1.0;      // used by kTopP
  double temperature = 1.0;

  static DecodingConfig top_k(std::size_t k, double temperature = 1.0) {
    return {Truncation::kTopK, k, 1.0, temperature};
  }
  static DecodingConfig top_p(double p, double temperature = 1.0) {
    return {Truncation::kTopP, 0, p, temperature};
  }
  static DecodingConfig untruncated(double temperature = 1.0) {
    return {Truncation::kNone, 0, 1.0, temperature};
  }

  // Throws std::invalid_argument unless k >= 1, 0 < p <= 1 and T > 0.
  void validate() const;
  std::string to_string() const;

  friend bool operator==(const DecodingConfig&, const DecodingConfig&) = default;
};

struct TopEntry {
  TokenId token = 0;
  double prob = 0.0;

  friend bool operator==(const TopEntry&, const TopEntry&) = default;
};

// Strict ordering used everywhere a rank is needed.
inline bool ranks_before(double prob_a, TokenId a, double prob_b, TokenId b) {
  return prob_a > prob_b || (prob_a == prob_b && a < b);
}

// A next-token distribution, either over the whole vocabulary or as the
// top-m truncation an API would reveal.
class TokenDistribution {
 public:
  enum class Kind { kFull, kTruncated };

  // Throws MalformedDistributionError unless every entry is finite, in [0, 1]
  // and the total is 1 within 1e-9.
  static TokenDistribution full(Eigen::VectorXd probs);
  // Throws MalformedDistributionError unless entries are strictly ordered by
  // (probability desc, id asc), ids are unique and below vocab_size.
  static TokenDistribution truncated(std::size_t vocab_size,
                                     std::vector<TopEntry> top);

  Kind kind() const { return kind_; }
  std::size_t vocab_size() const { return vocab_size_; }
  // Full kind only.
  const Eigen::VectorXd& probs() const;
  // The m highest-ranked entries (all of them when m exceeds what is held).
  std::vector<TopEntry> top(std::size_t m) const;

 private:
  TokenDistribution() = default;

  Kind kind_ = Kind::kFull;
  std::size_t vocab_size_ = 0;
  Eigen::VectorXd probs_;
  std::vector<TopEntry> top_;
};

namespace detail {

// Indices sorted by (score desc, index asc). Only the first `count` entries are
// guaranteed to be ordered.
template <typename Scalar>
std::vector<Eigen::Index> rank_order(const ProbVector<Scalar>& scores,
                                     Eigen::Index count) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto before = [&scores](Eigen::Index a, Eigen::Index b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  count = std::clamp<Eigen::Index>(count, 0, scores.size());
  std::partial_sort(order.begin(), order.begin() + count, order.end(), before);
  return order;
}

// log-scores may contain -inf (zero probability) but nothing else non-finite.
template <typename Scalar>
ProbVector<Scalar> truncate_and_normalize(const ProbVector<Scalar>& log_scores,
                                          const DecodingConfig& cfg) {
  const Eigen::Index vocab = log_scores.size();
  const Scalar max_score = log_scores.maxCoeff();
  if (!std::isfinite(static_cast<double>(max_score))) {
    throw MalformedDistributionError("distribution has no finite mass");
  }
  const Scalar inv_t = Scalar(1) / static_cast<Scalar>(cfg.temperature);
  // p^{1/T} renormalized == softmax(l / T); shifting by the max keeps exp in range.
  ProbVector<Scalar> weights =
      ((log_scores.array() - max_score) * inv_t).exp().matrix();

  if (cfg.truncation == Truncation::kNone) {
    return weights / weights.sum();
  }

  ProbVector<Scalar> kept = ProbVector<Scalar>::Zero(vocab);
  if (cfg.truncation == Truncation::kTopK) {
    const auto keep = static_cast<Eigen::Index>(
        std::min<std::size_t>(cfg.k, static_cast<std::size_t>(vocab)));
    const auto order = rank_order(log_scores, keep);
    for (Eigen::Index i = 0; i < keep; ++i) kept[order[i]] = weights[order[i]];
  } else {
    const auto order = rank_order(log_scores, vocab);
    const Scalar total = weights.sum();
    const Scalar target = static_cast<Scalar>(cfg.p) * total;
    Scalar cumulative = 0;
    for (Eigen::Index i = 0; i < vocab; ++i) {
      kept[order[i]] = weights[order[i]];
      cumulative += weights[order[i]];
      if (cumulative >= target) break;
    }
  }
  return kept / kept.sum();
}

}  // namespace detail

// Decodes a probability vector. Temperature is applied as p^{1/T} and
// renormalized, which matches softmax(logits / T) for the logits that produced
// p. Non-finite or negative inputs throw MalformedDistributionError; k larger
// than the vocabulary keeps everything.
template <typename Derived>
ProbVector<typename Derived::Scalar> apply_decoding(
    const Eigen::MatrixBase<Derived>& probs, const DecodingConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  if (probs.size() == 0) throw MalformedDistributionError("empty distribution");
  if (!probs.allFinite() || (probs.array() < Scalar(0)).any()) {
    throw MalformedDistributionError("probabilities must be finite and >= 0");
  }
  const ProbVector<Scalar> logs = probs.array().log().matrix();
  return detail::truncate_and_normalize<Scalar>(logs, cfg);
}

// Decodes raw scores (logits): softmax(scores / T), then truncation.
template <typename Derived>
ProbVector<typename Derived::Scalar> apply_decoding_to_scores(
    const Eigen::MatrixBase<Derived>& scores, const DecodingConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  if (scores.size() == 0) throw MalformedDistributionError("empty score vector");
  if (!scores.allFinite()) {
    throw MalformedDistributionError("scores must be finite");
  }
  return detail::truncate_and_normalize<Scalar>(scores.eval(), cfg);
}

TokenDistribution apply_decoding(const TokenDistribution& dist,
                                 const DecodingConfig& cfg);

// 1-based rank of `token` under (probability desc, id asc).
template <typename Derived>
std::size_t rank_of(const Eigen::MatrixBase<Derived>& probs, TokenId token) {
  const auto v = static_cast<Eigen::Index>(token);
  if (v < 0 || v >= probs.size()) {
    throw std::invalid_argument("token id outside the vocabulary");
  }
  const auto pv = probs[v];
  std::size_t rank = 1;
  for (Eigen::Index u = 0; u < probs.size(); ++u) {
    if (probs[u] > pv || (probs[u] == pv && u < v)) ++rank;
  }
  return rank;
}

std::size_t rank_of(const TokenDistribution& dist, TokenId token);

}  // namespace inextract

#endif  // INEXTRACT_DECODING_HPP_
