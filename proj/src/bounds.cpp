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

#include "inextract/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "inextract/estimator.hpp"
#include "inextract/toy_lm.hpp"

namespace inextract {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double cost_at_n(double p_z, double n) {
  if (!(p_z >= 0.0 && p_z <= 1.0)) throw std::invalid_argument("p_z must lie in [0, 1]");
  if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
  if (p_z == 0.0) return kInf;
  if (n == 1.0) return 0.0 - std::log2(p_z);
  // 1 - (1 - p)^n = -expm1(n * log1p(-p))
  const double success = -std::expm1(n * std::log1p(-p_z));
  return std::log2(n) - std::log2(success);
}

ProbabilisticGuarantee probabilistic_conversion(double b, double delta) {
  if (!(b >= 0.0)) throw std::invalid_argument("b must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  ProbabilisticGuarantee g;
  g.b = b;
  g.delta = delta;
  const double log_inv_delta = -std::log(delta);
  g.n_exact = log_inv_delta / -std::log1p(-std::exp2(-b));
  g.n_stable = log_inv_delta * std::exp2(b);
  g.b_delta = std::log2(g.n_exact);
  return g;
}

double untargeted_bound(double b, double M, UntargetedMode mode) {
  if (!(b >= 0.0)) throw std::invalid_argument("b must be >= 0");
  if (!(M >= 1.0)) throw std::invalid_argument("M must be >= 1");
  if (M == 1.0) return b;
  if (mode == UntargetedMode::kUnion) return std::max(0.0, b - std::log2(M));
  const double success = -std::expm1(M * std::log1p(-std::exp2(-b)));
  return 0.0 - std::log2(success);
}

double uniform_baseline(std::size_t l, std::size_t vocab_size) {
  if (vocab_size == 0) throw std::invalid_argument("vocab_size must be positive");
  return static_cast<double>(l) * std::log2(static_cast<double>(vocab_size));
}

Eigen::VectorXd unigram_frequencies(const std::vector<std::vector<TokenId>>& corpus,
                                    std::size_t vocab_size) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_size));
  for (const auto& seq : corpus) {
    for (TokenId t : seq) {
      if (t >= vocab_size) throw std::invalid_argument("token id out of range");
      counts[t] += 1.0;
    }
  }
  const double total = counts.sum();
  if (total == 0.0) throw Error("cannot estimate unigram frequencies from an empty corpus");
  return counts / total;
}

double unigram_baseline(const Eigen::Ref<const Eigen::VectorXd>& frequencies,
                        std::span<const TokenId> window) {
  double bits = 0.0;
  for (TokenId t : window) {
    if (static_cast<Eigen::Index>(t) >= frequencies.size()) {
      throw std::invalid_argument("token id out of range");
    }
    const double f = frequencies[t];
    if (f <= 0.0) return kInf;
    bits -= std::log2(f);
  }
  return bits;
}

double contextual_baseline(const SequenceTrace& proxy_trace, std::size_t offset,
                           std::size_t l, std::size_t m) {
  return window_cost(proxy_trace, offset, l, m).cost_bits;
}

PromptTemplate PromptTemplate::parse(std::string_view text) {
  const auto at = text.find(kPlaceholder);
  if (at == std::string_view::npos) {
    throw std::invalid_argument("prompt template lacks the {target} placeholder");
  }
  return PromptTemplate(bytes_to_tokens(text.substr(0, at)),
                        bytes_to_tokens(text.substr(at + kPlaceholder.size())));
}

std::vector<TokenId> PromptTemplate::fill(std::span<const TokenId> target) const {
  std::vector<TokenId> out(before_);
  out.insert(out.end(), target.begin(), target.end());
  out.insert(out.end(), after_.begin(), after_.end());
  return out;
}

double in_context_cost(const LanguageModel& model, std::span<const TokenId> target,
                       const PromptTemplate& prompt, std::size_t m) {
  if (target.empty()) return 0.0;
  std::vector<TokenId> tokens = prompt.fill(target);
  const std::size_t offset = tokens.size() + 1;
  tokens.insert(tokens.end(), target.begin(), target.end());
  const SequenceTrace trace = teacher_forced_trace(model, tokens, m, "in-context");
  return window_cost(trace, offset, target.size(), trace.m).cost_bits;
}

void DpParameters::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
}

ReconstructionBound dp_reconstruction_bound(const DpParameters& dp) {
  dp.validate();
  ReconstructionBound out;
  if (dp.epsilon == 0.0) {
    out.bound = dp.p0 + dp.delta;
  } else {
    // e^eps / (e^eps - 1 + 1/p0) rewritten in e^-eps so eps -> inf stays finite.
    const double decay = std::exp(-dp.epsilon);
    out.bound = 1.0 / (1.0 + decay * (1.0 / dp.p0 - 1.0)) + dp.delta;
  }
  out.loose_bound = std::exp(dp.epsilon) * dp.p0 + dp.delta;
  return out;
}

double prior_threshold(double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  const double decay = std::exp(-epsilon);
  return -std::expm1(-epsilon) / (3.0 - decay);
}

std::optional<double> epsilon_threshold(double p0) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
  if (p0 >= 1.0 / 3.0) return std::nullopt;
  return std::log((1.0 - p0) / (1.0 - 3.0 * p0));
}

ReducibilityVerdict reducibility_region(const DpParameters& dp) {
  dp.validate();
  if (dp.delta != 0.0) {
    throw std::invalid_argument("reducibility thresholds are derived for delta = 0");
  }
  ReducibilityVerdict v;
  const double decay = std::exp(-dp.epsilon);
  v.adv_dpd_bound = (-std::expm1(-dp.epsilon) + 2.0 * dp.delta * decay) / (1.0 + decay);
  v.adv_de_bound = dp_reconstruction_bound(dp).bound;
  v.p0_threshold = prior_threshold(dp.epsilon);
  v.epsilon_threshold = epsilon_threshold(dp.p0);
  v.dpd_not_reducible_to_de = dp.p0 > v.p0_threshold;
  v.de_not_reducible_to_dpd = dp.p0 < v.p0_threshold;
  v.separated_for_all_epsilon = !v.epsilon_threshold.has_value();
  return v;
}

}  // namespace inextract
