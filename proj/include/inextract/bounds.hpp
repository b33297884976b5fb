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

// Closed-form calculators around the inextractability level b: cost at n
// trials, (l, b, delta) conversion, untargeted erosion, blind and in-context
// baselines, and the DP reconstruction / reducibility formulas. Every formula
// is evaluated through log1p / expm1 forms that stay finite for tiny
// probabilities and huge budgets.

#ifndef INEXTRACT_BOUNDS_HPP_
#define INEXTRACT_BOUNDS_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inextract/language_model.hpp"
#include "inextract/trace.hpp"

namespace inextract {

// log2(n / (1 - (1 - p_z)^n)): the cost-to-success ratio of n independent
// trials. Non-decreasing in n, equal to -log2(p_z) at n = 1. Returns +inf for
// p_z = 0.
double cost_at_n(double p_z, double n);

struct ProbabilisticGuarantee {
  double b = 0.0;
  double delta = 0.0;
  double n_exact = 0.0;   // ln(1/delta) / -ln(1 - 2^-b)
  double n_stable = 0.0;  // ln(1/delta) * 2^b
  double b_delta = 0.0;   // log2(n_exact)
};

// Throws std::invalid_argument unless b >= 0 and 0 < delta < 1.
ProbabilisticGuarantee probabilistic_conversion(double b, double delta);

enum class UntargetedMode { kUnion, kIndependent };

// Lower bound on untargeted inextractability over M protected l-grams:
// union -> max{0, b - log2 M}; independent -> -log2(1 - (1 - 2^-b)^M).
double untargeted_bound(double b, double M, UntargetedMode mode);

// l * log2|V|.
double uniform_baseline(std::size_t l, std::size_t vocab_size);
// Empirical token frequencies (no smoothing) over the given sequences.
Eigen::VectorXd unigram_frequencies(const std::vector<std::vector<TokenId>>& corpus,
                                    std::size_t vocab_size);
// -sum log2 freq(z_t); +inf when a window token never occurs.
double unigram_baseline(const Eigen::Ref<const Eigen::VectorXd>& frequencies,
                        std::span<const TokenId> window);
// Rank-aware cost of the same window under a proxy model's trace.
double contextual_baseline(const SequenceTrace& proxy_trace, std::size_t offset,
                           std::size_t l, std::size_t m);

// Prompt with one "{target}" placeholder. The repetition is elicited right
// after the filled-in prompt.
class PromptTemplate {
 public:
  static constexpr std::string_view kPlaceholder = "{target}";
  static constexpr std::string_view kRepeatAfterMe = "Please repeat after me: \"{target}\". ";

  // Byte-level template; throws std::invalid_argument without a placeholder.
  static PromptTemplate parse(std::string_view text);
  PromptTemplate(std::vector<TokenId> before, std::vector<TokenId> after)
      : before_(std::move(before)), after_(std::move(after)) {}

  std::vector<TokenId> fill(std::span<const TokenId> target) const;

 private:
  std::vector<TokenId> before_;
  std::vector<TokenId> after_;
};

// Cost b_ctx of repeating `target` once it has been revealed in the prompt.
// Audited windows cheaper than b_ctx are high-risk. An empty target costs 0.
double in_context_cost(const LanguageModel& model, std::span<const TokenId> target,
                       const PromptTemplate& prompt, std::size_t m);

struct DpParameters {
  double epsilon = 0.0;
  double delta = 0.0;
  double p0 = 0.5;  // prior success probability

  // Throws std::invalid_argument unless epsilon >= 0, 0 <= delta < 1 and
  // 0 < p0 < 1.
  void validate() const;
};

struct ReconstructionBound {
  double bound = 0.0;        // e^eps / (e^eps - 1 + 1/p0) + delta
  double loose_bound = 0.0;  // e^eps * p0 + delta
};

ReconstructionBound dp_reconstruction_bound(const DpParameters& dp);

// Prior above which a DP guarantee no longer bounds extraction below the DPD
// advantage: (e^eps - 1) / (3 e^eps - 1).
double prior_threshold(double epsilon);
// ln((1 - p0) / (1 - 3 p0)) for p0 < 1/3; empty otherwise.
std::optional<double> epsilon_threshold(double p0);

struct ReducibilityVerdict {
  double adv_dpd_bound = 0.0;  // (e^eps - 1 + 2 delta) / (e^eps + 1)
  double adv_de_bound = 0.0;   // dp_reconstruction_bound().bound
  double p0_threshold = 0.0;
  std::optional<double> epsilon_threshold;
  // DPD resilience does not imply DE resilience (p0 > p0_threshold).
  bool dpd_not_reducible_to_de = false;
  // DE resilience does not bound DPD (p0 < p0_threshold).
  bool de_not_reducible_to_dpd = false;
  // p0 >= 1/3: the first separation holds for every eps > 0.
  bool separated_for_all_epsilon = false;
};

// Requires dp.delta == 0.
ReducibilityVerdict reducibility_region(const DpParameters& dp);

}  // namespace inextract

#endif  // INEXTRACT_BOUNDS_HPP_
