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

// Worst-case extraction game: analytic single-trial probabilities under a
// decoding config, (k, T) grid search against the 1/prod(r_t) ceiling, and
// seeded Monte Carlo trials that replay the attack against a model.

#ifndef INEXTRACT_ATTACK_SIM_HPP_
#define INEXTRACT_ATTACK_SIM_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "inextract/decoding.hpp"
#include "inextract/language_model.hpp"
#include "inextract/trace.hpp"

namespace inextract {

// Decoded probability of one token under every top-k / temperature setting,
// answered in O(1) per k once a temperature has been prepared.
class DecodingProfile {
 public:
  DecodingProfile(const Eigen::Ref<const Eigen::VectorXd>& probs, TokenId token);

  std::size_t rank() const { return rank_; }
  std::size_t vocab_size() const { return static_cast<std::size_t>(log_sorted_.size()); }
  // Probability of the token after top-k truncation at temperature T. k
  // clamps to the vocabulary, so k >= |V| means no truncation.
  double top_k_prob(std::size_t k, double temperature) const;

 private:
  const std::vector<double>& prefix_sums(double temperature) const;

  std::size_t rank_ = 0;
  Eigen::VectorXd log_sorted_;  // log-probabilities in rank order
  mutable std::vector<std::pair<double, std::vector<double>>> cache_;
};

// Product of the decoded true-token probabilities over positions
// [offset, offset + l) of a full trace. Tokens cut by the config contribute 0.
double analytic_trial_prob(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                           const DecodingConfig& cfg);
// One config per window position.
double analytic_trial_prob(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                           std::span<const DecodingConfig> per_position);
// Same quantity straight from a model, conditioning on the true prefix.
double analytic_trial_prob(const LanguageModel& model, std::span<const TokenId> prefix,
                           std::span<const TokenId> suffix, const DecodingConfig& cfg);

// prod 1/r_t over the window.
double rank_ceiling(const SequenceTrace& trace, std::size_t offset, std::size_t l);

enum class SearchMode {
  kGlobal,       // one (k, T) for the whole window
  kPerPosition,  // the adversary retunes (k, T) at every position
};

struct GridSearchResult {
  SearchMode mode = SearchMode::kGlobal;
  double best_p = 0.0;
  double ceiling = 0.0;
  DecodingConfig best_config;                 // kGlobal
  std::vector<DecodingConfig> position_configs;  // one per position in either mode
};

// Maximizes analytic_trial_prob over top-k configs drawn from the grids. Ties
// keep the earliest grid point (k outer, T inner). Throws std::invalid_argument
// on empty grids.
GridSearchResult grid_search(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                             std::span<const std::size_t> k_grid,
                             std::span<const double> t_grid, SearchMode mode);

// Samples |suffix| tokens after `prefix` and reports an exact match.
bool single_trial(const LanguageModel& model, std::span<const TokenId> prefix,
                  std::span<const TokenId> suffix, const DecodingConfig& cfg,
                  std::uint64_t seed);

struct AttackOutcome {
  std::uint64_t n_trials = 0;
  std::uint64_t successes = 0;
  double empirical_rate = 0.0;  // successes / n_trials
  double trial_prob = 0.0;      // analytic single-trial p
  double analytic_rate = 0.0;   // 1 - (1 - p)^n
  DecodingConfig config;
  std::uint64_t seed = 0;

  bool extracted() const { return successes > 0; }
};

// n independent single trials; trial j runs with derive_seed(seed, j).
AttackOutcome multi_trial(const LanguageModel& model, std::span<const TokenId> prefix,
                          std::span<const TokenId> suffix, const DecodingConfig& cfg,
                          std::uint64_t n, std::uint64_t seed);

struct CompoundingResult {
  std::uint64_t n = 0;
  std::uint64_t batches = 0;
  std::uint64_t hits = 0;        // batches with at least one success
  double empirical_rate = 0.0;   // hits / batches
  double analytic_rate = 0.0;    // 1 - (1 - p)^n
  double sigma = 0.0;            // binomial standard deviation of empirical_rate

  double z_score() const;
};

// Repeats multi_trial over `batches` batches seeded derive_seed(seed, b).
CompoundingResult repeat_batches(const LanguageModel& model, std::span<const TokenId> prefix,
                                 std::span<const TokenId> suffix, const DecodingConfig& cfg,
                                 std::uint64_t n, std::uint64_t batches, std::uint64_t seed);

}  // namespace inextract

#endif  // INEXTRACT_ATTACK_SIM_HPP_
