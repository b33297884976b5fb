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

#include "inextract/attack_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "inextract/errors.hpp"
#include "inextract/rng.hpp"

namespace inextract {
namespace {

void check_window(const SequenceTrace& trace, std::size_t offset, std::size_t l) {
  if (l == 0 || offset == 0 || offset + l - 1 > trace.length()) {
    throw WindowRangeError("window [" + std::to_string(offset) + ", +" + std::to_string(l) +
                           ") outside trace \"" + trace.seq_id + "\"");
  }
}

// Decoded distributions along the true continuation, computed on demand.
class DecodedPath {
 public:
  DecodedPath(const LanguageModel& model, std::span<const TokenId> prefix,
              std::span<const TokenId> suffix, const DecodingConfig& cfg)
      : model_(model), cfg_(cfg), context_(prefix.begin(), prefix.end()),
        suffix_(suffix) {}

  const Eigen::VectorXd& at(std::size_t i) {
    while (decoded_.size() <= i) {
      const std::size_t j = decoded_.size();
      decoded_.push_back(apply_decoding(model_.next_distribution(context_), cfg_));
      context_.push_back(suffix_[j]);
    }
    return decoded_[i];
  }

 private:
  const LanguageModel& model_;
  DecodingConfig cfg_;
  std::vector<TokenId> context_;
  std::span<const TokenId> suffix_;
  std::vector<Eigen::VectorXd> decoded_;
};

bool run_trial(DecodedPath& path, std::span<const TokenId> suffix, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    if (sample_token(path.at(i), rng) != suffix[i]) return false;
  }
  return true;
}

double at_least_once(double p, double n) {
  if (p >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-p));
}

}  // namespace

DecodingProfile::DecodingProfile(const Eigen::Ref<const Eigen::VectorXd>& probs,
                                 TokenId token) {
  if (probs.size() == 0) throw MalformedDistributionError("empty distribution");
  if (!probs.allFinite() || (probs.array() < 0.0).any()) {
    throw MalformedDistributionError("probabilities must be finite and >= 0");
  }
  rank_ = rank_of(probs, token);
  const Eigen::VectorXd owned = probs;
  const auto order = detail::rank_order<double>(owned, owned.size());
  log_sorted_.resize(owned.size());
  for (Eigen::Index i = 0; i < owned.size(); ++i) {
    log_sorted_[i] = std::log(owned[order[static_cast<std::size_t>(i)]]);
  }
}

const std::vector<double>& DecodingProfile::prefix_sums(double temperature) const {
  for (const auto& [t, sums] : cache_) {
    if (t == temperature) return sums;
  }
  const double top = log_sorted_[0];
  std::vector<double> sums(static_cast<std::size_t>(log_sorted_.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < log_sorted_.size(); ++i) {
    acc += std::exp((log_sorted_[i] - top) / temperature);
    sums[static_cast<std::size_t>(i)] = acc;
  }
  cache_.emplace_back(temperature, std::move(sums));
  return cache_.back().second;
}

double DecodingProfile::top_k_prob(std::size_t k, double temperature) const {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (rank_ > k) return 0.0;
  const auto& sums = prefix_sums(temperature);
  const std::size_t keep = std::min(k, sums.size());
  const double own = std::exp((log_sorted_[static_cast<Eigen::Index>(rank_ - 1)] -
                               log_sorted_[0]) / temperature);
  return own / sums[keep - 1];
}

double analytic_trial_prob(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                           const DecodingConfig& cfg) {
  const std::vector<DecodingConfig> configs(l, cfg);
  return analytic_trial_prob(trace, offset, l, configs);
}

double analytic_trial_prob(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                           std::span<const DecodingConfig> per_position) {
  check_window(trace, offset, l);
  if (per_position.size() != l) {
    throw std::invalid_argument("need exactly one decoding config per window position");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t idx = offset - 1 + i;
    const Eigen::VectorXd decoded = apply_decoding(trace.distribution_at(idx), per_position[i]);
    p *= decoded[trace.positions[idx].true_token];
  }
  return p;
}

double analytic_trial_prob(const LanguageModel& model, std::span<const TokenId> prefix,
                           std::span<const TokenId> suffix, const DecodingConfig& cfg) {
  DecodedPath path(model, prefix, suffix, cfg);
  double p = 1.0;
  for (std::size_t i = 0; i < suffix.size() && p > 0.0; ++i) p *= path.at(i)[suffix[i]];
  return p;
}

double rank_ceiling(const SequenceTrace& trace, std::size_t offset, std::size_t l) {
  check_window(trace, offset, l);
  double log_ceiling = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    log_ceiling -= std::log(static_cast<double>(trace.positions[offset - 1 + i].true_rank));
  }
  return std::exp(log_ceiling);
}

GridSearchResult grid_search(const SequenceTrace& trace, std::size_t offset, std::size_t l,
                             std::span<const std::size_t> k_grid,
                             std::span<const double> t_grid, SearchMode mode) {
  if (k_grid.empty() || t_grid.empty()) throw std::invalid_argument("empty search grid");
  for (std::size_t k : k_grid) DecodingConfig::top_k(k).validate();
  for (double t : t_grid) DecodingConfig::top_k(1, t).validate();
  check_window(trace, offset, l);

  std::vector<DecodingProfile> profiles;
  profiles.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t idx = offset - 1 + i;
    profiles.emplace_back(trace.distribution_at(idx), trace.positions[idx].true_token);
  }

  GridSearchResult result;
  result.mode = mode;
  result.ceiling = rank_ceiling(trace, offset, l);
  if (mode == SearchMode::kGlobal) {
    result.best_p = -1.0;
    for (std::size_t k : k_grid) {
      for (double t : t_grid) {
        double p = 1.0;
        for (const auto& prof : profiles) {
          p *= prof.top_k_prob(k, t);
          if (p == 0.0) break;
        }
        if (p > result.best_p) {
          result.best_p = p;
          result.best_config = DecodingConfig::top_k(k, t);
        }
      }
    }
    result.position_configs.assign(l, result.best_config);
    return result;
  }

  result.best_p = 1.0;
  for (const auto& prof : profiles) {
    double best = -1.0;
    DecodingConfig best_cfg;
    for (std::size_t k : k_grid) {
      for (double t : t_grid) {
        const double p = prof.top_k_prob(k, t);
        if (p > best) {
          best = p;
          best_cfg = DecodingConfig::top_k(k, t);
        }
      }
    }
    result.best_p *= best;
    result.position_configs.push_back(best_cfg);
  }
  result.best_config = result.position_configs.front();
  return result;
}

bool single_trial(const LanguageModel& model, std::span<const TokenId> prefix,
                  std::span<const TokenId> suffix, const DecodingConfig& cfg,
                  std::uint64_t seed) {
  if (suffix.empty()) throw std::invalid_argument("suffix must be non-empty");
  cfg.validate();
  DecodedPath path(model, prefix, suffix, cfg);
  return run_trial(path, suffix, seed);
}

AttackOutcome multi_trial(const LanguageModel& model, std::span<const TokenId> prefix,
                          std::span<const TokenId> suffix, const DecodingConfig& cfg,
                          std::uint64_t n, std::uint64_t seed) {
  if (suffix.empty()) throw std::invalid_argument("suffix must be non-empty");
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  cfg.validate();
  DecodedPath path(model, prefix, suffix, cfg);
  AttackOutcome out;
  out.n_trials = n;
  out.config = cfg;
  out.seed = seed;
  for (std::uint64_t j = 0; j < n; ++j) {
    if (run_trial(path, suffix, derive_seed(seed, j))) ++out.successes;
  }
  out.empirical_rate = static_cast<double>(out.successes) / static_cast<double>(n);
  out.trial_prob = analytic_trial_prob(model, prefix, suffix, cfg);
  out.analytic_rate = at_least_once(out.trial_prob, static_cast<double>(n));
  return out;
}

double CompoundingResult::z_score() const {
  const double gap = empirical_rate - analytic_rate;
  if (sigma == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gap / sigma;
}

CompoundingResult repeat_batches(const LanguageModel& model, std::span<const TokenId> prefix,
                                 std::span<const TokenId> suffix, const DecodingConfig& cfg,
                                 std::uint64_t n, std::uint64_t batches, std::uint64_t seed) {
  if (suffix.empty()) throw std::invalid_argument("suffix must be non-empty");
  if (n == 0 || batches == 0) throw std::invalid_argument("n and batches must be >= 1");
  cfg.validate();
  DecodedPath path(model, prefix, suffix, cfg);
  CompoundingResult out;
  out.n = n;
  out.batches = batches;
  for (std::uint64_t b = 0; b < batches; ++b) {
    const std::uint64_t batch_seed = derive_seed(seed, b);
    for (std::uint64_t j = 0; j < n; ++j) {
      if (run_trial(path, suffix, derive_seed(batch_seed, j))) {
        ++out.hits;
        break;
      }
    }
  }
  const double p = analytic_trial_prob(model, prefix, suffix, cfg);
  out.empirical_rate = static_cast<double>(out.hits) / static_cast<double>(batches);
  out.analytic_rate = at_least_once(p, static_cast<double>(n));
  out.sigma = std::sqrt(out.analytic_rate * (1.0 - out.analytic_rate) /
                        static_cast<double>(batches));
  return out;
}

}  // namespace inextract
