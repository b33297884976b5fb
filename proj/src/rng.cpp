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

#include "inextract/rng.hpp"

#include <stdexcept>

namespace inextract {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TokenId sample_token(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng) {
  const double total = probs.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw MalformedDistributionError("cannot sample from a distribution without mass");
  }
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  Eigen::Index last_positive = -1;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return static_cast<TokenId>(i);
  }
  // Rounding left u at or past the accumulated total.
  return static_cast<TokenId>(last_positive);
}

TokenId sample_token(const TokenDistribution& dist, Rng& rng) {
  return sample_token(dist.probs(), rng);
}

}  // namespace inextract
