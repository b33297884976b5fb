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

#ifndef INEXTRACT_RNG_HPP_
#define INEXTRACT_RNG_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <random>

#include "inextract/decoding.hpp"

namespace inextract {

// Seeded generator with a portable uniform draw (mt19937_64 output is fixed by
// the standard; std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Independent child seed for (seed, index), via splitmix64 finalization.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Inverse-CDF draw over token ids in ascending order. Zero-probability tokens
// are never returned. `probs` must be non-negative with positive mass.
TokenId sample_token(const Eigen::Ref<const Eigen::VectorXd>& probs, Rng& rng);
TokenId sample_token(const TokenDistribution& dist, Rng& rng);

}  // namespace inextract

#endif  // INEXTRACT_RNG_HPP_
