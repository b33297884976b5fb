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

// Byte-level n-gram model with Laplace smoothing. It stands in for a real
// checkpoint: it is deterministic given its corpus and parameters, and every
// conditional distribution has full support over the 256 byte values.

#ifndef INEXTRACT_TOY_LM_HPP_
#define INEXTRACT_TOY_LM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inextract/language_model.hpp"

namespace inextract {

std::vector<TokenId> bytes_to_tokens(std::string_view text);
std::string tokens_to_bytes(std::span<const TokenId> tokens);
// Non-empty lines of `corpus` (without the line terminator), byte-tokenized.
std::vector<std::vector<TokenId>> tokenize_lines(std::string_view corpus);

struct ToyLmOptions {
  std::size_t order = 2;  // number of preceding symbols conditioned on
  double alpha = 1.0;     // Laplace pseudo-count, must be > 0
};

class ToyLm final : public LanguageModel {
 public:
  static constexpr std::size_t kVocabSize = 256;
  static constexpr std::size_t kMaxOrder = 7;
  // Context padding symbol; never emitted.
  static constexpr std::uint32_t kBos = 256;

  // Each sequence is trained with BOS padding in front. Throws Error when the
  // sequences contain no tokens.
  static ToyLm train(const std::vector<std::vector<TokenId>>& sequences,
                     ToyLmOptions options = {});
  static ToyLm train_text(std::string_view corpus, ToyLmOptions options = {});

  // Canonical JSON; equal models serialize to identical bytes.
  std::string to_json() const;
  static ToyLm from_json(std::string_view json);
  void save(const std::string& path) const;
  static ToyLm load(const std::string& path);

  std::size_t vocab_size() const override { return kVocabSize; }
  Eigen::VectorXd next_distribution(
      std::span<const TokenId> context) const override;

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  // Raw continuation count of `token` after the last `order` symbols of
  // BOS-padded `context`.
  std::uint64_t count(std::span<const TokenId> context, TokenId token) const;

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint64_t>> counts;  // sorted by token
  };

  ToyLm(std::size_t order, double alpha) : order_(order), alpha_(alpha) {}
  std::uint64_t context_key(std::span<const TokenId> context) const;
  std::vector<std::uint32_t> decode_key(std::uint64_t key) const;

  std::size_t order_;
  double alpha_;
  std::map<std::uint64_t, ContextCounts> table_;
};

}  // namespace inextract

#endif  // INEXTRACT_TOY_LM_HPP_
