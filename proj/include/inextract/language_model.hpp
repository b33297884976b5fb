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

#ifndef INEXTRACT_LANGUAGE_MODEL_HPP_
#define INEXTRACT_LANGUAGE_MODEL_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "inextract/decoding.hpp"

namespace inextract {

// Full-distribution access to a causal model. The begin-of-sequence context is
// implicit: `context` holds the tokens generated after BOS, so an empty context
// asks for the first-token distribution.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual Eigen::VectorXd next_distribution(
      std::span<const TokenId> context) const = 0;
};

// Next-token distribution that depends only on the context length: position t
// (1-based) uses schedule[min(t, size) - 1]. Handy for synthetic fixtures with
// known ranks.
class ScheduleModel final : public LanguageModel {
 public:
  explicit ScheduleModel(std::vector<Eigen::VectorXd> schedule)
      : schedule_(std::move(schedule)) {
    if (schedule_.empty()) throw std::invalid_argument("empty schedule");
    for (const auto& d : schedule_) {
      if (d.size() != schedule_.front().size()) {
        throw std::invalid_argument("schedule distributions differ in size");
      }
    }
  }

  std::size_t vocab_size() const override {
    return static_cast<std::size_t>(schedule_.front().size());
  }
  Eigen::VectorXd next_distribution(std::span<const TokenId> context) const override {
    return schedule_[std::min(context.size(), schedule_.size() - 1)];
  }

 private:
  std::vector<Eigen::VectorXd> schedule_;
};

}  // namespace inextract

#endif  // INEXTRACT_LANGUAGE_MODEL_HPP_
