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

#ifndef INEXTRACT_TRACE_HPP_
#define INEXTRACT_TRACE_HPP_

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "inextract/decoding.hpp"
#include "inextract/language_model.hpp"

namespace inextract {

// Teacher-forced record for one position of a protected sequence.
struct PositionRecord {
  std::size_t t = 0;  // 1-based
  TokenId true_token = 0;
  std::size_t true_rank = 0;
  double true_prob = 0.0;
  std::vector<TopEntry> topm;

  friend bool operator==(const PositionRecord&, const PositionRecord&) = default;
};

struct SequenceTrace {
  std::string seq_id;
  std::vector<TokenId> tokens;
  std::size_t vocab_size = 0;
  std::size_t m = 0;
  std::vector<PositionRecord> positions;

  std::size_t length() const { return positions.size(); }
  // True when every position reveals the whole vocabulary.
  bool is_full() const;
  // Full next-token distribution at 0-based position `index`; requires a full
  // trace.
  Eigen::VectorXd distribution_at(std::size_t index) const;

  friend bool operator==(const SequenceTrace&, const SequenceTrace&) = default;
};

// Throws TraceFormatError naming seq_id and position for the first violated
// invariant.
void validate_trace(const SequenceTrace& trace);

// One BOS-conditioned pass: position t is predicted from BOS + tokens[0, t-1).
// m is clamped to the vocabulary size.
SequenceTrace teacher_forced_trace(const LanguageModel& model,
                                   std::span<const TokenId> tokens,
                                   std::size_t m, std::string seq_id = "");

}  // namespace inextract

#endif  // INEXTRACT_TRACE_HPP_
