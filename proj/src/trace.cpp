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

#include "inextract/trace.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace inextract {
namespace {

[[noreturn]] void fail(const SequenceTrace& trace, std::size_t t,
                       const std::string& what) {
  std::ostringstream os;
  os << "trace seq_id=\"" << trace.seq_id << "\"";
  if (t > 0) os << " position t=" << t;
  os << ": " << what;
  throw TraceFormatError(os.str());
}

bool valid_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

bool SequenceTrace::is_full() const {
  if (m < vocab_size) return false;
  for (const auto& pos : positions) {
    if (pos.topm.size() != vocab_size) return false;
  }
  return true;
}

Eigen::VectorXd SequenceTrace::distribution_at(std::size_t index) const {
  if (index >= positions.size()) throw std::out_of_range("trace position");
  const auto& pos = positions[index];
  if (pos.topm.size() != vocab_size) {
    throw InsufficientTraceError("trace \"" + seq_id +
                                 "\" does not carry full distributions");
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_size));
  for (const auto& e : pos.topm) probs[e.token] = e.prob;
  return probs;
}

void validate_trace(const SequenceTrace& trace) {
  if (trace.vocab_size == 0) fail(trace, 0, "vocab_size must be positive");
  if (trace.m == 0) fail(trace, 0, "m must be positive");
  if (trace.tokens.size() != trace.positions.size()) {
    fail(trace, 0, "tokens and positions differ in length");
  }
  for (std::size_t i = 0; i < trace.positions.size(); ++i) {
    const PositionRecord& pos = trace.positions[i];
    const std::size_t t = i + 1;
    if (pos.t != t) fail(trace, t, "positions must be numbered 1..L in order");
    if (trace.tokens[i] >= trace.vocab_size) fail(trace, t, "token id out of range");
    if (pos.true_token != trace.tokens[i]) {
      fail(trace, t, "true token differs from tokens[t-1]");
    }
    if (pos.true_rank < 1 || pos.true_rank > trace.vocab_size) {
      fail(trace, t, "true_rank must lie in [1, vocab_size]");
    }
    if (!valid_prob(pos.true_prob)) fail(trace, t, "true_prob outside [0, 1]");
    if (pos.topm.size() > trace.m) fail(trace, t, "topm longer than m");

    std::unordered_set<TokenId> ids;
    for (std::size_t j = 0; j < pos.topm.size(); ++j) {
      const TopEntry& e = pos.topm[j];
      if (e.token >= trace.vocab_size) fail(trace, t, "topm token id out of range");
      if (!valid_prob(e.prob)) fail(trace, t, "topm probability outside [0, 1]");
      if (!ids.insert(e.token).second) fail(trace, t, "duplicate token in topm");
      if (j > 0 && !ranks_before(pos.topm[j - 1].prob, pos.topm[j - 1].token,
                                 e.prob, e.token)) {
        fail(trace, t, "topm not sorted by probability desc, token id asc");
      }
    }

    if (!pos.topm.empty() && pos.true_prob > pos.topm.front().prob) {
      fail(trace, t, "true_prob exceeds the top-ranked probability");
    }
    if (pos.true_rank <= pos.topm.size()) {
      const TopEntry& at_rank = pos.topm[pos.true_rank - 1];
      if (at_rank.token != pos.true_token || at_rank.prob != pos.true_prob) {
        fail(trace, t, "topm entry at true_rank does not match the true token");
      }
    } else if (pos.true_rank <= trace.m) {
      fail(trace, t, "true_rank <= m but the true token is absent from topm");
    } else {
      if (ids.contains(pos.true_token)) {
        fail(trace, t, "true token appears in topm but true_rank > m");
      }
      if (!pos.topm.empty() &&
          !ranks_before(pos.topm.back().prob, pos.topm.back().token,
                        pos.true_prob, pos.true_token)) {
        fail(trace, t, "true token would rank inside the revealed topm");
      }
    }
  }
}

SequenceTrace teacher_forced_trace(const LanguageModel& model,
                                   std::span<const TokenId> tokens,
                                   std::size_t m, std::string seq_id) {
  if (m == 0) throw std::invalid_argument("m must be positive");
  const std::size_t vocab = model.vocab_size();
  SequenceTrace trace;
  trace.seq_id = std::move(seq_id);
  trace.tokens.assign(tokens.begin(), tokens.end());
  trace.vocab_size = vocab;
  trace.m = std::min(m, vocab);
  trace.positions.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= vocab) throw std::invalid_argument("token id out of range");
    const Eigen::VectorXd probs = model.next_distribution(tokens.first(i));
    if (static_cast<std::size_t>(probs.size()) != vocab) {
      throw MalformedDistributionError("model returned a distribution of the wrong size");
    }
    PositionRecord pos;
    pos.t = i + 1;
    pos.true_token = tokens[i];
    pos.true_rank = rank_of(probs, tokens[i]);
    pos.true_prob = probs[tokens[i]];
    const auto count = static_cast<Eigen::Index>(trace.m);
    const auto order = detail::rank_order<double>(probs, count);
    pos.topm.reserve(trace.m);
    for (Eigen::Index j = 0; j < count; ++j) {
      pos.topm.push_back({static_cast<TokenId>(order[j]), probs[order[j]]});
    }
    trace.positions.push_back(std::move(pos));
  }
  return trace;
}

}  // namespace inextract
