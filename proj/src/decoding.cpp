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

#include "inextract/decoding.hpp"

#include <charconv>
#include <stdexcept>

namespace inextract {

void DecodingConfig::validate() const {
  if (!(temperature > 0.0) || std::isnan(temperature)) {
    throw std::invalid_argument("temperature must be > 0");
  }
  if (truncation == Truncation::kTopK && k < 1) {
    throw std::invalid_argument("top-k requires k >= 1");
  }
  if (truncation == Truncation::kTopP && !(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("top-p requires 0 < p <= 1");
  }
}

namespace {

std::string shortest(double x) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof(buf), x).ptr);
}

}  // namespace

std::string DecodingConfig::to_string() const {
  std::string out;
  switch (truncation) {
    case Truncation::kNone:
      out = "none";
      break;
    case Truncation::kTopK:
      out = "top-k(" + std::to_string(k) + ")";
      break;
    case Truncation::kTopP:
      out = "top-p(" + shortest(p) + ")";
      break;
  }
  return out + ",T=" + shortest(temperature);
}

TokenDistribution TokenDistribution::full(Eigen::VectorXd probs) {
  if (probs.size() == 0) throw MalformedDistributionError("empty distribution");
  if (!probs.allFinite() || (probs.array() < 0.0).any() ||
      (probs.array() > 1.0).any()) {
    throw MalformedDistributionError(
        "full distribution entries must be finite and in [0, 1]");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-9) {
    throw MalformedDistributionError("full distribution must sum to 1");
  }
  TokenDistribution d;
  d.kind_ = Kind::kFull;
  d.vocab_size_ = static_cast<std::size_t>(probs.size());
  d.probs_ = std::move(probs);
  return d;
}

TokenDistribution TokenDistribution::truncated(std::size_t vocab_size,
                                               std::vector<TopEntry> top) {
  if (top.size() > vocab_size) {
    throw MalformedDistributionError("more entries than vocabulary tokens");
  }
  for (std::size_t i = 0; i < top.size(); ++i) {
    const auto& e = top[i];
    if (e.token >= vocab_size) {
      throw MalformedDistributionError("token id outside the vocabulary");
    }
    if (!std::isfinite(e.prob) || e.prob < 0.0 || e.prob > 1.0) {
      throw MalformedDistributionError("probability outside [0, 1]");
    }
    if (i > 0 && !ranks_before(top[i - 1].prob, top[i - 1].token, e.prob, e.token)) {
      throw MalformedDistributionError(
          "top-m entries must be ordered by probability desc, token id asc");
    }
  }
  TokenDistribution d;
  d.kind_ = Kind::kTruncated;
  d.vocab_size_ = vocab_size;
  d.top_ = std::move(top);
  return d;
}

const Eigen::VectorXd& TokenDistribution::probs() const {
  if (kind_ != Kind::kFull) {
    throw std::logic_error("probs() requires a full distribution");
  }
  return probs_;
}

std::vector<TopEntry> TokenDistribution::top(std::size_t m) const {
  if (kind_ == Kind::kTruncated) {
    return {top_.begin(), top_.begin() + static_cast<std::ptrdiff_t>(
                                             std::min(m, top_.size()))};
  }
  const auto count = static_cast<Eigen::Index>(std::min(m, vocab_size_));
  const auto order = detail::rank_order<double>(probs_, count);
  std::vector<TopEntry> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    out.push_back({static_cast<TokenId>(order[i]), probs_[order[i]]});
  }
  return out;
}

TokenDistribution apply_decoding(const TokenDistribution& dist,
                                 const DecodingConfig& cfg) {
  Eigen::VectorXd probs;
  if (dist.kind() == TokenDistribution::Kind::kFull) {
    probs = dist.probs();
  } else {
    // Only the revealed entries can be decoded; everything else is treated as
    // zero mass, which is exact when the truncation covers the support.
    probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dist.vocab_size()));
    for (const auto& e : dist.top(dist.vocab_size())) probs[e.token] = e.prob;
  }
  return TokenDistribution::full(apply_decoding(probs, cfg));
}

std::size_t rank_of(const TokenDistribution& dist, TokenId token) {
  if (dist.kind() == TokenDistribution::Kind::kFull) {
    return rank_of(dist.probs(), token);
  }
  const auto top = dist.top(dist.vocab_size());
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (top[i].token == token) return i + 1;
  }
  throw std::invalid_argument("token not revealed by the truncated distribution");
}

}  // namespace inextract
