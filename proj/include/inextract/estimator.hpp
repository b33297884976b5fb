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

// Rank-aware extraction cost over sliding l-gram windows, the single-pass
// greedy extractable rate, and dataset-level (l, b) audit reports.
//
// Per-position single-trial bound: p_t = 1/r_t when the true token's rank is
// within the revealed top-m, else its exact probability P_t(z_t). Window
// bounds multiply, so accumulation happens in natural-log space and is
// converted to bits at the boundary.

#ifndef INEXTRACT_ESTIMATOR_HPP_
#define INEXTRACT_ESTIMATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inextract/trace.hpp"

namespace inextract {

struct ExtractionWindow {
  std::string seq_id;
  std::size_t offset = 0;  // 1-based start
  std::size_t length = 0;
  double log2_p = 0.0;     // <= 0, -inf when some position has zero probability
  double cost_bits = 0.0;  // -log2_p, +inf for unextractable windows

  friend bool operator==(const ExtractionWindow&, const ExtractionWindow&) = default;
};

// Natural-log single-trial bound for one position under top-m access.
double position_log_prob(const PositionRecord& pos, std::size_t m);

// Throws WindowRangeError when the window leaves the trace and
// InsufficientTraceError when m exceeds what a non-full trace recorded for a
// rank the window depends on.
ExtractionWindow window_cost(const SequenceTrace& trace, std::size_t offset,
                             std::size_t l, std::size_t m);

struct AuditOptions {
  std::size_t b_max = 256;  // histogram cap; [b_max, inf] is the overflow bucket
  bool keep_windows = true;
};

struct AuditReport {
  std::size_t l = 0;
  std::size_t m = 0;
  std::size_t b_max = 256;
  double b_min = 0.0;
  std::string argmin_seq_id;
  std::size_t argmin_offset = 0;
  // Integer-bit buckets [j, j+1) for j < b_max, then the overflow bucket.
  std::vector<std::uint64_t> histogram;
  // portion_counts[b] = number of windows with cost_bits <= b, b = 0..b_max.
  std::vector<std::uint64_t> portion_counts;
  std::uint64_t total_windows = 0;
  std::uint64_t greedy_windows = 0;
  // Windows costing more than the uniform blind baseline l*log2|V|.
  std::uint64_t above_uniform_windows = 0;
  std::vector<ExtractionWindow> windows;  // sorted by (seq_id, offset)

  double greedy_rate() const;
  // Fraction of windows with cost_bits <= b.
  double extraction_portion(std::size_t b) const;
  // An oracle satisfies (l, b)-inextractability on the audited traces iff
  // b <= b_min.
  bool satisfies(double b) const { return b <= b_min; }
};

// Scans all L-l+1 offsets of every trace. Throws EmptyProtectedSetError for an
// empty dataset and WindowRangeError if a trace is shorter than l.
AuditReport audit(std::span<const SequenceTrace> traces, std::size_t l,
                  std::size_t m, const AuditOptions& options = {});

// Combines audits of disjoint sequence partitions; associative and
// order-independent.
AuditReport merge(const AuditReport& a, const AuditReport& b);

struct GreedyWindow {
  std::string seq_id;
  std::size_t offset = 0;

  friend bool operator==(const GreedyWindow&, const GreedyWindow&) = default;
};

struct GreedyRate {
  std::uint64_t extractable = 0;  // c_ext
  std::uint64_t total = 0;        // c_tot
  std::vector<GreedyWindow> windows;

  double rate() const {
    return total == 0 ? 0.0 : static_cast<double>(extractable) / static_cast<double>(total);
  }
};

// 1-based offsets of every l-window whose ranks are all 1, found with the
// first-failure skip pointer. Requires ranks.size() >= l >= 1.
std::vector<std::size_t> greedy_extractable_offsets(std::span<const std::size_t> ranks,
                                                    std::size_t l);

GreedyRate greedy_rate(std::span<const SequenceTrace> traces, std::size_t l);

// -log2 of the largest single-trial probability. Throws std::invalid_argument
// on an empty set.
double min_entropy(std::span<const double> probabilities);
double min_entropy(std::span<const ExtractionWindow> windows);

struct CostDifference {
  std::string seq_id;
  std::size_t offset = 0;
  double target_bits = 0.0;
  double proxy_bits = 0.0;
  double diff = 0.0;  // proxy - target; > 0 means the target is more extractable
};

// Throws WindowMismatchError unless both reports hold the same windows.
std::vector<CostDifference> calibrated_cost(const AuditReport& target,
                                            const AuditReport& proxy);

}  // namespace inextract

#endif  // INEXTRACT_ESTIMATOR_HPP_
