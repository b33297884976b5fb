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

#include "inextract/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace inextract {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool window_key_less(const ExtractionWindow& a, const ExtractionWindow& b) {
  return std::tie(a.seq_id, a.offset) < std::tie(b.seq_id, b.offset);
}

// Lower cost wins; ties go to the smaller (seq_id, offset).
bool better_argmin(double cost, const std::string& seq_id, std::size_t offset,
                   const AuditReport& current) {
  if (cost != current.b_min) return cost < current.b_min;
  return std::tie(seq_id, offset) <
         std::tie(current.argmin_seq_id, current.argmin_offset);
}

void record(AuditReport& report, const ExtractionWindow& w, double uniform_bits) {
  if (report.total_windows == 0 ||
      better_argmin(w.cost_bits, w.seq_id, w.offset, report)) {
    report.b_min = w.cost_bits;
    report.argmin_seq_id = w.seq_id;
    report.argmin_offset = w.offset;
  }
  ++report.total_windows;
  const std::size_t bucket =
      w.cost_bits < static_cast<double>(report.b_max)
          ? static_cast<std::size_t>(std::floor(w.cost_bits))
          : report.b_max;
  ++report.histogram[bucket];
  // Non-cumulative while scanning: bucket ceil(cost) so that cost <= b iff
  // ceil(cost) <= b; audit() prefix-sums afterwards.
  if (w.cost_bits <= static_cast<double>(report.b_max)) {
    ++report.portion_counts[static_cast<std::size_t>(std::ceil(w.cost_bits))];
  }
  if (w.cost_bits > uniform_bits) ++report.above_uniform_windows;
}

}  // namespace

double position_log_prob(const PositionRecord& pos, std::size_t m) {
  if (pos.true_rank <= m) return -std::log(static_cast<double>(pos.true_rank));
  return std::log(pos.true_prob);  // log(0) = -inf: never extractable
}

ExtractionWindow window_cost(const SequenceTrace& trace, std::size_t offset,
                             std::size_t l, std::size_t m) {
  if (l == 0) throw std::invalid_argument("window length must be >= 1");
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  if (offset < 1 || offset + l - 1 > trace.length()) {
    throw WindowRangeError("window offset=" + std::to_string(offset) +
                           " l=" + std::to_string(l) + " exceeds trace \"" +
                           trace.seq_id + "\" of length " +
                           std::to_string(trace.length()));
  }
  const bool needs_recorded_m = m > trace.m && trace.m < trace.vocab_size;
  double log_p = 0.0;
  for (std::size_t i = offset - 1; i < offset - 1 + l; ++i) {
    const PositionRecord& pos = trace.positions[i];
    if (needs_recorded_m && pos.true_rank > trace.m && pos.true_rank <= m) {
      throw InsufficientTraceError(
          "trace \"" + trace.seq_id + "\" recorded top-" + std::to_string(trace.m) +
          " but position t=" + std::to_string(pos.t) + " needs top-" +
          std::to_string(m) + " access");
    }
    log_p += position_log_prob(pos, m);
  }
  ExtractionWindow w;
  w.seq_id = trace.seq_id;
  w.offset = offset;
  w.length = l;
  w.log2_p = log_p / std::numbers::ln2;
  w.cost_bits = 0.0 - w.log2_p;
  return w;
}

double AuditReport::greedy_rate() const {
  return total_windows == 0
             ? 0.0
             : static_cast<double>(greedy_windows) / static_cast<double>(total_windows);
}

double AuditReport::extraction_portion(std::size_t b) const {
  if (b > b_max) throw std::out_of_range("extraction portion beyond b_max");
  if (total_windows == 0) return 0.0;
  return static_cast<double>(portion_counts[b]) / static_cast<double>(total_windows);
}

AuditReport audit(std::span<const SequenceTrace> traces, std::size_t l,
                  std::size_t m, const AuditOptions& options) {
  if (traces.empty()) throw EmptyProtectedSetError("no protected sequences to audit");
  if (l == 0) throw std::invalid_argument("window length must be >= 1");
  if (m == 0) throw std::invalid_argument("m must be >= 1");

  std::vector<const SequenceTrace*> ordered;
  ordered.reserve(traces.size());
  for (const auto& t : traces) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->seq_id < b->seq_id; });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->seq_id == ordered[i - 1]->seq_id) {
      throw std::invalid_argument("duplicate seq_id \"" + ordered[i]->seq_id + "\"");
    }
  }

  AuditReport report;
  report.l = l;
  report.m = m;
  report.b_max = options.b_max;
  report.b_min = kInf;
  report.histogram.assign(options.b_max + 1, 0);
  report.portion_counts.assign(options.b_max + 1, 0);

  for (const SequenceTrace* trace : ordered) {
    if (trace->length() < l) {
      throw WindowRangeError("trace \"" + trace->seq_id + "\" is shorter than l=" +
                             std::to_string(l));
    }
    const double uniform_bits =
        static_cast<double>(l) * std::log2(static_cast<double>(trace->vocab_size));
    for (std::size_t offset = 1; offset + l - 1 <= trace->length(); ++offset) {
      ExtractionWindow w = window_cost(*trace, offset, l, m);
      record(report, w, uniform_bits);
      if (options.keep_windows) report.windows.push_back(std::move(w));
    }
  }
  std::partial_sum(report.portion_counts.begin(), report.portion_counts.end(),
                   report.portion_counts.begin());
  report.greedy_windows = greedy_rate(traces, l).extractable;
  return report;
}

AuditReport merge(const AuditReport& a, const AuditReport& b) {
  if (a.l != b.l || a.m != b.m || a.b_max != b.b_max) {
    throw WindowMismatchError("cannot merge audits with different (l, m, b_max)");
  }
  if (a.total_windows == 0) return b;
  if (b.total_windows == 0) return a;
  AuditReport out = a;
  if (better_argmin(b.b_min, b.argmin_seq_id, b.argmin_offset, a)) {
    out.b_min = b.b_min;
    out.argmin_seq_id = b.argmin_seq_id;
    out.argmin_offset = b.argmin_offset;
  }
  for (std::size_t i = 0; i < out.histogram.size(); ++i) out.histogram[i] += b.histogram[i];
  for (std::size_t i = 0; i < out.portion_counts.size(); ++i) {
    out.portion_counts[i] += b.portion_counts[i];
  }
  out.total_windows += b.total_windows;
  out.greedy_windows += b.greedy_windows;
  out.above_uniform_windows += b.above_uniform_windows;
  out.windows.insert(out.windows.end(), b.windows.begin(), b.windows.end());
  std::sort(out.windows.begin(), out.windows.end(), window_key_less);
  return out;
}

std::vector<std::size_t> greedy_extractable_offsets(std::span<const std::size_t> ranks,
                                                    std::size_t l) {
  if (l == 0) throw std::invalid_argument("window length must be >= 1");
  const std::size_t length = ranks.size();
  if (length < l) throw WindowRangeError("sequence shorter than l");
  std::vector<std::size_t> offsets;
  std::size_t i = 1;
  while (i <= length - l + 1) {
    std::size_t first_failure = 0;
    for (std::size_t t = i; t <= i + l - 1; ++t) {
      if (ranks[t - 1] > 1) {
        first_failure = t;
        break;
      }
    }
    if (first_failure == 0) {
      offsets.push_back(i);
      ++i;
    } else {
      // Every window still containing first_failure fails too.
      i = first_failure + 1;
    }
  }
  return offsets;
}

GreedyRate greedy_rate(std::span<const SequenceTrace> traces, std::size_t l) {
  if (traces.empty()) throw EmptyProtectedSetError("no protected sequences to scan");
  std::vector<const SequenceTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->seq_id < b->seq_id; });
  GreedyRate result;
  std::vector<std::size_t> ranks;
  for (const SequenceTrace* trace : ordered) {
    if (trace->length() < l) {
      throw WindowRangeError("trace \"" + trace->seq_id + "\" is shorter than l=" +
                             std::to_string(l));
    }
    ranks.clear();
    for (const auto& pos : trace->positions) ranks.push_back(pos.true_rank);
    for (std::size_t offset : greedy_extractable_offsets(ranks, l)) {
      result.windows.push_back({trace->seq_id, offset});
    }
    result.total += trace->length() - l + 1;
  }
  result.extractable = result.windows.size();
  return result;
}

double min_entropy(std::span<const double> probabilities) {
  if (probabilities.empty()) {
    throw std::invalid_argument("min-entropy of an empty set is undefined");
  }
  const double best = *std::max_element(probabilities.begin(), probabilities.end());
  return 0.0 - std::log2(best);
}

double min_entropy(std::span<const ExtractionWindow> windows) {
  if (windows.empty()) {
    throw std::invalid_argument("min-entropy of an empty set is undefined");
  }
  double best = kInf;
  for (const auto& w : windows) best = std::min(best, w.cost_bits);
  return best;
}

std::vector<CostDifference> calibrated_cost(const AuditReport& target,
                                            const AuditReport& proxy) {
  if (target.l != proxy.l) {
    throw WindowMismatchError("target and proxy audits use different l (" +
                              std::to_string(target.l) + " vs " +
                              std::to_string(proxy.l) + ")");
  }
  if (target.windows.size() != proxy.windows.size()) {
    throw WindowMismatchError("target and proxy audits cover different windows");
  }
  std::vector<CostDifference> out;
  out.reserve(target.windows.size());
  for (std::size_t i = 0; i < target.windows.size(); ++i) {
    const auto& t = target.windows[i];
    const auto& p = proxy.windows[i];
    if (t.seq_id != p.seq_id || t.offset != p.offset || t.length != p.length) {
      throw WindowMismatchError("window (" + t.seq_id + ", " + std::to_string(t.offset) +
                                ") has no counterpart in the proxy audit");
    }
    // Two unextractable windows are equally costly.
    const double diff = (std::isinf(t.cost_bits) && std::isinf(p.cost_bits))
                            ? 0.0
                            : p.cost_bits - t.cost_bits;
    out.push_back({t.seq_id, t.offset, t.cost_bits, p.cost_bits, diff});
  }
  return out;
}

}  // namespace inextract
