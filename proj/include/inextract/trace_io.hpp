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

// JSON-lines trace files: one sequence per line with exactly the fields
// seq_id, vocab_size, m, tokens, positions; each position carries exactly
// t, true_rank, true_prob, topm. Probabilities use shortest round-trip
// formatting, so emit -> ingest -> emit is byte-stable.

#ifndef INEXTRACT_TRACE_IO_HPP_
#define INEXTRACT_TRACE_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "inextract/trace.hpp"

namespace inextract {

// Canonical single-line encoding, without the trailing newline.
std::string emit_trace_line(const SequenceTrace& trace);
std::string emit_traces(const std::vector<SequenceTrace>& traces);
void write_traces(const std::string& path, const std::vector<SequenceTrace>& traces);

// Parses and validates. Blank lines are skipped.
SequenceTrace parse_trace_line(std::string_view line);
std::vector<SequenceTrace> parse_traces(std::string_view content);
std::vector<SequenceTrace> ingest_traces(const std::string& path);

}  // namespace inextract

#endif  // INEXTRACT_TRACE_IO_HPP_
