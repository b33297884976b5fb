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

#include "inextract/trace_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace inextract {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<const char*, 5> kTraceFields = {"seq_id", "vocab_size", "m",
                                                     "tokens", "positions"};
constexpr std::array<const char*, 4> kPositionFields = {"t", "true_rank",
                                                        "true_prob", "topm"};

template <std::size_t N>
void require_exact_fields(const json& obj, const std::array<const char*, N>& fields,
                          const std::string& where) {
  if (!obj.is_object()) throw TraceFormatError(where + ": expected a JSON object");
  for (const char* f : fields) {
    if (!obj.contains(f)) {
      throw TraceFormatError(where + ": missing field \"" + f + "\"");
    }
  }
  if (obj.size() != N) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find_if(fields.begin(), fields.end(),
                       [&](const char* f) { return key == f; }) == fields.end()) {
        throw TraceFormatError(where + ": unexpected field \"" + key + "\"");
      }
    }
  }
}

std::size_t as_count(const json& v, const std::string& where, const char* name) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw TraceFormatError(where + ": \"" + name + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double as_prob(const json& v, const std::string& where, const char* name) {
  if (!v.is_number()) {
    throw TraceFormatError(where + ": \"" + name + "\" must be a number");
  }
  return v.get<double>();
}

}  // namespace

std::string emit_trace_line(const SequenceTrace& trace) {
  ordered_json doc;
  doc["seq_id"] = trace.seq_id;
  doc["vocab_size"] = trace.vocab_size;
  doc["m"] = trace.m;
  doc["tokens"] = trace.tokens;
  auto positions = ordered_json::array();
  for (const auto& pos : trace.positions) {
    ordered_json p;
    p["t"] = pos.t;
    p["true_rank"] = pos.true_rank;
    p["true_prob"] = pos.true_prob;
    auto topm = ordered_json::array();
    for (const auto& e : pos.topm) topm.push_back({e.token, e.prob});
    p["topm"] = std::move(topm);
    positions.push_back(std::move(p));
  }
  doc["positions"] = std::move(positions);
  return doc.dump();
}

std::string emit_traces(const std::vector<SequenceTrace>& traces) {
  std::string out;
  for (const auto& trace : traces) {
    out += emit_trace_line(trace);
    out += '\n';
  }
  return out;
}

void write_traces(const std::string& path, const std::vector<SequenceTrace>& traces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << emit_traces(traces);
  if (!out) throw Error("failed writing " + path);
}

SequenceTrace parse_trace_line(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("trace line is not valid JSON: ") + e.what());
  }
  require_exact_fields(doc, kTraceFields, "trace");
  if (!doc["seq_id"].is_string()) {
    throw TraceFormatError("trace: \"seq_id\" must be a string");
  }

  SequenceTrace trace;
  trace.seq_id = doc["seq_id"].get<std::string>();
  const std::string where = "trace seq_id=\"" + trace.seq_id + "\"";
  trace.vocab_size = as_count(doc["vocab_size"], where, "vocab_size");
  trace.m = as_count(doc["m"], where, "m");

  const json& tokens = doc["tokens"];
  if (!tokens.is_array()) throw TraceFormatError(where + ": \"tokens\" must be an array");
  for (const auto& tok : tokens) {
    trace.tokens.push_back(static_cast<TokenId>(as_count(tok, where, "tokens[]")));
  }

  const json& positions = doc["positions"];
  if (!positions.is_array()) {
    throw TraceFormatError(where + ": \"positions\" must be an array");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::string pwhere = where + " position index " + std::to_string(i);
    const json& p = positions[i];
    require_exact_fields(p, kPositionFields, pwhere);
    PositionRecord pos;
    pos.t = as_count(p["t"], pwhere, "t");
    pos.true_rank = as_count(p["true_rank"], pwhere, "true_rank");
    pos.true_prob = as_prob(p["true_prob"], pwhere, "true_prob");
    pos.true_token = i < trace.tokens.size() ? trace.tokens[i] : 0;
    const json& topm = p["topm"];
    if (!topm.is_array()) throw TraceFormatError(pwhere + ": \"topm\" must be an array");
    for (const auto& pair : topm) {
      if (!pair.is_array() || pair.size() != 2) {
        throw TraceFormatError(pwhere + ": topm entries must be [token_id, prob]");
      }
      pos.topm.push_back({static_cast<TokenId>(as_count(pair[0], pwhere, "topm token")),
                          as_prob(pair[1], pwhere, "topm prob")});
    }
    trace.positions.push_back(std::move(pos));
  }
  validate_trace(trace);
  return trace;
}

std::vector<SequenceTrace> parse_traces(std::string_view content) {
  std::vector<SequenceTrace> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const std::string_view line = content.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse_trace_line(line));
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SequenceTrace> ingest_traces(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_traces(buf.str());
}

}  // namespace inextract
