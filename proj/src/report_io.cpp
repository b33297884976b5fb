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

#include "inextract/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "inextract/errors.hpp"
#include "inextract/version.hpp"

namespace inextract {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ordered_json real_to_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double real_from_json(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error("expected a number or an \"inf\" sentinel, got " + value.dump());
}

ordered_json audit_report_to_json(const AuditReport& report,
                                  const ordered_json& parameters) {
  ordered_json doc;
  doc["tool"] = kToolName;
  doc["tool_version"] = kToolVersion;
  doc["schema_version"] = kSchemaVersion;
  ordered_json params;
  params["l"] = report.l;
  params["m"] = report.m;
  params["b_max"] = report.b_max;
  if (parameters.is_object()) {
    for (const auto& [key, value] : parameters.items()) params[key] = value;
  }
  doc["parameters"] = std::move(params);
  doc["b_min"] = real_to_json(report.b_min);
  doc["argmin"] = {{"seq_id", report.argmin_seq_id}, {"offset", report.argmin_offset}};
  doc["total_windows"] = report.total_windows;
  doc["greedy_windows"] = report.greedy_windows;
  doc["greedy_rate"] = report.greedy_rate();
  doc["above_uniform_windows"] = report.above_uniform_windows;
  doc["histogram"] = report.histogram;
  doc["portion_counts"] = report.portion_counts;
  auto windows = ordered_json::array();
  for (const auto& w : report.windows) {
    windows.push_back({{"seq_id", w.seq_id},
                       {"offset", w.offset},
                       {"length", w.length},
                       {"log2_p", real_to_json(w.log2_p)},
                       {"cost_bits", real_to_json(w.cost_bits)}});
  }
  doc["windows"] = std::move(windows);
  return doc;
}

std::string emit_audit_report(const AuditReport& report, const ordered_json& parameters) {
  return audit_report_to_json(report, parameters).dump(2) + "\n";
}

AuditReport parse_audit_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("audit report is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error("unsupported audit report schema_version " +
                  doc.at("schema_version").dump());
    }
    AuditReport r;
    const json& params = doc.at("parameters");
    r.l = params.at("l").get<std::size_t>();
    r.m = params.at("m").get<std::size_t>();
    r.b_max = params.at("b_max").get<std::size_t>();
    r.b_min = real_from_json(doc.at("b_min"));
    r.argmin_seq_id = doc.at("argmin").at("seq_id").get<std::string>();
    r.argmin_offset = doc.at("argmin").at("offset").get<std::size_t>();
    r.total_windows = doc.at("total_windows").get<std::uint64_t>();
    r.greedy_windows = doc.at("greedy_windows").get<std::uint64_t>();
    r.above_uniform_windows = doc.at("above_uniform_windows").get<std::uint64_t>();
    r.histogram = doc.at("histogram").get<std::vector<std::uint64_t>>();
    r.portion_counts = doc.at("portion_counts").get<std::vector<std::uint64_t>>();
    if (r.histogram.size() != r.b_max + 1 || r.portion_counts.size() != r.b_max + 1) {
      throw Error("histogram length does not match b_max");
    }
    for (const json& w : doc.at("windows")) {
      ExtractionWindow win;
      win.seq_id = w.at("seq_id").get<std::string>();
      win.offset = w.at("offset").get<std::size_t>();
      win.length = w.at("length").get<std::size_t>();
      win.log2_p = real_from_json(w.at("log2_p"));
      win.cost_bits = real_from_json(w.at("cost_bits"));
      r.windows.push_back(std::move(win));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed audit report: ") + e.what());
  }
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string histogram_csv(const AuditReport& report) {
  std::ostringstream os;
  os << "bucket_low,bucket_high,count\n";
  for (std::size_t j = 0; j < report.histogram.size(); ++j) {
    const bool overflow = j + 1 == report.histogram.size();
    os << j << ',' << (overflow ? std::string("inf") : std::to_string(j + 1)) << ','
       << report.histogram[j] << '\n';
  }
  return os.str();
}

std::string windows_csv(std::span<const ExtractionWindow> windows) {
  std::ostringstream os;
  os << "seq_id,offset,length,log2_p,cost_bits\n";
  for (const auto& w : windows) {
    os << csv_field(w.seq_id) << ',' << w.offset << ',' << w.length << ','
       << format_real(w.log2_p) << ',' << format_real(w.cost_bits) << '\n';
  }
  return os.str();
}

std::string differences_csv(std::span<const CostDifference> diffs) {
  std::ostringstream os;
  os << "seq_id,offset,target_bits,proxy_bits,diff\n";
  for (const auto& d : diffs) {
    os << csv_field(d.seq_id) << ',' << d.offset << ',' << format_real(d.target_bits) << ','
       << format_real(d.proxy_bits) << ',' << format_real(d.diff) << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace inextract
