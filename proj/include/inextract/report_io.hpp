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

// Serialization of audit results: the JSON report, plot-ready CSV tables,
// and the shortest round-trip formatting used for every real number.

#ifndef INEXTRACT_REPORT_IO_HPP_
#define INEXTRACT_REPORT_IO_HPP_

#include <json.hpp>
#include <span>
#include <string>
#include <string_view>

#include "inextract/estimator.hpp"

namespace inextract {

// Shortest decimal that parses back to the same double; infinities become
// "inf" / "-inf".
std::string format_real(double value);

// Number, or the "inf" / "-inf" string sentinel for infinities.
nlohmann::ordered_json real_to_json(double value);
double real_from_json(const nlohmann::json& value);

// Report document. `parameters` is merged after l, m and b_max so callers can
// echo their own flags. No timestamps: equal inputs give equal bytes.
nlohmann::ordered_json audit_report_to_json(const AuditReport& report,
                                            const nlohmann::ordered_json& parameters = {});
std::string emit_audit_report(const AuditReport& report,
                              const nlohmann::ordered_json& parameters = {});
// Throws Error on malformed documents or an unsupported schema_version.
AuditReport parse_audit_report(std::string_view json);

// bucket_low,bucket_high,count; the last row is [b_max, inf).
std::string histogram_csv(const AuditReport& report);
// seq_id,offset,length,log2_p,cost_bits
std::string windows_csv(std::span<const ExtractionWindow> windows);
// seq_id,offset,target_bits,proxy_bits,diff
std::string differences_csv(std::span<const CostDifference> diffs);

// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(std::string_view field);

void write_file(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

}  // namespace inextract

#endif  // INEXTRACT_REPORT_IO_HPP_
