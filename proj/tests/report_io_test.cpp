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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "inextract/errors.hpp"
#include "inextract/language_model.hpp"
#include "inextract/trace.hpp"
#include "test_util.hpp"

namespace inextract {
namespace {

TEST_CASE("real formatting round-trips") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(format_real(inf) == "inf");
  CHECK(format_real(-inf) == "-inf");
  CHECK(format_real(80.0) == "80");
  CHECK(format_real(0.1) == "0.1");
  for (double x : {1.0 / 3, 4.321928094887362, 1e-300, 123456789.123}) {
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(real_from_json(nlohmann::json("inf")) == inf);
  CHECK(real_from_json(nlohmann::json("-inf")) == -inf);
  CHECK(real_from_json(nlohmann::json(2.5)) == 2.5);
  CHECK_THROWS_AS(real_from_json(nlohmann::json("nan")), Error);
}

TEST_CASE("audit reports round-trip through JSON") {
  const ToyLm lm = testing::word_model();
  auto traces = testing::sample_traces(lm, 3, 15, 3, 4);
  Eigen::VectorXd dead(4);
  dead << 0.5, 0.5, 0.0, 0.0;  // token 3 can never be produced
  const ScheduleModel schedule({dead});
  const std::vector<TokenId> blocked{0, 3, 1, 1, 0, 1};
  traces.push_back(teacher_forced_trace(schedule, blocked, 4, "zz"));
  const auto report = audit(traces, 5, 1, {32, true});
  const std::string doc = emit_audit_report(report, {{"seed", 3}});
  CHECK(doc == emit_audit_report(report, {{"seed", 3}}));
  CHECK(doc.find("\"inf\"") != std::string::npos);
  CHECK(doc.find("timestamp") == std::string::npos);

  const AuditReport back = parse_audit_report(doc);
  CHECK(back.l == report.l);
  CHECK(back.m == report.m);
  CHECK(back.b_max == report.b_max);
  CHECK(back.b_min == report.b_min);
  CHECK(back.argmin_seq_id == report.argmin_seq_id);
  CHECK(back.argmin_offset == report.argmin_offset);
  CHECK(back.histogram == report.histogram);
  CHECK(back.portion_counts == report.portion_counts);
  CHECK(back.total_windows == report.total_windows);
  CHECK(back.greedy_windows == report.greedy_windows);
  CHECK(back.above_uniform_windows == report.above_uniform_windows);
  CHECK(back.windows == report.windows);
  CHECK(emit_audit_report(back, {{"seed", 3}}) == doc);

  CHECK_THROWS_AS(parse_audit_report("{"), Error);
  std::string wrong = doc;
  wrong.replace(wrong.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
  CHECK_THROWS_AS(parse_audit_report(wrong), Error);
}

TEST_CASE("CSV tables") {
  AuditReport r;
  r.b_max = 2;
  r.histogram = {3, 0, 1};
  CHECK(histogram_csv(r) == "bucket_low,bucket_high,count\n0,1,3\n1,2,0\n2,inf,1\n");

  const std::vector<ExtractionWindow> w{{"a,b", 2, 3, -1.5, 1.5}};
  CHECK(windows_csv(w) == "seq_id,offset,length,log2_p,cost_bits\n\"a,b\",2,3,-1.5,1.5\n");
  const std::vector<CostDifference> d{{"s", 1, 2.0, 5.0, 3.0}};
  CHECK(differences_csv(d) == "seq_id,offset,target_bits,proxy_bits,diff\ns,1,2,5,3\n");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("plain") == "plain");
}

}  // namespace
}  // namespace inextract
