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

#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "inextract/report_io.hpp"
#include "inextract/toy_lm.hpp"
#include "inextract/trace_io.hpp"
#include "test_util.hpp"

namespace inextract {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "inextract");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string value_of(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "<missing " + key + ">";
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("inextract-cli-" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& content) const {
    write_file(path(name), content);
    return path(name);
  }

 private:
  fs::path dir_;
};

const std::string kFixtures = INEXTRACT_FIXTURE_DIR;

TEST_CASE("help lists every subcommand") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  for (const char* sub : {"train-toy", "dump-traces", "audit", "greedy-rate", "compare", "convert",
                          "bounds", "simulate", "lipschitz", "baseline"}) {
    CHECK_MESSAGE(r.out.find(sub) != std::string::npos, sub);
  }
}

TEST_CASE("usage errors exit with status 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"convert", "--b", "1", "--delta", "0.01", "--bogus"}).code == 1);
  CHECK(run({"convert", "--b", "1"}).code == 1);
  CHECK(run({"convert", "--b", "1", "--delta", "2"}).code == 1);
  CHECK(run({"bounds"}).code == 1);
  CHECK(run({"audit", "--l", "3", "--traces", "/nonexistent.jsonl"}).code == 1);
}

TEST_CASE("train-toy is deterministic and rejects empty corpora") {
  Scratch s;
  std::string ab;
  for (int i = 0; i < 1000; ++i) ab += "ab";
  const auto corpus = s.write("ab.txt", ab + "\n");
  REQUIRE(run({"train-toy", "--corpus", corpus, "--out", s.path("a.json")}).code == 0);
  REQUIRE(run({"train-toy", "--corpus", corpus, "--out", s.path("b.json")}).code == 0);
  CHECK(read_file(s.path("a.json")) == read_file(s.path("b.json")));
  const ToyLm lm = ToyLm::load(s.path("a.json"));
  CHECK(rank_of(lm.next_distribution(bytes_to_tokens("a")), 'b') == 1);

  const auto empty = s.write("empty.txt", "");
  const auto r = run({"train-toy", "--corpus", empty, "--out", s.path("c.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("empty") != std::string::npos);
}

TEST_CASE("audit verdicts and exit codes") {
  Scratch s;
  const auto model = kFixtures + "/toy_model.json";
  const auto corpus = kFixtures + "/protected.txt";
  const auto violated = run({"audit", "--model", model, "--corpus", corpus, "--l", "2", "--m", "4",
                             "--b-target", "1"});
  CHECK(violated.code == 2);
  CHECK(value_of(violated.out, "b_min") == "0");
  CHECK(violated.out.find("VIOLATES (2,1)") != std::string::npos);

  const auto vacuous = run({"audit", "--model", model, "--corpus", corpus, "--l", "2", "--b-target",
                            "0"});
  CHECK(vacuous.code == 0);
  CHECK(vacuous.out.find("SATISFIES (2,0)") != std::string::npos);

  const auto with_delta = run({"audit", "--traces", kFixtures + "/golden_traces.jsonl", "--l", "6",
                               "--m", "4", "--delta", "0.01", "--M", "8", "--out", s.path("r")});
  CHECK(with_delta.code == 0);
  CHECK(value_of(with_delta.out, "untargeted_M") == "8");
  const AuditReport back = parse_audit_report(read_file(s.path("r/report.json")));
  const auto direct = audit(ingest_traces(kFixtures + "/golden_traces.jsonl"), 6, 4);
  CHECK(back.b_min == direct.b_min);
  CHECK(back.windows == direct.windows);
  CHECK(read_file(s.path("r/histogram.csv")) == histogram_csv(direct));
  CHECK(read_file(s.path("r/windows.csv")) == windows_csv(direct.windows));
}

TEST_CASE("audit report matches the golden file byte for byte") {
  Scratch s;
  const fs::path previous = fs::current_path();
  fs::current_path(kFixtures);
  const auto r = run({"audit", "--traces", "golden_traces.jsonl", "--l", "3", "--m", "4",
                      "--b-target", "1", "--out", s.path("g")});
  fs::current_path(previous);
  CHECK(r.code == 2);
  CHECK(read_file(s.path("g/report.json")) == read_file(kFixtures + "/golden_report_l3_m4.json"));
  CHECK(read_file(s.path("g/histogram.csv")) ==
        read_file(kFixtures + "/golden_histogram_l3_m4.csv"));
}

TEST_CASE("dump-traces output ingests back to the teacher-forced traces") {
  Scratch s;
  const auto model = kFixtures + "/toy_model.json";
  const auto out = s.path("t.jsonl");
  REQUIRE(run({"dump-traces", "--model", model, "--corpus", kFixtures + "/protected.txt", "--m", "4",
               "--out", out}).code == 0);
  CHECK(read_file(out) == read_file(kFixtures + "/golden_traces.jsonl"));
}

TEST_CASE("greedy-rate and compare") {
  Scratch s;
  const auto traces = kFixtures + "/golden_traces.jsonl";
  const auto g = run({"greedy-rate", "--traces", traces, "--l", "3"});
  CHECK(g.code == 0);
  const auto direct = greedy_rate(ingest_traces(traces), 3);
  CHECK(value_of(g.out, "extractable") == std::to_string(direct.extractable));
  CHECK(value_of(g.out, "total") == std::to_string(direct.total));

  const auto same = run({"compare", "--target", traces, "--proxy", traces, "--l", "3", "--m", "4"});
  CHECK(same.code == 0);
  std::istringstream rows(same.out);
  std::string line;
  std::getline(rows, line);
  CHECK(line == "seq_id,offset,target_bits,proxy_bits,diff");
  int n = 0;
  while (std::getline(rows, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "0");
    ++n;
  }
  CHECK(n == 21);

  std::string base = testing::word_corpus(100, 5);
  std::string planted = base;
  for (int i = 0; i < 25; ++i) planted += "pin 8812 ok\n";
  const auto tgt = s.write("tgt.txt", planted);
  const auto prx = s.write("prx.txt", base);
  REQUIRE(run({"train-toy", "--corpus", tgt, "--out", s.path("tgt.json")}).code == 0);
  REQUIRE(run({"train-toy", "--corpus", prx, "--out", s.path("prx.json")}).code == 0);
  const auto prot = s.write("prot.txt", "pin 8812 ok\n");
  const auto diff = run({"compare", "--target-model", s.path("tgt.json"), "--proxy-model",
                         s.path("prx.json"), "--corpus", prot, "--l", "4", "--out",
                         s.path("diff.csv")});
  CHECK(diff.code == 0);
  CHECK(value_of(diff.out, "windows") == "8");
  CHECK(value_of(diff.out, "target_more_extractable") == "8");
}

TEST_CASE("calculator subcommands") {
  const auto c = run({"convert", "--b", "1", "--delta", "0.01", "--json"});
  CHECK(c.code == 0);
  CHECK(std::stod(value_of(c.out, "n_exact")) == doctest::Approx(6.6439).epsilon(1e-4));
  CHECK(c.out.find("\"n_exact\"") != std::string::npos);

  const auto b = run({"bounds", "--b", "10", "--M", "8", "--epsilon", "1", "--p0", "0.1"});
  CHECK(b.code == 0);
  CHECK(value_of(b.out, "untargeted_union_bits") == "7");
  CHECK(std::stod(value_of(b.out, "reconstruction_bound")) == doctest::Approx(0.23197).epsilon(1e-4));
  CHECK(value_of(b.out, "de_not_reducible_to_dpd") == "true");

  const auto sup = run({"bounds", "--L0-pre", "1", "--L0-post", "1", "--c", "0.2", "--delta-b",
                        "0.6"});
  CHECK(value_of(sup.out, "suppressed") == "true");
  CHECK(value_of(sup.out, "delta_b_scale") == "length-normalized");

  const auto u = run({"baseline", "--kind", "uniform", "--l", "10", "--vocab", "256"});
  CHECK(value_of(u.out, "bits") == "80");
  const auto e = run({"baseline", "--kind", "in-context", "--model", kFixtures + "/toy_model.json",
                      "--text", ""});
  CHECK(e.code == 1);
  CHECK(run({"baseline", "--kind", "mystery"}).code == 1);
}

TEST_CASE("seeded subcommands reproduce their output") {
  Scratch s;
  const auto model = kFixtures + "/toy_model.json";
  const std::vector<std::string> sim{"simulate", "--model", model, "--corpus",
                                     kFixtures + "/protected.txt", "--l", "3", "--offset", "2",
                                     "--n", "1,5", "--batches", "300", "--seed", "7", "--out",
                                     s.path("sim")};
  const auto a = run(sim);
  const std::string json_a = read_file(s.path("sim/simulate.json"));
  const auto b = run(sim);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json_a == read_file(s.path("sim/simulate.json")));
  CHECK(std::stod(value_of(a.out, "adaptive_best_p")) <= std::stod(value_of(a.out, "ceiling")) + 1e-9);
  CHECK(read_file(s.path("sim/rate_curve.csv")).rfind("n,batches,hits,", 0) == 0);

  const auto traces_only = run({"simulate", "--traces", kFixtures + "/golden_traces.jsonl", "--l",
                                "2"});
  CHECK(traces_only.code == 1);  // m = 4 traces carry no full distributions

  const std::vector<std::string> lip{"lipschitz", "--model", model, "--center", "the cat",
                                     "--c", "0.3", "--K", "50", "--seed", "4", "--out",
                                     s.path("lip")};
  const auto l1 = run(lip);
  const auto l2 = run(lip);
  CHECK(l1.code == 0);
  CHECK(l1.out == l2.out);
  CHECK(std::stod(value_of(l1.out, "L0")) >= 0.0);
}

}  // namespace
}  // namespace inextract
