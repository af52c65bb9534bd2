// Copyright 2026 The Persona Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "persona/errors.hpp"
#include "persona/eval.hpp"
#include "persona/lexicon.hpp"
#include "support.hpp"

using namespace persona;
using persona::testing::Gen;
using persona::testing::source_path;
using persona::testing::TempDir;

namespace {

// n outcomes: `unparseable` parse errors, then `exact` hits, then
// `near - exact` misses by one, the rest off by `far`.
std::vector<PredictionOutcome> constructed(std::size_t n, std::size_t unparseable,
                                           std::size_t exact, std::size_t near, int far = 3) {
  std::vector<PredictionOutcome> out;
  for (std::size_t i = 0; i < n; ++i) {
    PredictionOutcome o{i, {}, 5};
    if (i < unparseable) {
      o.result = {ParseError{"n/a"}};
    } else if (i < unparseable + exact) {
      o.result = {ScoreOk{5, false}};
    } else if (i < unparseable + near) {
      o.result = {ScoreOk{6, false}};
    } else {
      o.result = {ScoreOk{5 + far, false}};
    }
    out.push_back(o);
  }
  return out;
}

std::vector<PredictionOutcome> random_outcomes(Gen& gen) {
  std::vector<PredictionOutcome> out(1 + gen.index(40));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].record = i;
    out[i].target = gen.integer(0, 10);
    const double u = gen.unit();
    if (u < 0.1) {
      out[i].result = {ParseError{"?"}};
    } else if (u < 0.15) {
      out[i].result = {BackendError{"timeout"}};
    } else {
      out[i].result = {ScoreOk{gen.chance(0.3) ? out[i].target : gen.integer(0, 10), false}};
    }
  }
  return out;
}

std::filesystem::path write(const TempDir& dir, const std::string& name,
                            const std::string& content) {
  const auto p = dir.path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_SUITE("compute_metrics") {
  TEST_CASE("constructed outcome set with known rates") {
    // 109 messages, 5 unparseable; 31 exact and 76 within one of 104 parsed.
    const auto r = compute_metrics(constructed(109, 5, 31, 76));
    CHECK(r.n_total == 109);
    CHECK(r.n_parseable == 104);
    CHECK(std::abs(*r.accuracy - 0.2981) < 1e-4);
    CHECK(std::abs(*r.one_off_accuracy - 0.7308) < 1e-4);
    CHECK(std::abs(r.error_rate - 0.0459) < 1e-4);

    const auto q = compute_metrics(constructed(109, 7, 2, 30));
    CHECK(std::abs(*q.accuracy - 0.0196) < 1e-4);
    CHECK(std::abs(q.error_rate - 0.0642) < 1e-4);
  }

  TEST_CASE("mean distance over parsed predictions") {
    const auto r = compute_metrics(constructed(10, 2, 4, 6, 3));
    // 4 x 0, 2 x 1, 2 x 3 over 8 parsed
    CHECK(*r.mean_distance == doctest::Approx(8.0 / 8.0));
    CHECK(r.error_rate == doctest::Approx(0.2));
  }

  TEST_CASE("nothing parsed") {
    const auto r = compute_metrics(constructed(3, 3, 0, 0));
    CHECK_FALSE(r.accuracy.has_value());
    CHECK_FALSE(r.mean_distance.has_value());
    CHECK(r.error_rate == 1.0);
    CHECK_THROWS_AS(compute_metrics({}), ContractError);
  }

  TEST_CASE("metric invariants") {
    Gen gen(41);
    for (int n = 0; n < 10000; ++n) {
      auto outcomes = random_outcomes(gen);
      const auto r = compute_metrics(outcomes);
      if (r.n_parseable == 0) continue;
      REQUIRE(*r.accuracy <= *r.one_off_accuracy);
      REQUIRE((*r.accuracy == 1.0) == (*r.mean_distance == 0.0));

      std::vector<PredictionOutcome> shuffled = outcomes;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[gen.index(i)]);
      }
      const auto s = compute_metrics(shuffled);
      REQUIRE(s.accuracy == r.accuracy);
      REQUIRE(s.one_off_accuracy == r.one_off_accuracy);
      REQUIRE(std::abs(*s.mean_distance - *r.mean_distance) <= 1e-12);

      for (auto& o : outcomes) o.target = gen.integer(0, 10);
      REQUIRE(compute_metrics(outcomes).error_rate == r.error_rate);
    }
  }
}

TEST_SUITE("aggregate_annotations") {
  TEST_CASE("median, even counts round half away from zero") {
    CHECK(aggregate_annotations(std::vector<int>{3, 9, 4}) == 4);
    CHECK(aggregate_annotations(std::vector<int>{2, 5}) == 4);
    CHECK(aggregate_annotations(std::vector<int>{1, 2}) == 2);
    CHECK(aggregate_annotations(std::vector<int>{-2, -1}) == -2);
    CHECK(aggregate_annotations(std::vector<int>{6, 6, 1, 10}) == 6);
    CHECK(aggregate_annotations(std::vector<int>{7}) == 7);
    CHECK_THROWS_AS(aggregate_annotations(std::vector<int>{}), ContractError);
  }
}

TEST_SUITE("icc") {
  TEST_CASE("worked example") {
    const auto ratings = load_ratings(source_path("tests/fixtures/shrout_fleiss_ratings.csv"));
    REQUIRE(ratings.size() == 6);
    CHECK(std::abs(icc(ratings) - 0.2897637795) < 1e-9);
  }

  TEST_CASE("perfect agreement and degenerate matrices") {
    CHECK(icc({{1, 1, 1}, {4, 4, 4}, {9, 9, 9}}) == doctest::Approx(1.0));
    CHECK(icc({{3, 3}, {3, 3}}) == 1.0);
  }

  TEST_CASE("independent noise is near zero") {
    Gen gen(42);
    std::vector<std::vector<double>> m(200, std::vector<double>(3));
    for (auto& row : m) {
      for (auto& x : row) x = gen.integer(0, 10);
    }
    CHECK(std::abs(icc(m)) < 0.15);
  }

  TEST_CASE("invariant under shifting and scaling the whole matrix") {
    Gen gen(43);
    for (int n = 0; n < 2000; ++n) {
      const std::size_t rows = 2 + gen.index(15);
      const std::size_t cols = 2 + gen.index(5);
      std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
      for (auto& row : m) {
        const double base = gen.real(0, 10);
        for (auto& x : row) x = base + gen.real(-3, 3);
      }
      const double value = icc(m);
      REQUIRE((value >= -1.0 && value <= 1.0));
      const double shift = gen.real(-50, 50);
      const double scale = gen.real(0.1, 20);
      auto shifted = m;
      auto scaled = m;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          shifted[i][j] += shift;
          scaled[i][j] *= scale;
        }
      }
      REQUIRE(std::abs(icc(shifted) - value) <= 1e-9);
      REQUIRE(std::abs(icc(scaled) - value) <= 1e-9);
    }
  }

  TEST_CASE("shape requirements") {
    CHECK_THROWS_AS(icc({{1, 2}}), ContractError);
    CHECK_THROWS_AS(icc({{1}, {2}}), ContractError);
    CHECK_THROWS_AS(icc({{1, 2}, {3}}), ContractError);
    CHECK_THROWS_AS(icc({{1, NAN}, {3, 4}}), ContractError);
  }

  TEST_CASE("ratings files accept commas, whitespace and comments") {
    TempDir dir;
    const auto p = write(dir, "r.txt", "# header\n1, 2 3\n\n4\t5,6  # trailing\n");
    CHECK(load_ratings(p) == std::vector<std::vector<double>>{{1, 2, 3}, {4, 5, 6}});
    CHECK_THROWS_AS(load_ratings(write(dir, "bad.txt", "1 x 3\n")), ConfigError);
    CHECK_THROWS_AS(load_ratings(dir.path() / "missing.txt"), ConfigError);
  }
}

TEST_SUITE("datasets") {
  TEST_CASE("labels are shifted onto 0..10") {
    const auto records = load_dataset(source_path("tests/fixtures/eval_dataset.jsonl"));
    REQUIRE(records.size() == 20);
    CHECK(records[0].text == "No, you do it like this!");
    CHECK(records[0].labels.at("agency") == 10);
    CHECK(records[0].labels.at("communion") == 3);
    CHECK(records[2].labels.at("communion") == 0);
    CHECK(records[5].labels.at("agency") == 5);  // annotators 0, 1, -1
    CHECK(records[13].labels.count("communion") == 0);
  }

  TEST_CASE("malformed rows") {
    using nlohmann::json;
    CHECK_THROWS_AS(parse_record(json{{"text", "x"}, {"agency", 6}}), ConfigError);
    CHECK_THROWS_AS(parse_record(json{{"text", "x"}, {"agency", {0, 9}}}), ConfigError);
    CHECK_THROWS_AS(parse_record(json{{"text", "x"}}), ConfigError);
    CHECK_THROWS_AS(parse_record(json{{"agency", 1}}), ConfigError);
    CHECK(parse_record(json{{"text", "x"}, {"agency", {-5, -4}}}).labels.at("agency") == 1);

    TempDir dir;
    const auto p = write(dir, "d.jsonl", "{\"text\": \"a\", \"agency\": 1}\n{oops\n");
    try {
      load_dataset(p);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
}

TEST_SUITE("run_eval") {
  const auto kLong = PromptVariant::long_prompt;

  TEST_CASE("lexicon backend on the shipped fixture matches the pinned reports") {
    const auto records = load_dataset(source_path("tests/fixtures/eval_dataset.jsonl"));
    LexiconBackend backend(Lexicon::load(source_path("lexicons/ipc_lexicon.json")));
    for (const char* axis : {"agency", "communion"}) {
      const auto report = run_eval(records, backend, default_prompt(axis, kLong), 3);
      std::ifstream in(source_path(std::string("tests/fixtures/golden_report_lexicon_") + axis +
                                   ".json"));
      const auto golden = nlohmann::json::parse(in);
      CHECK(nlohmann::json(report) == golden);
    }
  }

  TEST_CASE("replay backend reproduces compute_metrics") {
    const auto records = load_dataset(source_path("tests/fixtures/eval_dataset.jsonl"));
    const auto replay =
        ReplayAnalyzerBackend::load(source_path("tests/fixtures/eval_replay.jsonl"));
    const auto prompt = default_prompt("communion", PromptVariant::short_prompt);

    std::vector<PredictionOutcome> expected;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto it = records[i].labels.find("communion");
      if (it == records[i].labels.end()) continue;
      expected.push_back({i, replay.score(prompt, records[i].text), it->second});
    }
    const auto direct = compute_metrics(expected);
    const auto report = run_eval(records, replay, prompt, 4);
    CHECK(report.n_total == direct.n_total);
    CHECK(report.n_parseable == direct.n_parseable);
    CHECK(report.accuracy == direct.accuracy);
    CHECK(report.one_off_accuracy == direct.one_off_accuracy);
    CHECK(report.mean_distance == direct.mean_distance);
    CHECK(report.error_rate == direct.error_rate);
    CHECK(report.backend == "replay");
    CHECK(report.prompt_variant == "short");
    CHECK(report.error_rate > 0.0);
  }

  TEST_CASE("concurrency does not change the outcome") {
    const auto records = load_dataset(source_path("tests/fixtures/eval_dataset.jsonl"));
    LexiconBackend backend(Lexicon::load(source_path("lexicons/ipc_lexicon.json")));
    const auto prompt = default_prompt("agency", kLong);
    const auto one = evaluate(records, backend, prompt, 1);
    const auto many = evaluate(records, backend, prompt, 8);
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].record == many[i].record);
      CHECK(one[i].result == many[i].result);
    }
  }

  TEST_CASE("an axis nobody labeled is an error") {
    std::vector<EvalRecord> records{{"Danke!", {{"communion", 9}}}};
    LexiconBackend backend(Lexicon::load(source_path("lexicons/ipc_lexicon.json")));
    CHECK_THROWS_AS(evaluate(records, backend, default_prompt("agency", kLong)), ConfigError);
  }

  TEST_CASE("table layout") {
    MetricsReport r;
    r.backend = "lexicon";
    r.axis = "agency";
    r.prompt_variant = "long";
    r.accuracy = 0.35;
    r.one_off_accuracy = 0.85;
    r.mean_distance = 0.8;
    MetricsReport empty = r;
    empty.accuracy.reset();
    empty.one_off_accuracy.reset();
    empty.mean_distance.reset();
    empty.error_rate = 1.0;
    const std::vector<MetricsReport> rows{r, empty};
    CHECK(metrics_table(rows) ==
          "Backend                  Axis       Prompt   Acc.  1-off   Mean  Error\n"
          "lexicon                  agency     long   0.3500 0.8500 0.8000 0.0000\n"
          "lexicon                  agency     long        -      -      - 1.0000\n");
  }
}
