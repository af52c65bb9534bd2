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

// Analyzer evaluation: labeled datasets, agreement metrics, annotator
// aggregation and inter-rater reliability.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "persona/analyzer.hpp"

namespace persona {

/// Labels are on the canonical [0, 10] scale.
struct EvalRecord {
  std::string text;
  std::map<std::string, int, std::less<>> labels;
};

/// JSON lines {"text": ..., "agency": int|[int...]|null, "communion": ...}.
/// Labels are on the -5..5 scale and shifted by +5 at load; a list holds
/// individual annotator ratings and is reduced with aggregate_annotations.
std::vector<EvalRecord> load_dataset(const std::filesystem::path& path);
EvalRecord parse_record(const nlohmann::json& row);

struct PredictionOutcome {
  std::size_t record = 0;
  ScoreResult result;
  int target = 0;
};

struct MetricsReport {
  std::size_t n_total = 0;
  std::size_t n_parseable = 0;
  // Over parseable predictions; empty when nothing parsed.
  std::optional<double> accuracy;
  std::optional<double> one_off_accuracy;
  std::optional<double> mean_distance;
  // Over all predictions.
  double error_rate = 0.0;

  std::string axis;
  std::string backend;
  std::string prompt_variant;
};

/// Throws ContractError on an empty outcome list.
MetricsReport compute_metrics(std::span<const PredictionOutcome> outcomes);

/// Median of the ratings; an even count averages the two middle ratings and
/// rounds half away from zero. Throws ContractError when empty.
int aggregate_annotations(std::span<const int> ratings);

/// ICC(2,1): two-way random effects, absolute agreement, single rater.
/// `ratings[i][j]` is rater j's rating of message i. Requires a complete
/// matrix with >= 2 messages and >= 2 raters (ContractError otherwise).
/// A matrix without any variance is defined to have ICC 1. The result is
/// clamped into [-1, 1].
double icc(const std::vector<std::vector<double>>& ratings);

/// Whitespace- or comma-separated numbers, one message per line; '#' starts
/// a comment.
std::vector<std::vector<double>> load_ratings(const std::filesystem::path& path);

/// Scores every record labeled for prompt.axis with at most `concurrency`
/// calls in flight. Throws ConfigError when no record carries that label.
std::vector<PredictionOutcome> evaluate(std::span<const EvalRecord> records,
                                        const AnalyzerBackend& backend,
                                        const ScorePrompt& prompt,
                                        std::size_t concurrency = 1);

MetricsReport run_eval(std::span<const EvalRecord> records,
                       const AnalyzerBackend& backend, const ScorePrompt& prompt,
                       std::size_t concurrency = 1);

void to_json(nlohmann::json& j, const MetricsReport& report);

/// Acc. / 1-off / Mean / Error table, one row per report.
std::string metrics_table(std::span<const MetricsReport> reports);

}  // namespace persona
