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

#include "persona/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "persona/errors.hpp"
#include "persona/text.hpp"

namespace persona {

namespace {

// Dataset files use -5..5; the engine works on 0..10.
constexpr int kLabelShift = 5;
constexpr ScoreRange kRawLabelRange{-5, 5};

int shifted_label(const std::string& axis, const nlohmann::json& value) {
  int raw = 0;
  if (value.is_array()) {
    std::vector<int> ratings = value.get<std::vector<int>>();
    for (int r : ratings) {
      if (r < kRawLabelRange.min || r > kRawLabelRange.max) {
        throw ConfigError("rating " + std::to_string(r) + " for " + axis +
                          " outside -5..5");
      }
    }
    // Aggregate on the canonical scale so rounding is not sign-dependent.
    for (int& r : ratings) r += kLabelShift;
    return aggregate_annotations(ratings);
  }
  raw = value.get<int>();
  if (raw < kRawLabelRange.min || raw > kRawLabelRange.max) {
    throw ConfigError("label " + std::to_string(raw) + " for " + axis +
                      " outside -5..5");
  }
  return raw + kLabelShift;
}

}  // namespace

EvalRecord parse_record(const nlohmann::json& row) {
  EvalRecord record;
  try {
    record.text = row.at("text").get<std::string>();
    for (const auto& [key, value] : row.items()) {
      if (key == "text" || value.is_null()) continue;
      record.labels[key] = shifted_label(key, value);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
  if (record.labels.empty()) {
    throw ConfigError("record without any label: " + record.text.substr(0, 60));
  }
  return record;
}

std::vector<EvalRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      records.push_back(parse_record(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

MetricsReport compute_metrics(std::span<const PredictionOutcome> outcomes) {
  if (outcomes.empty()) throw ContractError("no outcomes to evaluate");

  MetricsReport report;
  report.n_total = outcomes.size();
  std::size_t exact = 0;
  std::size_t within_one = 0;
  long long distance = 0;
  for (const auto& o : outcomes) {
    if (!o.result.ok()) continue;
    ++report.n_parseable;
    const int d = std::abs(o.result.score() - o.target);
    distance += d;
    if (d == 0) ++exact;
    if (d <= 1) ++within_one;
  }
  const auto n = static_cast<double>(report.n_parseable);
  report.error_rate = static_cast<double>(report.n_total - report.n_parseable) /
                      static_cast<double>(report.n_total);
  if (report.n_parseable > 0) {
    report.accuracy = static_cast<double>(exact) / n;
    report.one_off_accuracy = static_cast<double>(within_one) / n;
    report.mean_distance = static_cast<double>(distance) / n;
  }
  return report;
}

int aggregate_annotations(std::span<const int> ratings) {
  if (ratings.empty()) throw ContractError("no ratings to aggregate");
  std::vector<int> sorted(ratings.begin(), ratings.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  const double median = (sorted[mid - 1] + sorted[mid]) / 2.0;
  return static_cast<int>(std::round(median));
}

double icc(const std::vector<std::vector<double>>& ratings) {
  const std::size_t n = ratings.size();
  if (n < 2) throw ContractError("ICC needs at least 2 messages");
  const std::size_t k = ratings.front().size();
  if (k < 2) throw ContractError("ICC needs at least 2 raters");
  for (const auto& row : ratings) {
    if (row.size() != k) throw ContractError("ratings matrix is not rectangular");
    for (double x : row) {
      if (!std::isfinite(x)) throw ContractError("ratings must be finite");
    }
  }

  std::vector<double> row_mean(n, 0.0);
  std::vector<double> col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
      grand += ratings[i][j];
    }
  }
  for (auto& m : row_mean) m /= static_cast<double>(k);
  for (auto& m : col_mean) m /= static_cast<double>(n);
  grand /= static_cast<double>(n * k);

  double ss_rows = 0.0;
  double ss_cols = 0.0;
  double ss_error = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
  }
  for (std::size_t j = 0; j < k; ++j) {
    ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double r = ratings[i][j] - row_mean[i] - col_mean[j] + grand;
      ss_error += r * r;
    }
  }
  ss_rows *= static_cast<double>(k);
  ss_cols *= static_cast<double>(n);

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double ms_rows = ss_rows / (nd - 1.0);
  const double ms_cols = ss_cols / (kd - 1.0);
  const double ms_error = ss_error / ((nd - 1.0) * (kd - 1.0));

  const double scale = std::max({ms_rows, ms_cols, ms_error});
  if (scale == 0.0) return 1.0;

  const double numerator = ms_rows - ms_error;
  const double denominator =
      ms_rows + (kd - 1.0) * ms_error + kd * (ms_cols - ms_error) / nd;
  if (std::abs(denominator) <= 1e-15 * scale) return numerator >= 0.0 ? 1.0 : -1.0;
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

std::vector<std::vector<double>> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ratings file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw ConfigError("not a number in ratings file: '" + token + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PredictionOutcome> evaluate(std::span<const EvalRecord> records,
                                        const AnalyzerBackend& backend,
                                        const ScorePrompt& prompt,
                                        std::size_t concurrency) {
  std::vector<PredictionOutcome> outcomes;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto it = records[i].labels.find(prompt.axis);
    if (it != records[i].labels.end()) outcomes.push_back({i, {}, it->second});
  }
  if (outcomes.empty()) {
    throw ConfigError("no record is labeled for axis '" + prompt.axis + "'");
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < outcomes.size(); i = next++) {
      const auto& text = records[outcomes[i].record].text;
      try {
        outcomes[i].result = score_message(backend, prompt, text);
      } catch (const std::exception& e) {
        outcomes[i].result = {BackendError{e.what()}};
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(concurrency, 1, outcomes.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return outcomes;
}

MetricsReport run_eval(std::span<const EvalRecord> records,
                       const AnalyzerBackend& backend, const ScorePrompt& prompt,
                       std::size_t concurrency) {
  const auto outcomes = evaluate(records, backend, prompt, concurrency);
  auto report = compute_metrics(outcomes);
  report.axis = prompt.axis;
  report.backend = backend.info().name;
  report.prompt_variant = std::string(to_string(prompt.variant));
  return report;
}

void to_json(nlohmann::json& j, const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{{"axis", r.axis},
                     {"backend", r.backend},
                     {"prompt_variant", r.prompt_variant},
                     {"n_total", r.n_total},
                     {"n_parseable", r.n_parseable},
                     {"accuracy", opt(r.accuracy)},
                     {"one_off_accuracy", opt(r.one_off_accuracy)},
                     {"mean_distance", opt(r.mean_distance)},
                     {"error_rate", r.error_rate}};
}

std::string metrics_table(std::span<const MetricsReport> reports) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("     -");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%6.4f", *v);
    return std::string(buf);
  };
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-24s %-10s %-6s %6s %6s %6s %6s\n", "Backend",
                "Axis", "Prompt", "Acc.", "1-off", "Mean", "Error");
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-24s %-10s %-6s %s %s %s %s\n",
                  r.backend.c_str(), r.axis.c_str(), r.prompt_variant.c_str(),
                  cell(r.accuracy).c_str(), cell(r.one_off_accuracy).c_str(),
                  cell(r.mean_distance).c_str(), cell(r.error_rate).c_str());
    out += line;
  }
  return out;
}

}  // namespace persona
