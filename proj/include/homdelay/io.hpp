// Copyright 2026 The homdelay Authors
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

#pragma once

// File formats: detection records (CSV or JSON lines), Fisher curves (CSV),
// and JSON for estimates, sweep configs and reports.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "homdelay/estimators.hpp"
#include "homdelay/fisher.hpp"
#include "homdelay/harness.hpp"
#include "homdelay/model.hpp"

namespace homdelay {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kRecordsCsvHeader = "delta,dOmega_radps,W_radps,bin";
inline constexpr std::string_view kFisherCsvHeader =
    "delta_t_ps,fisher_ps^-2,method,eta,epsilon_radps";

/// Shortest text that parses back to the same double.
std::string format_double(double value);

enum class RecordFormat { csv, jsonl };

/// ".jsonl" / ".json" select JSON lines, anything else CSV.
RecordFormat record_format_for(const std::filesystem::path& path);

void write_records(std::ostream& out, RecordSpan records, RecordFormat format);
/// Throws ConfigError with the offending line number on malformed input.
std::vector<DetectionRecord> read_records(std::istream& in, RecordFormat format);
std::vector<DetectionRecord> load_records(const std::filesystem::path& path);

void write_fisher_csv(std::ostream& out, const FisherCurve& curve);

/// One value per line; blank lines and '#' comments are skipped.
std::vector<double> read_series(std::istream& in);

Json to_json(const EstimateResult& result);
Json to_json(const FisherCurve& curve);
Json to_json(const SweepConfig& config);
Json to_json(const SweepReport& report);
Json to_json(const MicroShiftReport& report);
Json to_json(const std::vector<AllanPoint>& points);

/// Keys: delays_ps, repeats, samples, estimators, sigma_ghz | tau_ps, eta,
/// gamma, omega0_thz, eta_table [[delay_ps, eta], ...], epsilon_ghz |
/// epsilon_radps, n_max, t_max_ps, seed, report_path. Unknown keys are errors.
SweepConfig sweep_config_from_json(const Json& j);

/// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

/// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

Json load_json(const std::filesystem::path& path);

}  // namespace homdelay
