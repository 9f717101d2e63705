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

#include "homdelay/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <system_error>

#include "homdelay/errors.hpp"
#include "homdelay/units.hpp"

namespace homdelay {

using namespace units;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::size_t line_no) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse number '" << text << "'";
    throw ConfigError(msg.str());
  }
  return v;
}

Outcome parse_outcome(double v, std::size_t line_no) {
  if (v == 1.0) return Outcome::bunching;
  if (v == -1.0) return Outcome::coincidence;
  std::ostringstream msg;
  msg << "line " << line_no << ": delta must be +1 or -1, got " << v;
  throw ConfigError(msg.str());
}

std::uint32_t parse_bin(double v, std::size_t line_no) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 4294967295.0) {
    std::ostringstream msg;
    msg << "line " << line_no << ": bin must be a non-negative integer";
    throw ConfigError(msg.str());
  }
  return static_cast<std::uint32_t>(v);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw NumericalError("cannot format number");
  return std::string(buf, end);
}

RecordFormat record_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? RecordFormat::jsonl : RecordFormat::csv;
}

void write_records(std::ostream& out, RecordSpan records, RecordFormat format) {
  if (format == RecordFormat::csv) {
    out << kRecordsCsvHeader << '\n';
    for (const auto& r : records) {
      out << (r.delta == Outcome::bunching ? "+1" : "-1") << ',' << format_double(r.d_omega) << ',';
      if (r.mean_freq) out << format_double(*r.mean_freq);
      out << ',';
      if (r.bin_index) out << *r.bin_index;
      out << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    Json j;
    j["delta"] = sign(r.delta);
    j["dOmega_radps"] = r.d_omega;
    if (r.mean_freq) j["W_radps"] = *r.mean_freq;
    if (r.bin_index) j["bin"] = *r.bin_index;
    out << j.dump() << '\n';
  }
}

std::vector<DetectionRecord> read_records(std::istream& in, RecordFormat format) {
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (format == RecordFormat::csv) {
    if (!std::getline(in, line) || trim(line) != kRecordsCsvHeader)
      throw ConfigError("records CSV must start with header '" + std::string(kRecordsCsvHeader) + "'");
    ++line_no;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split(trim(line), ',');
      if (fields.size() != 4) {
        std::ostringstream msg;
        msg << "line " << line_no << ": expected 4 fields, got " << fields.size();
        throw ConfigError(msg.str());
      }
      DetectionRecord r;
      r.delta = parse_outcome(parse_double(fields[0], line_no), line_no);
      r.d_omega = parse_double(fields[1], line_no);
      if (!trim(fields[2]).empty()) r.mean_freq = parse_double(fields[2], line_no);
      if (!trim(fields[3]).empty()) r.bin_index = parse_bin(parse_double(fields[3], line_no), line_no);
      out.push_back(r);
    }
    return out;
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const Json j = Json::parse(line);
      DetectionRecord r;
      r.delta = parse_outcome(j.at("delta").get<double>(), line_no);
      r.d_omega = j.at("dOmega_radps").get<double>();
      if (j.contains("W_radps") && !j["W_radps"].is_null()) r.mean_freq = j["W_radps"].get<double>();
      if (j.contains("bin") && !j["bin"].is_null())
        r.bin_index = parse_bin(j["bin"].get<double>(), line_no);
      out.push_back(r);
    } catch (const Json::exception& e) {
      std::ostringstream msg;
      msg << "line " << line_no << ": " << e.what();
      throw ConfigError(msg.str());
    }
  }
  return out;
}

std::vector<DetectionRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records file " + path.string());
  return read_records(in, record_format_for(path));
}

void write_fisher_csv(std::ostream& out, const FisherCurve& curve) {
  out << kFisherCsvHeader << '\n';
  for (const auto& p : curve.points) {
    out << format_double(p.delta_t) << ',' << format_double(p.fisher) << ',' << to_string(curve.method)
        << ',' << format_double(p.eta) << ',';
    if (curve.epsilon) out << format_double(*curve.epsilon);
    out << '\n';
  }
}

std::vector<double> read_series(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(parse_double(split(t, ',').front(), line_no));
  }
  return out;
}

Json to_json(const EstimateResult& result) {
  Json j;
  if (result.value)
    j["value_ps"] = *result.value;
  else
    j["failure"] = std::string(to_string(result.failure.value_or(FailureReason::empty_sample)));
  j["loglik"] = result.loglik_at_max;
  j["grid"] = {{"coarse_points", result.grid.coarse_points},
               {"coarse_argmax", result.grid.coarse_argmax},
               {"refine_levels", result.grid.refine_levels},
               {"refine_argmax", result.grid.refine_argmax}};
  // The likelihoods are even in the delay; estimates are reported as |dt|.
  j["delay_domain"] = "non_negative";
  return j;
}

Json to_json(const FisherCurve& curve) {
  Json j;
  j["method"] = std::string(to_string(curve.method));
  j["epsilon_radps"] = optional_number(curve.epsilon);
  j["quad_tol"] = curve.quad_tol;
  Json pts = Json::array();
  for (const auto& p : curve.points)
    pts.push_back({{"delta_t_ps", p.delta_t}, {"fisher_ps^-2", p.fisher}, {"eta", p.eta}});
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const SweepConfig& c) {
  Json j;
  j["delays_ps"] = c.delays;
  j["repeats"] = c.repeats;
  j["samples"] = c.samples;
  Json est = Json::array();
  for (auto k : c.estimators) est.push_back(std::string(to_string(k)));
  j["estimators"] = std::move(est);
  j["sigma_radps"] = c.model.sigma;
  j["omega0_radps"] = c.model.omega0;
  j["eta"] = c.model.eta;
  j["gamma"] = c.model.gamma;
  if (c.eta_table) {
    Json knots = Json::array();
    for (const auto& [t, eta] : c.eta_table->knots()) knots.push_back({t, eta});
    j["eta_table"] = std::move(knots);
  }
  if (c.detector) {
    j["epsilon_radps"] = c.detector->epsilon;
    j["n_max"] = c.detector->n_max;
  }
  j["t_max_ps"] = c.grid().t_max;
  j["seed"] = c.seed;
  if (c.report_path) j["report_path"] = *c.report_path;
  return j;
}

namespace {

Json to_json(const EstimatorStats& s) {
  Json j;
  j["successes"] = s.successes;
  j["failures"] = s.failures;
  j["failure_fraction"] = s.failure_fraction;
  Json reasons = Json::object();
  for (const auto& [reason, n] : s.failure_reasons) reasons[std::string(to_string(reason))] = n;
  j["failure_reasons"] = std::move(reasons);
  j["mean_ps"] = optional_number(s.mean);
  j["std_ps"] = optional_number(s.stddev);
  j["se_ps"] = optional_number(s.standard_error);
  j["bias_ps"] = optional_number(s.bias);
  j["mse_ps2"] = optional_number(s.mse);
  j["fisher_exp_ps^-2"] = optional_number(s.fisher_exp);
  j["fisher_ps^-2"] = s.fisher;
  j["crb_ps2"] = optional_number(s.crb);
  return j;
}

}  // namespace

Json to_json(const SweepReport& report) {
  Json j;
  j["config"] = to_json(report.config);
  Json points = Json::array();
  for (const auto& p : report.points) {
    Json pj;
    pj["delta_t_ps"] = p.delta_t;
    pj["eta"] = p.eta;
    Json est = Json::object();
    for (const auto& s : p.estimators) est[std::string(to_string(s.estimator))] = to_json(s);
    pj["estimators"] = std::move(est);
    pj["mse_ratio"] = optional_number(p.mse_ratio);
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  j["warnings"] = report.warnings;
  return j;
}

Json to_json(const MicroShiftReport& r) {
  Json j;
  j["base_estimate_ps"] = r.base_estimate;
  j["shifted_estimate_ps"] = r.shifted_estimate;
  j["shift_estimate_ps"] = r.shift_estimate;
  j["fisher_ps^-2"] = r.fisher;
  j["estimate_std_ps"] = r.estimate_std;
  j["combined_std_ps"] = r.combined_std;
  j["insufficient_samples"] = r.insufficient_samples;
  Json trace = Json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"samples", t.samples},
                     {"base_estimate_ps", t.base_estimate},
                     {"shifted_estimate_ps", t.shifted_estimate}});
  j["trace"] = std::move(trace);
  return j;
}

Json to_json(const std::vector<AllanPoint>& points) {
  Json arr = Json::array();
  for (const auto& p : points)
    arr.push_back({{"cluster_size", p.cluster_size}, {"clusters", p.clusters}, {"allan_variance", p.variance}});
  return arr;
}

SweepConfig sweep_config_from_json(const Json& j) {
  static const std::set<std::string> kKeys = {
      "delays_ps", "repeats", "samples", "estimators", "sigma_ghz", "sigma_radps", "tau_ps", "eta",
      "gamma", "omega0_thz", "omega0_radps", "eta_table", "epsilon_ghz", "epsilon_radps", "n_max",
      "t_max_ps", "seed", "report_path"};
  if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown sweep config key '" + key + "'");

  auto count = [&](const char* key) {
    if (!j[key].is_number_unsigned()) throw ConfigError(std::string(key) + " must be a non-negative integer");
    return j[key].get<std::uint64_t>();
  };
  try {
    SweepConfig c;
    c.model.omega0 = thz_to_radps(193.0);
    c.model.sigma = ghz_to_radps(81.0);
    const int sigma_keys = static_cast<int>(j.contains("sigma_ghz")) +
                           static_cast<int>(j.contains("sigma_radps")) +
                           static_cast<int>(j.contains("tau_ps"));
    if (sigma_keys > 1) throw ConfigError("give only one of sigma_ghz, sigma_radps, tau_ps");
    if (j.contains("sigma_ghz")) c.model.sigma = ghz_to_radps(j["sigma_ghz"].get<double>());
    if (j.contains("sigma_radps")) c.model.sigma = j["sigma_radps"].get<double>();
    if (j.contains("tau_ps")) c.model.sigma = 1.0 / (2.0 * j["tau_ps"].get<double>());
    if (j.contains("omega0_thz")) c.model.omega0 = thz_to_radps(j["omega0_thz"].get<double>());
    if (j.contains("omega0_radps")) c.model.omega0 = j["omega0_radps"].get<double>();
    if (j.contains("eta")) c.model.eta = j["eta"].get<double>();
    if (j.contains("gamma")) c.model.gamma = j["gamma"].get<double>();
    if (j.contains("delays_ps")) c.delays = j["delays_ps"].get<std::vector<double>>();
    if (j.contains("repeats")) c.repeats = count("repeats");
    if (j.contains("samples")) c.samples = count("samples");
    if (j.contains("seed")) c.seed = count("seed");
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j["estimators"]) c.estimators.push_back(estimator_from_string(e.get<std::string>()));
    }
    if (j.contains("eta_table"))
      c.eta_table = EtaTable(j["eta_table"].get<std::vector<std::pair<double, double>>>());
    if (j.contains("epsilon_ghz") && j.contains("epsilon_radps"))
      throw ConfigError("give only one of epsilon_ghz, epsilon_radps");
    std::optional<double> eps;
    if (j.contains("epsilon_ghz")) eps = ghz_to_radps(j["epsilon_ghz"].get<double>());
    if (j.contains("epsilon_radps")) eps = j["epsilon_radps"].get<double>();
    if (eps) {
      c.detector = BinnedDetectorSpec::for_model(c.model, *eps);
      if (j.contains("n_max")) c.detector->n_max = static_cast<std::uint32_t>(count("n_max"));
    } else if (j.contains("n_max")) {
      throw ConfigError("n_max given without an epsilon");
    }
    if (j.contains("t_max_ps")) c.t_max = j["t_max_ps"].get<double>();
    if (j.contains("report_path")) c.report_path = j["report_path"].get<std::string>();
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ConfigError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot rename onto " + path.string());
  }
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace homdelay
