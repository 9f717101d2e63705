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

#include "homdelay/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "homdelay/errors.hpp"
#include "homdelay/estimators.hpp"
#include "homdelay/fisher.hpp"
#include "homdelay/harness.hpp"
#include "homdelay/io.hpp"
#include "homdelay/sampler.hpp"
#include "homdelay/units.hpp"

namespace homdelay {

using namespace units;

namespace {

constexpr double kDefaultSigmaGhz = 81.0;
constexpr double kDefaultOmega0Thz = 193.0;
constexpr double kFullScaleMicroShiftSamples = 7.9e6;
constexpr double kDeskMicroShiftSamples = 1e5;

struct Options {
  std::uint64_t seed = 1;
  std::string config;
  std::string format;
  std::string output;
  bool quiet = false;
  bool paper_scale = false;

  double sigma_ghz = kDefaultSigmaGhz;
  double tau_ps = 0.0;
  double eta = 1.0;
  double gamma = 1.0;
  std::string delay_ps;
  double epsilon_ghz = 0.0;
  double epsilon_radps = 0.0;
  std::uint32_t n_max = 0;
  double samples = 0.0;
  std::size_t repeats = 0;

  // subcommand specific
  std::string input;
  std::string method;
  double t_max_ps = 0.0;
  double quad_tol = 1e-8;
  bool physical_loss = false;
  bool mean_freq = false;
  std::string eta_table;
  std::string estimators;
  std::string cluster_sizes;
  double shift_fs = 3.0;
};

struct Context {
  CLI::App* sub = nullptr;
  Options opt;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::optional<Json> config_json;

  [[nodiscard]] bool given(const std::string& name) const {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  }
};

double parse_number(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw ConfigError("cannot parse " + what + " '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_count(double v, const std::string& flag) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
    throw ConfigError(flag + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

PhotonPairModel model_from(const Context& ctx) {
  if (ctx.given("--tau-ps") && ctx.given("--sigma-ghz"))
    throw ConfigError("--tau-ps and --sigma-ghz are mutually exclusive");
  PhotonPairModel m;
  m.sigma = ctx.given("--tau-ps") ? 1.0 / (2.0 * ctx.opt.tau_ps) : ghz_to_radps(ctx.opt.sigma_ghz);
  m.omega0 = thz_to_radps(kDefaultOmega0Thz);
  m.eta = ctx.opt.eta;
  m.gamma = ctx.opt.gamma;
  m.validate();
  return m;
}

std::optional<BinnedDetectorSpec> detector_from(const Context& ctx, const PhotonPairModel& model,
                                                bool required) {
  if (ctx.given("--epsilon-ghz") && ctx.given("--epsilon-radps"))
    throw ConfigError("--epsilon-ghz and --epsilon-radps are mutually exclusive");
  std::optional<double> eps;
  if (ctx.given("--epsilon-ghz")) eps = ghz_to_radps(ctx.opt.epsilon_ghz);
  if (ctx.given("--epsilon-radps")) eps = ctx.opt.epsilon_radps;
  if (!eps && !required) {
    if (ctx.given("--n-max")) throw ConfigError("--n-max requires --epsilon-ghz or --epsilon-radps");
    return std::nullopt;
  }
  BinnedDetectorSpec spec = BinnedDetectorSpec::for_model(model, eps.value_or(BinnedDetectorSpec{}.epsilon));
  if (ctx.given("--n-max")) spec.n_max = ctx.opt.n_max;
  spec.validate();
  validate_coverage(spec, model);
  return spec;
}

std::optional<EtaTable> eta_table_from(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<std::pair<double, double>> knots;
  std::ifstream file(spec);
  if (file) {
    std::string line;
    while (std::getline(file, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto cols = split_list(line);
      if (cols.size() != 2) throw ConfigError("eta table rows need two columns: delay_ps,eta");
      if (knots.empty() && cols[0] == "delay_ps") continue;
      knots.emplace_back(parse_number(cols[0], "eta table delay"), parse_number(cols[1], "eta table eta"));
    }
  } else {
    for (const auto& item : split_list(spec)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("inline eta table entries are delay:eta, got '" + item + "'");
      knots.emplace_back(parse_number(item.substr(0, colon), "eta table delay"),
                         parse_number(item.substr(colon + 1), "eta table eta"));
    }
  }
  return EtaTable(std::move(knots));
}

void emit(const Context& ctx, const std::string& text) {
  if (!ctx.opt.output.empty())
    atomic_write(ctx.opt.output, text);
  else
    *ctx.out << text;
}

std::string dump(Json j, const Context& ctx) {
  if (!ctx.opt.quiet) j["generated_at"] = utc_timestamp();
  return j.dump(2) + "\n";
}

std::string format_or(const Context& ctx, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = ctx.opt.format.empty() ? fallback : ctx.opt.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw ConfigError("--format " + f + " is not supported by '" + ctx.sub->get_name() + "'");
}

double single_delay(const Context& ctx, double fallback) {
  if (ctx.opt.delay_ps.empty()) return fallback;
  const auto delays = parse_delay_list(ctx.opt.delay_ps);
  if (delays.size() != 1) throw ConfigError("--delay-ps must be a single value for '" + ctx.sub->get_name() + "'");
  return delays.front();
}

DelayGrid grid_from(const Context& ctx, const PhotonPairModel& model, double fallback_t_max) {
  return DelayGrid::defaults_for(model, ctx.given("--t-max-ps") ? ctx.opt.t_max_ps : fallback_t_max);
}

void warn(const Context& ctx, const std::string& message) {
  if (!ctx.opt.quiet) *ctx.err << "warning: " << message << '\n';
}

// --- subcommands ----------------------------------------------------------

void run_simulate(const Context& ctx) {
  SamplerConfig sc;
  sc.model = model_from(ctx);
  sc.true_delay = single_delay(ctx, 0.0);
  sc.seed = ctx.opt.seed;
  sc.count = ctx.given("--samples") ? to_count(ctx.opt.samples, "--samples") : 1000;
  sc.loss_mode = ctx.opt.physical_loss ? LossMode::physical : LossMode::post_selected;
  sc.binning = detector_from(ctx, sc.model, false);
  sc.emit_mean_freq = ctx.opt.mean_freq;
  const RecordBatch batch = draw_records(sc);
  const bool by_extension = ctx.opt.format.empty() && !ctx.opt.output.empty() &&
                            record_format_for(ctx.opt.output) == RecordFormat::jsonl;
  const std::string fmt = format_or(ctx, by_extension ? "json" : "csv", {"csv", "json"});
  std::ostringstream text;
  write_records(text, batch.records, fmt == "csv" ? RecordFormat::csv : RecordFormat::jsonl);
  emit(ctx, text.str());
  if (batch.stats.loss_dropped + batch.stats.range_dropped > 0)
    warn(ctx, std::to_string(batch.stats.loss_dropped) + " events lost, " +
                  std::to_string(batch.stats.range_dropped) + " outside the detector range");
}

void run_estimate(const Context& ctx) {
  if (ctx.opt.input.empty()) throw ConfigError("estimate needs a records file (--input)");
  const auto records = load_records(ctx.opt.input);
  const PhotonPairModel model = model_from(ctx);
  const std::string method = ctx.opt.method.empty() ? "fr" : ctx.opt.method;
  EstimateResult result;
  if (method == "nr") {
    const OutcomeCounts c = count_outcomes(records);
    result = estimate_nonresolved(c.bunching, c.coincidence, model);
  } else if (method == "fr" || method == "ideal") {
    result = estimate_resolved(records, model, grid_from(ctx, model, 20.0));
  } else if (method == "binned") {
    const BinnedDetectorSpec spec = *detector_from(ctx, model, true);
    const DelayGrid grid = grid_from(ctx, model, std::min(20.0, max_unambiguous_delay(spec)));
    result = estimate_resolved_binned(records, model, spec, grid);
  } else {
    throw ConfigError("unknown estimate method '" + method + "' (expected nr, fr or binned)");
  }
  const std::string fmt = format_or(ctx, "json", {"csv", "json"});
  if (fmt == "json") {
    emit(ctx, to_json(result).dump(2) + "\n");
    return;
  }
  std::ostringstream text;
  text << "value_ps,failure,loglik\n";
  if (result.value) text << format_double(*result.value);
  text << ',';
  if (result.failure) text << to_string(*result.failure);
  text << ',' << format_double(result.loglik_at_max) << '\n';
  emit(ctx, text.str());
}

void run_fisher(const Context& ctx) {
  const PhotonPairModel model = model_from(ctx);
  const std::string method = ctx.opt.method.empty() ? "nr" : ctx.opt.method;
  const std::string fmt = format_or(ctx, "csv", {"csv", "json"});
  if (method == "qfi") {
    const double h = qfi(model);
    if (fmt == "json") {
      Json j{{"method", "qfi"}, {"sigma_radps", model.sigma}, {"qfi_ps^-2", h}};
      emit(ctx, j.dump(2) + "\n");
    } else {
      emit(ctx, "qfi_ps^-2\n" + format_double(h) + "\n");
    }
    return;
  }
  const FisherMethod fm = fisher_method_from_string(method);
  const std::vector<double> delays =
      parse_delay_list(ctx.opt.delay_ps.empty() ? std::string("0:10:0.1") : ctx.opt.delay_ps);
  const std::optional<EtaTable> table = eta_table_from(ctx.opt.eta_table);
  EtaOfDelay eta_of;
  if (table) eta_of = [&table](double t) { return (*table)(t); };
  std::optional<BinnedDetectorSpec> spec;
  if (fm == FisherMethod::resolved_binned) spec = detector_from(ctx, model, true);
  FisherOptions fo;
  fo.quad_tol = ctx.opt.quad_tol;
  fo.physical_loss = ctx.opt.physical_loss;
  const FisherCurve curve = fisher_curve(fm, model, delays, eta_of, spec, fo);
  if (fmt == "json") {
    emit(ctx, to_json(curve).dump(2) + "\n");
    return;
  }
  std::ostringstream text;
  write_fisher_csv(text, curve);
  emit(ctx, text.str());
}

void run_sweep_cmd(const Context& ctx) {
  SweepConfig cfg = ctx.config_json ? sweep_config_from_json(*ctx.config_json) : SweepConfig{};
  if (!ctx.config_json) {
    cfg.model.sigma = ghz_to_radps(kDefaultSigmaGhz);
    cfg.model.omega0 = thz_to_radps(kDefaultOmega0Thz);
  }
  if (ctx.given("--tau-ps") || ctx.given("--sigma-ghz")) cfg.model.sigma = model_from(ctx).sigma;
  if (ctx.given("--eta")) cfg.model.eta = ctx.opt.eta;
  if (ctx.given("--gamma")) cfg.model.gamma = ctx.opt.gamma;
  if (ctx.given("--seed")) cfg.seed = ctx.opt.seed;
  if (ctx.given("--samples")) cfg.samples = to_count(ctx.opt.samples, "--samples");
  if (ctx.given("--repeats"))
    cfg.repeats = ctx.opt.repeats;
  else if (ctx.opt.paper_scale)
    cfg.repeats = 1000;
  if (ctx.given("--delay-ps")) cfg.delays = parse_delay_list(ctx.opt.delay_ps);
  if (ctx.given("--t-max-ps")) cfg.t_max = ctx.opt.t_max_ps;
  if (ctx.given("--eta-table")) cfg.eta_table = eta_table_from(ctx.opt.eta_table);
  if (ctx.given("--estimators")) {
    cfg.estimators.clear();
    for (const auto& e : split_list(ctx.opt.estimators)) cfg.estimators.push_back(estimator_from_string(e));
  }
  if (ctx.given("--epsilon-ghz") || ctx.given("--epsilon-radps") || ctx.given("--n-max"))
    cfg.detector = detector_from(ctx, cfg.model, true);
  const bool binned = std::find(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::fr_binned) !=
                      cfg.estimators.end();
  if (binned && !cfg.detector) cfg.detector = BinnedDetectorSpec::for_model(cfg.model, BinnedDetectorSpec{}.epsilon);

  const SweepReport report = run_sweep(cfg);
  for (const auto& w : report.warnings) warn(ctx, w);

  const std::string fmt = format_or(ctx, "json", {"csv", "json"});
  std::string text;
  if (fmt == "json") {
    text = dump(to_json(report), ctx);
  } else {
    std::ostringstream csv;
    csv << "delta_t_ps,estimator,eta,successes,failure_fraction,mean_ps,std_ps,bias_ps,mse_ps2,"
           "fisher_exp_ps^-2,fisher_ps^-2,crb_ps2,mse_ratio\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& p : report.points)
      for (const auto& s : p.estimators)
        csv << format_double(p.delta_t) << ',' << to_string(s.estimator) << ',' << format_double(p.eta)
            << ',' << s.successes << ',' << format_double(s.failure_fraction) << ',' << opt(s.mean) << ','
            << opt(s.stddev) << ',' << opt(s.bias) << ',' << opt(s.mse) << ',' << opt(s.fisher_exp) << ','
            << format_double(s.fisher) << ',' << opt(s.crb) << ',' << opt(p.mse_ratio) << '\n';
    text = csv.str();
  }
  if (ctx.opt.output.empty() && cfg.report_path)
    atomic_write(*cfg.report_path, text);
  else
    emit(ctx, text);
}

void run_allan(const Context& ctx) {
  std::vector<double> series;
  if (!ctx.opt.input.empty()) {
    std::ifstream in(ctx.opt.input);
    if (!in) throw ConfigError("cannot open series file " + ctx.opt.input);
    series = read_series(in);
  } else {
    SamplerConfig sc;
    sc.model = model_from(ctx);
    sc.true_delay = single_delay(ctx, 0.0);
    sc.seed = ctx.opt.seed;
    sc.count = ctx.given("--samples") ? to_count(ctx.opt.samples, "--samples") : 100000;
    series = outcome_series(draw_records(sc).records);
  }
  std::vector<std::size_t> sizes;
  if (!ctx.opt.cluster_sizes.empty()) {
    for (const auto& s : split_list(ctx.opt.cluster_sizes))
      sizes.push_back(to_count(parse_number(s, "cluster size"), "--cluster-sizes"));
  } else {
    for (std::size_t m = 1; series.size() / m >= 2; m *= 10) sizes.push_back(m);
  }
  const auto points = allan_variance(series, sizes);
  const std::string fmt = format_or(ctx, "csv", {"csv", "json"});
  if (fmt == "json") {
    emit(ctx, to_json(points).dump(2) + "\n");
    return;
  }
  std::ostringstream text;
  text << "cluster_size,clusters,allan_variance\n";
  for (const auto& p : points) text << p.cluster_size << ',' << p.clusters << ',' << format_double(p.variance) << '\n';
  emit(ctx, text.str());
}

void run_microshift(const Context& ctx) {
  MicroShiftConfig mc;
  mc.model = model_from(ctx);
  mc.base = single_delay(ctx, 6.567);
  mc.shift = fs_to_ps(ctx.opt.shift_fs);
  mc.seed = ctx.opt.seed;
  mc.samples = ctx.given("--samples")
                   ? to_count(ctx.opt.samples, "--samples")
                   : static_cast<std::size_t>(ctx.opt.paper_scale ? kFullScaleMicroShiftSamples
                                                                  : kDeskMicroShiftSamples);
  if (ctx.given("--t-max-ps")) mc.grid = DelayGrid::defaults_for(mc.model, ctx.opt.t_max_ps);
  const MicroShiftReport report = micro_shift_experiment(mc);
  if (report.insufficient_samples)
    warn(ctx, "shift is below 3 combined standard deviations; increase --samples to resolve it");
  const std::string fmt = format_or(ctx, "json", {"csv", "json"});
  if (fmt == "json") {
    emit(ctx, dump(to_json(report), ctx));
    return;
  }
  std::ostringstream text;
  text << "samples,base_estimate_ps,shifted_estimate_ps,shift_estimate_ps\n";
  for (const auto& t : report.trace)
    text << t.samples << ',' << format_double(t.base_estimate) << ',' << format_double(t.shifted_estimate)
         << ',' << format_double(t.shifted_estimate - t.base_estimate) << '\n';
  emit(ctx, text.str());
}

// --- wiring -----------------------------------------------------------------

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--config", o.config, "JSON config file; flags override its values");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output", o.output, "Output path (default stdout)");
  sub->add_flag("--quiet", o.quiet, "Suppress warnings and timestamps");
  sub->add_flag("--paper-scale", o.paper_scale, "Use full experimental sample sizes");
  sub->add_option("--sigma-ghz", o.sigma_ghz, "Photon bandwidth sigma/2pi in GHz");
  sub->add_option("--tau-ps", o.tau_ps, "Coherence time tau = 1/(2 sigma) in ps")->check(CLI::PositiveNumber);
  sub->add_option("--eta", o.eta, "Indistinguishability")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--gamma", o.gamma, "Detection efficiency")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--delay-ps", o.delay_ps, "Delay(s) in ps: value, list a,b,c or range a:b:step");
  sub->add_option("--epsilon-ghz", o.epsilon_ghz, "Bin half width in GHz (epsilon/2pi)")->check(CLI::PositiveNumber);
  sub->add_option("--epsilon-radps", o.epsilon_radps, "Bin half width in rad/ps")->check(CLI::PositiveNumber);
  sub->add_option("--n-max", o.n_max, "Highest bin index");
  sub->add_option("--samples", o.samples, "Samples (events) per run");
  sub->add_option("--repeats", o.repeats, "Repeats per delay")->check(CLI::PositiveNumber);
}

void inject_config(CLI::App* sub, const Json& j, const std::vector<std::string>& user_args,
                   std::vector<std::string>& injected) {
  if (!j.is_object()) throw ConfigError("--config must hold a JSON object");
  const bool user_bandwidth = std::any_of(user_args.begin(), user_args.end(), [](const std::string& a) {
    return a.rfind("--tau-ps", 0) == 0 || a.rfind("--sigma-ghz", 0) == 0;
  });
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "--config") continue;
    CLI::Option* o = sub->get_option_no_throw(flag);
    if (o == nullptr) throw ConfigError("unknown config key '" + key + "' for '" + sub->get_name() + "'");
    if (user_bandwidth && (flag == "--tau-ps" || flag == "--sigma-ghz")) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ',';
        text += v.is_string() ? v.get<std::string>() : v.dump();
      }
    } else {
      text = value.is_string() ? value.get<std::string>() : value.dump();
    }
    injected.push_back(flag);
    injected.push_back(text);
  }
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

}  // namespace

std::vector<double> parse_delay_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const auto first = item.find(':');
    if (first == std::string::npos) {
      out.push_back(parse_number(item, "delay"));
      continue;
    }
    const auto second = item.find(':', first + 1);
    if (second == std::string::npos) throw ConfigError("delay range must be start:stop:step, got '" + item + "'");
    const double a = parse_number(item.substr(0, first), "range start");
    const double b = parse_number(item.substr(first + 1, second - first - 1), "range stop");
    const double step = parse_number(item.substr(second + 1), "range step");
    if (!(step > 0.0) || b < a) throw ConfigError("delay range needs step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k)
      out.push_back(std::round((a + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  if (out.empty()) throw ConfigError("empty delay list");
  std::sort(out.begin(), out.end());
  return out;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis of frequency-resolved two-photon interference delay estimation",
               "homdelay"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", "homdelay 0.1.0");

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  Options& o = ctx.opt;

  struct Entry {
    CLI::App* app;
    void (*run)(const Context&);
  };
  std::vector<Entry> entries;

  {
    auto* s = app.add_subcommand("simulate", "Emit seeded detection records");
    add_common(s, o);
    s->add_flag("--mean-freq", o.mean_freq, "Also sample the mean frequency W");
    s->add_flag("--physical-loss", o.physical_loss, "Drop events with probability 1 - gamma^2");
    entries.push_back({s, run_simulate});
  }
  {
    auto* s = app.add_subcommand("estimate", "Estimate the delay from a records file");
    add_common(s, o);
    s->add_option("input,--input", o.input, "Records file (.csv or .jsonl)");
    s->add_option("--method", o.method, "nr | fr | binned")->check(CLI::IsMember({"nr", "fr", "ideal", "binned"}));
    s->add_option("--t-max-ps", o.t_max_ps, "Upper edge of the likelihood grid")->check(CLI::PositiveNumber);
    entries.push_back({s, run_estimate});
  }
  {
    auto* s = app.add_subcommand("fisher", "Emit a Fisher information curve");
    add_common(s, o);
    s->add_option("method,--method", o.method, "qfi | nr | ideal | binned")
        ->check(CLI::IsMember({"qfi", "nr", "ideal", "binned"}));
    s->add_option("--quad-tol", o.quad_tol, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
    s->add_flag("--physical-loss", o.physical_loss, "Include the gamma^2 loss factor");
    s->add_option("--eta-table", o.eta_table, "eta(dt) table: file with delay_ps,eta rows or inline t:eta,...");
    entries.push_back({s, run_fisher});
  }
  {
    auto* s = app.add_subcommand("sweep", "Repeat-sweep experiment over delays");
    add_common(s, o);
    s->add_option("--estimators", o.estimators, "Comma list of NR, FR, FRbinned");
    s->add_option("--t-max-ps", o.t_max_ps, "Upper edge of the likelihood grid")->check(CLI::PositiveNumber);
    s->add_option("--eta-table", o.eta_table, "eta(dt) table: file with delay_ps,eta rows or inline t:eta,...");
    entries.push_back({s, run_sweep_cmd});
  }
  {
    auto* s = app.add_subcommand("allan", "Allan variance of a series or of simulated outcomes");
    add_common(s, o);
    s->add_option("input,--input", o.input, "Series file, one value per line");
    s->add_option("--cluster-sizes", o.cluster_sizes, "Comma list of cluster sizes");
    entries.push_back({s, run_allan});
  }
  {
    auto* s = app.add_subcommand("microshift", "Resolve a small delay shift around a base delay");
    add_common(s, o);
    s->add_option("--shift-fs", o.shift_fs, "Shift in fs")->check(CLI::NonNegativeNumber);
    s->add_option("--t-max-ps", o.t_max_ps, "Upper edge of the likelihood grid")->check(CLI::PositiveNumber);
    entries.push_back({s, run_microshift});
  }

  try {
    std::vector<std::string> full = args;
    if (!args.empty()) {
      CLI::App* sub = app.get_subcommand_no_throw(args.front());
      const auto config_path = find_config_path(args);
      if (sub != nullptr && config_path) {
        ctx.config_json = load_json(*config_path);
        if (sub->get_name() != "sweep") {
          std::vector<std::string> injected;
          inject_config(sub, *ctx.config_json, args, injected);
          full.clear();
          full.push_back(args.front());
          full.insert(full.end(), injected.begin(), injected.end());
          full.insert(full.end(), args.begin() + 1, args.end());
        }
      }
    }
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitConfig;
    }
    for (const auto& entry : entries) {
      if (entry.app->parsed()) {
        ctx.sub = entry.app;
        entry.run(ctx);
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace homdelay
