#include "v2x/cli.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "v2x/analytic.hpp"
#include "v2x/error.hpp"
#include "v2x/simulator.hpp"

namespace v2x::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<std::string, Metric>>& metric_names() {
  static const std::vector<std::pair<std::string, Metric>> names{
      {"assoc", Metric::Assoc},         {"dl_cov", Metric::DlCov},
      {"sl_cov", Metric::SlCov},        {"total_cov", Metric::TotalCov},
      {"eff_rate", Metric::EffRate},    {"utility", Metric::Utility},
      {"total_rate", Metric::TotalRate}, {"nu", Metric::Nu}};
  return names;
}

double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument("invalid number '" + std::string(text) + "' in " + what);
  }
  return value;
}

std::uint64_t parse_seed(std::string_view text, const std::string& source) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw std::invalid_argument(source + " must be a 64-bit unsigned decimal, got '" +
                                std::string(text) + "'");
  }
  return value;
}

bool is_coverage(Metric m) { return m == Metric::DlCov || m == Metric::SlCov || m == Metric::TotalCov; }

/// Abscissa column for each row of a config: the taus for coverage, epsilon
/// for the rate/utility metrics, nothing otherwise.
std::vector<double> row_abscissae(const RunRequest& req, const NetworkConfig& cfg) {
  if (is_coverage(req.metric)) return req.taus;
  if (req.metric == Metric::Utility || req.metric == Metric::TotalRate) return {cfg.epsilon};
  return {kNaN};
}

analytic::CoverageResult analytic_value(const NetworkConfig& cfg, Metric metric, double x) {
  switch (metric) {
    case Metric::Assoc: return analytic::p_assoc_sl(cfg.lambda_l, cfg.mu, cfg.rho);
    case Metric::DlCov: return analytic::dl_coverage(cfg, x);
    case Metric::SlCov: return analytic::sl_coverage(cfg, x);
    case Metric::TotalCov: return analytic::total_coverage(cfg, x);
    case Metric::EffRate: return analytic::effective_rate(cfg);
    case Metric::Utility: return analytic::network_utility(cfg, cfg.w_s, cfg.w_d);
    case Metric::TotalRate: return analytic::total_rate(cfg);
    case Metric::Nu: return {analytic::nu(), 0.0};
  }
  throw std::logic_error("unknown metric");
}

/// P(SIR > tau, SL) on a run; tau = 0 gives the SL association share.
Estimate sidelink_share(const SirRun& run, double tau) {
  std::uint64_t hits = 0;
  for (const auto& s : run.samples) {
    if (s.association == Association::Sidelink && s.sir > tau) ++hits;
  }
  const double n = static_cast<double>(run.samples.size());
  Estimate e;
  e.n_samples = run.samples.size();
  e.seed = run.seed;
  e.mean = static_cast<double>(hits) / n;
  if (n > 1) e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / (n - 1.0));
  return e;
}

/// w_sl * P(SIR > 2^eps - 1, SL) + w_t * T. The two terms share SIR samples,
/// so their standard errors are added (Cauchy-Schwarz bound).
Estimate rate_mix(const NetworkConfig& cfg, const SimPlan& plan, double w_sl, double w_t) {
  const SirRun run = simulate_sir(cfg, plan);
  Estimate out;
  out.n_samples = plan.n_samples;
  out.seed = plan.seed;
  if (w_sl > 0.0) {
    const Estimate sl = sidelink_share(run, std::exp2(cfg.epsilon) - 1.0);
    out.mean += w_sl * sl.mean;
    out.std_error += w_sl * sl.std_error;
  }
  if (w_t > 0.0) {
    const RateSummary numerator = mean_dl_rate(run);
    const Estimate load = estimate_zero_cell_load(cfg, plan);
    const double rate = numerator.mean_dl_rate.mean / load.mean;
    const double rel_n = numerator.mean_dl_rate.std_error / numerator.mean_dl_rate.mean;
    const double rel_d = load.std_error / load.mean;
    out.mean += w_t * rate;
    out.std_error += w_t * std::abs(rate) * std::sqrt(rel_n * rel_n + rel_d * rel_d);
  }
  return out;
}

/// Monte Carlo estimates for every abscissa of one config, from one run.
std::vector<Estimate> mc_values(const NetworkConfig& cfg, Metric metric, const std::vector<double>& xs,
                                const SimPlan& plan) {
  switch (metric) {
    case Metric::Assoc: return {estimate_association(cfg, plan).sidelink};
    case Metric::DlCov:
    case Metric::SlCov:
    case Metric::TotalCov: {
      const CoverageCurve curve = estimate_coverage_curve(cfg, xs, plan);
      std::vector<Estimate> out;
      for (const auto& p : curve.points) {
        out.push_back(metric == Metric::DlCov ? p.downlink : metric == Metric::SlCov ? p.sidelink : p.total);
      }
      return out;
    }
    case Metric::EffRate: return {estimate_effective_rate(cfg, plan).rate};
    case Metric::Utility: return {rate_mix(cfg, plan, cfg.w_s, cfg.w_d)};
    case Metric::TotalRate: return {rate_mix(cfg, plan, cfg.epsilon, 1.0)};
    case Metric::Nu: {
      Estimate e = estimate_voronoi_area_moment(cfg.lambda_b, plan);
      const double scale = cfg.lambda_b * cfg.lambda_b;
      e.mean *= scale;
      e.std_error *= scale;
      return {e};
    }
  }
  throw std::logic_error("unknown metric");
}

std::string describe_failure(const std::exception& e, Metric metric, double x) {
  std::ostringstream os;
  if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) {
    os << "NonConvergence in " << to_string(metric);
    if (!std::isnan(x)) os << " at " << (is_coverage(metric) ? "tau=" : "epsilon=") << x;
    os << ": " << nc->what() << " (value=" << nc->value() << ", error_bound=" << nc->error_bound() << ")";
  } else {
    os << e.what();
  }
  return os.str();
}

Row blank_row(const NetworkConfig& cfg, Metric metric, double x) {
  return Row{cfg, to_string(metric), x, kNaN, kNaN, std::nullopt, std::nullopt, kNaN,
             kNaN, kNaN, kNaN, kNaN, kNaN, "", ""};
}

std::vector<Row> evaluate_config(const RunRequest& req, const NetworkConfig& cfg) {
  const std::vector<double> xs = row_abscissae(req, cfg);
  std::vector<Row> rows;
  for (double x : xs) rows.push_back(blank_row(cfg, req.metric, x));
  try {
    validate(cfg);
  } catch (const std::exception& e) {
    for (auto& r : rows) r.error = e.what();
    return rows;
  }

  if (req.mode != Mode::MonteCarlo) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      try {
        const auto a = analytic_value(cfg, req.metric, xs[k]);
        rows[k].analytic = a.value;
        rows[k].quad_error = a.est_abs_error;
      } catch (const std::exception& e) {
        rows[k].error = describe_failure(e, req.metric, xs[k]);
      }
    }
  }
  if (req.mode != Mode::Analytic) {
    try {
      const SimPlan plan = default_plan(cfg, req.n_samples, *req.seed);
      const std::vector<Estimate> est = mc_values(cfg, req.metric, xs, plan);
      for (std::size_t k = 0; k < xs.size(); ++k) {
        rows[k].mc_mean = est[k].mean;
        rows[k].mc_std_error = est[k].std_error;
        rows[k].n_samples = est[k].n_samples;
        rows[k].seed = est[k].seed;
        rows[k].window_radius = plan.window_radius;
      }
    } catch (const std::exception& e) {
      for (auto& r : rows) {
        if (r.error.empty()) r.error = describe_failure(e, req.metric, r.tau_or_epsilon);
      }
    }
  }

  for (auto& r : rows) {
    switch (req.mode) {
      case Mode::Analytic:
        r.value = r.analytic;
        r.std_error_or_quad_error = r.quad_error;
        break;
      case Mode::MonteCarlo:
        r.value = r.mc_mean;
        r.std_error_or_quad_error = r.mc_std_error;
        break;
      case Mode::Validate:
        r.value = r.analytic;
        r.std_error_or_quad_error = r.quad_error;
        if (r.error.empty()) {
          const double diff = r.mc_mean - r.analytic;
          r.z_score = r.mc_std_error > 0.0 ? diff / r.mc_std_error
                      : diff == 0.0        ? 0.0
                                           : std::copysign(std::numeric_limits<double>::infinity(), diff);
          r.verdict = verdict_passes(r.analytic, r.quad_error, r.mc_mean, r.mc_std_error) ? "pass" : "fail";
        }
        break;
    }
  }
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> row_cells(const Row& r) {
  std::vector<std::string> cells;
  for (const auto& name : config_field_names()) cells.push_back(format_number(config_field(r.config, name)));
  cells.push_back(r.metric);
  cells.push_back(format_number(r.tau_or_epsilon));
  cells.push_back(format_number(r.value));
  cells.push_back(format_number(r.std_error_or_quad_error));
  cells.push_back(r.n_samples ? std::to_string(*r.n_samples) : "");
  cells.push_back(r.seed ? std::to_string(*r.seed) : "");
  cells.push_back(format_number(r.window_radius));
  cells.push_back(format_number(r.analytic));
  cells.push_back(format_number(r.quad_error));
  cells.push_back(format_number(r.mc_mean));
  cells.push_back(format_number(r.mc_std_error));
  cells.push_back(format_number(r.z_score));
  cells.push_back(r.verdict);
  cells.push_back(csv_escape(r.error));
  return cells;
}

nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Parser {
  CLI::App app{"V2X sidelink/downlink coverage: analytic evaluation and Monte Carlo validation",
               "v2xsim"};
  std::string config_path;
  std::string mode = "analytic";
  std::string metric;
  std::vector<double> taus;
  std::vector<std::string> sweeps;
  std::optional<std::string> seed;
  long long n_samples = 100000;
  std::string out;
  bool db = false;
  bool no_timestamp = false;

  Parser() {
    app.add_option("--config", config_path, "flat JSON NetworkConfig")->required()->check(CLI::ExistingFile);
    app.add_option("--mode", mode, "analytic | montecarlo | validate")
        ->check(CLI::IsMember({"analytic", "montecarlo", "validate"}));
    app.add_option("--metric", metric, "assoc | dl_cov | sl_cov | total_cov | eff_rate | utility | total_rate | nu")
        ->required()
        ->check(CLI::IsMember({"assoc", "dl_cov", "sl_cov", "total_cov", "eff_rate", "utility", "total_rate", "nu"}));
    app.add_option("--tau", taus, "SIR thresholds for coverage metrics (space or comma separated)")
        ->delimiter(',');
    app.add_option("--sweep", sweeps, "name=v1,v2,... over a config field; repeat for a grid")
        ->allow_extra_args(false);
    app.add_option("--samples", n_samples, "Monte Carlo replications");
    app.add_option("--seed", seed, "master seed (falls back to VANET_SEED)");
    app.add_option("--out", out, "CSV output path; a .json mirror is written alongside");
    app.add_flag("--db-thresholds", db, "--tau values are in dB");
    app.add_flag("--no-timestamp", no_timestamp, "omit the '# generated' header line");
  }

  RunRequest request(const char* env_seed) const {
    RunRequest req;
    req.config_path = config_path;
    req.config = load_config(config_path);
    req.mode = parse_mode(mode);
    req.metric = parse_metric(metric);
    for (double t : taus) {
      const double ratio = db ? std::pow(10.0, t / 10.0) : t;
      if (!(ratio > 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("tau values must be > 0");
      req.taus.push_back(ratio);
    }
    if (is_coverage(req.metric) && req.taus.empty()) {
      throw std::invalid_argument("coverage metrics need at least one --tau");
    }
    for (const auto& s : sweeps) req.sweeps.push_back(parse_sweep(s));
    if (seed) {
      req.seed = parse_seed(*seed, "--seed");
    } else if (env_seed != nullptr && *env_seed != '\0') {
      req.seed = parse_seed(env_seed, "VANET_SEED");
    }
    if (req.mode != Mode::Analytic) {
      if (!req.seed) throw std::invalid_argument("a seed is required: pass --seed or set VANET_SEED");
      if (n_samples < 1) throw std::invalid_argument("n_samples must be ≥ 1");
    }
    req.n_samples = static_cast<std::uint64_t>(std::max(n_samples, 1LL));
    req.output_path = out;
    req.timestamp = !no_timestamp;
    return req;
  }
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "analytic") return Mode::Analytic;
  if (text == "montecarlo") return Mode::MonteCarlo;
  if (text == "validate") return Mode::Validate;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

Metric parse_metric(const std::string& text) {
  for (const auto& [name, m] : metric_names()) {
    if (name == text) return m;
  }
  throw std::invalid_argument("unknown metric '" + text + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Analytic: return "analytic";
    case Mode::MonteCarlo: return "montecarlo";
    case Mode::Validate: return "validate";
  }
  return "";
}

std::string to_string(Metric metric) {
  for (const auto& [name, m] : metric_names()) {
    if (m == metric) return name;
  }
  return "";
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("sweep must look like name=v1,v2,...: '" + text + "'");
  }
  Sweep sweep;
  sweep.parameter = text.substr(0, eq);
  NetworkConfig probe;
  config_field(probe, sweep.parameter);  // rejects unknown names
  std::string_view rest(text);
  rest.remove_prefix(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    sweep.values.push_back(parse_double(rest.substr(0, comma), "sweep " + sweep.parameter));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return sweep;
}

std::vector<NetworkConfig> expand_sweeps(const NetworkConfig& base, const std::vector<Sweep>& sweeps) {
  std::vector<NetworkConfig> configs{base};
  for (const auto& sweep : sweeps) {
    std::vector<NetworkConfig> next;
    next.reserve(configs.size() * sweep.values.size());
    for (const auto& cfg : configs) {
      for (double v : sweep.values) {
        NetworkConfig c = cfg;
        config_field(c, sweep.parameter) = v;
        next.push_back(c);
      }
    }
    configs = std::move(next);
  }
  return configs;
}

bool verdict_passes(double analytic, double est_abs_error, double mc_mean, double mc_std_error) {
  return std::abs(analytic - mc_mean) <= 3.0 * mc_std_error + est_abs_error;
}

std::vector<Row> run_rows(const RunRequest& req) {
  if (req.mode != Mode::Analytic) {
    if (!req.seed) throw std::invalid_argument("a seed is required: pass --seed or set VANET_SEED");
    if (req.n_samples < 1) throw std::invalid_argument("n_samples must be ≥ 1");
  }
  std::vector<Row> rows;
  for (const auto& cfg : expand_sweeps(req.config, req.sweeps)) {
    auto part = evaluate_config(req, cfg);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c = config_field_names();
    for (const char* name : {"metric", "tau_or_epsilon", "value", "std_error_or_quad_error", "n_samples", "seed",
                             "window_radius", "analytic", "quad_error", "mc_mean", "mc_std_error", "z_score",
                             "verdict", "error"}) {
      c.emplace_back(name);
    }
    return c;
  }();
  return columns;
}

std::string format_csv(const std::vector<Row>& rows, bool timestamp) {
  std::ostringstream os;
  if (timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "# generated " << buf << '\n';
  }
  const auto& columns = csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    const auto cells = row_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }
  return os.str();
}

std::string format_json(const std::vector<Row>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    for (const auto& name : config_field_names()) j[name] = json_number(config_field(r.config, name));
    j["metric"] = r.metric;
    j["tau_or_epsilon"] = json_number(r.tau_or_epsilon);
    j["value"] = json_number(r.value);
    j["std_error_or_quad_error"] = json_number(r.std_error_or_quad_error);
    j["n_samples"] = r.n_samples ? nlohmann::ordered_json(*r.n_samples) : nlohmann::ordered_json(nullptr);
    j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
    j["window_radius"] = json_number(r.window_radius);
    j["analytic"] = json_number(r.analytic);
    j["quad_error"] = json_number(r.quad_error);
    j["mc_mean"] = json_number(r.mc_mean);
    j["mc_std_error"] = json_number(r.mc_std_error);
    j["z_score"] = json_number(r.z_score);
    j["verdict"] = r.verdict.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.verdict);
    j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

RunRequest parse_args(int argc, const char* const* argv, const char* env_seed) {
  Parser p;
  p.app.parse(argc, argv);
  return p.request(env_seed);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Parser p;
  try {
    p.app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return p.app.exit(e, out, err);
  }
  try {
    const RunRequest req = p.request(std::getenv("VANET_SEED"));
    const std::vector<Row> rows = run_rows(req);
    const std::string csv = format_csv(rows, req.timestamp);
    if (req.output_path.empty()) {
      out << csv;
    } else {
      write_file(req.output_path, csv);
      std::filesystem::path mirror = req.output_path;
      mirror.replace_extension(".json");
      if (mirror == req.output_path) mirror += ".json";
      write_file(mirror, format_json(rows));
    }
    for (const auto& r : rows) {
      if (!r.error.empty() || r.verdict == "fail") return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace v2x::cli
