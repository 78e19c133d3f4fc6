#include "earlystop/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "earlystop/csv_io.hpp"
#include "earlystop/errors.hpp"
#include "earlystop/svg_plot.hpp"

namespace earlystop {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw validation_error("empty list value");
  return out;
}

long long parse_ll(const std::string& s) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw validation_error("cannot parse integer: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw validation_error("cannot parse unsigned integer: " + s);
  return v;
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) throw validation_error("n and p must be >= 1");
  if (!(cfg.alpha >= 0.0)) throw validation_error("alpha must be >= 0");
  if (!(cfg.tau >= 0.0)) throw validation_error("tau must be >= 0");
  if (cfg.ms.empty()) throw validation_error("ms must be non-empty");
  for (double m : cfg.ms)
    if (!(m >= 0.0)) throw validation_error("every m must be >= 0");
  if (!(cfg.eta_scale > 0.0)) throw validation_error("eta_scale must be > 0");
  if (cfg.trials < 0) throw validation_error("trials must be >= 0");
  if (cfg.curve_points < 2) throw validation_error("curve_points must be >= 2");
  if (!(cfg.lambda >= 0.0)) throw validation_error("lambda must be >= 0");
}

double resolve_sigma2(const ExperimentConfig& cfg) {
  return cfg.sigma2 < 0.0 ? 1.0 / static_cast<double>(cfg.p) : cfg.sigma2;
}

}  // namespace

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("config line " + std::to_string(line_no) + " is not key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "n") base.n = static_cast<int>(parse_ll(val));
    else if (key == "p") base.p = static_cast<int>(parse_ll(val));
    else if (key == "alpha") base.alpha = parse_double(val);
    else if (key == "tau") base.tau = parse_double(val);
    else if (key == "sigma2") base.sigma2 = parse_double(val);
    else if (key == "ms") base.ms = parse_double_list(val);
    else if (key == "eta_scale") base.eta_scale = parse_double(val);
    else if (key == "trials") base.trials = static_cast<int>(parse_ll(val));
    else if (key == "k_max") base.k_max = parse_ll(val);
    else if (key == "curve_points") base.curve_points = static_cast<int>(parse_ll(val));
    else if (key == "seed") base.seed = parse_u64(val);
    else if (key == "out_dir") base.out_dir = val;
    else if (key == "lambda") base.lambda = parse_double(val);
    else throw validation_error("unknown config key: " + key);
  }
  return base;
}

void apply_env_seed(ExperimentConfig& cfg) {
  const char* env = std::getenv("EARLYSTOP_SEED");
  if (env == nullptr || *env == '\0') return;
  cfg.seed = parse_u64(env);
}

Eigen::MatrixXd sample_powerlaw_matrix(int n, int p, double alpha, SubRng& rng) {
  if (n < 1 || p < 1) throw validation_error("n and p must be >= 1");
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) scale(j) = std::pow(static_cast<double>(j + 1), -alpha / 2.0);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.gaussian() * scale(j);
  return X;
}

GeneratedProblem gen_powerlaw_data(const ExperimentConfig& cfg) {
  check_config(cfg);
  const double sigma2 = resolve_sigma2(cfg);
  const double sd_init = std::sqrt(sigma2);

  SubRng data_rng(cfg.seed, kStreamData);
  Eigen::MatrixXd X = sample_powerlaw_matrix(cfg.n, cfg.p, cfg.alpha, data_rng);

  SubRng init_rng(cfg.seed, kStreamInit);
  Eigen::VectorXd beta_star(cfg.p);
  for (int j = 0; j < cfg.p; ++j) beta_star(j) = init_rng.gaussian(sd_init);

  SubRng noise_rng(cfg.seed, kStreamNoise);
  Eigen::VectorXd eps(cfg.n);
  for (int i = 0; i < cfg.n; ++i) eps(i) = noise_rng.gaussian(cfg.tau);

  GeneratedProblem out;
  out.sd = decompose(X, X * beta_star + eps);
  out.spec.beta_star = beta_star;
  out.spec.beta0 = Eigen::VectorXd::Zero(cfg.p);
  out.spec.tau2 = cfg.tau * cfg.tau;
  out.spec.sigma2 = sigma2;
  out.spec.lambda = cfg.lambda;
  Eigen::VectorXd diag(cfg.p);
  for (int j = 0; j < cfg.p; ++j) diag(j) = std::pow(static_cast<double>(j + 1), -cfg.alpha);
  out.spec.Sigma_test = diag.asDiagonal();
  validate_problem_spec(out.spec, cfg.p);
  return out;
}

std::vector<long long> log_grid(long long k_max, int points) {
  if (k_max < 0) throw validation_error("k_max must be >= 0");
  if (points < 2) throw validation_error("points must be >= 2");
  std::set<long long> ks;
  for (long long k = 0; k <= std::min<long long>(10, k_max); ++k) ks.insert(k);
  if (k_max > 10) {
    const double lo = std::log(10.0), hi = std::log(static_cast<double>(k_max));
    for (int i = 0; i <= points; ++i) {
      double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points);
      ks.insert(std::llround(std::exp(t)));
    }
    ks.insert(k_max);
  }
  return {ks.begin(), ks.end()};
}

Figure1Result run_figure1(const ExperimentConfig& cfg) {
  check_config(cfg);
  Figure1Result result;
  result.cfg = cfg;
  result.cfg.sigma2 = resolve_sigma2(cfg);

  GeneratedProblem gen = gen_powerlaw_data(result.cfg);
  const SpectralData& sd = gen.sd;
  const ProblemSpec& spec = gen.spec;

  if (!(sd.lambda_max() > 0.0)) throw numerical_error("design has no signal");
  result.eta = cfg.eta_scale / sd.lambda_max();

  if (result.cfg.k_max < 0) {
    AggregateStop agg = aggregate_stop(sd, spec, Schedule::constant(result.eta));
    long long base = agg.never ? 200000 : static_cast<long long>(std::ceil(agg.k_real));
    result.cfg.k_max = std::clamp<long long>(20 * base, 50, 200000);
  }
  result.grid = log_grid(result.cfg.k_max, result.cfg.curve_points);

  for (double m : result.cfg.ms) {
    Figure1Cell cell;
    cell.m = m;
    Schedule s = Schedule::polynomial(result.eta, m);
    cell.curve = risk_curve_analytic(sd, spec, s, result.grid, InitMode::random_init);
    if (result.cfg.trials > 0) {
      std::vector<McRisk> mc = mc_risk_curve(sd, spec, s, result.grid, result.cfg.trials,
                                             result.cfg.seed, InitMode::random_init);
      cell.curve.mc_mean.resize(mc.size());
      cell.curve.mc_stderr.resize(mc.size());
      for (size_t i = 0; i < mc.size(); ++i) {
        cell.curve.mc_mean[i] = mc[i].mean;
        cell.curve.mc_stderr[i] = mc[i].se;
      }
    }
    cell.stopping = make_stopping_report(sd, spec, s, result.cfg.k_max);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

void write_risk_curve_csv(const std::string& path, const RiskCurve& curve) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvTable t;
  t.header = {"k", "risk", "bias", "variance", "mc_mean", "mc_stderr"};
  for (size_t i = 0; i < curve.ks.size(); ++i) {
    t.rows.push_back({std::to_string(curve.ks[i]), format_double(curve.risk[i]),
                      format_double(curve.bias[i]), format_double(curve.variance[i]),
                      format_double(curve.mc_mean.empty() ? nan : curve.mc_mean[i]),
                      format_double(curve.mc_stderr.empty() ? nan : curve.mc_stderr[i])});
  }
  write_csv(path, t);
}

RiskCurve read_risk_curve_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  const std::vector<std::string> want = {"k", "risk", "bias", "variance", "mc_mean", "mc_stderr"};
  if (t.header != want) throw validation_error("unexpected risk-curve header in " + path);
  RiskCurve c;
  for (const auto& row : t.rows) {
    if (row.size() != 6) throw validation_error("short risk-curve row in " + path);
    c.ks.push_back(parse_ll(row[0]));
    c.risk.push_back(parse_double(row[1]));
    c.bias.push_back(parse_double(row[2]));
    c.variance.push_back(parse_double(row[3]));
    c.mc_mean.push_back(parse_double(row[4]));
    c.mc_stderr.push_back(parse_double(row[5]));
  }
  return c;
}

void write_summary_csv(const std::string& path, const Figure1Result& result) {
  CsvTable t;
  t.header = {"m", "true_k", "est_k", "raskutti_k", "min_risk", "risk_at_est"};
  for (const Figure1Cell& cell : result.cells) {
    const StoppingReport& rep = cell.stopping;
    t.rows.push_back({format_double(cell.m), std::to_string(rep.true_k),
                      std::to_string(rep.estimate_k),
                      rep.raskutti_k ? std::to_string(*rep.raskutti_k) : "",
                      format_double(rep.risk_at_true), format_double(rep.risk_at_estimate)});
  }
  write_csv(path, t);
}

void write_stopping_csv(const std::string& path, const StoppingReport& report) {
  CsvTable t;
  t.header = {"j", "target_phi", "k_real", "never"};
  for (const DirectionStop& d : report.per_direction)
    t.rows.push_back({std::to_string(d.j), format_double(d.target_phi),
                      format_double(d.k_real), d.never ? "1" : "0"});
  t.rows.push_back({"-1", format_double(report.aggregate.target_phi),
                    format_double(report.aggregate.k_real),
                    report.aggregate.never ? "1" : "0"});
  write_csv(path, t);
}

std::string m_tag(double m) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", m);
  return buf;
}

void write_figure1_outputs(const Figure1Result& result) {
  namespace fs = std::filesystem;
  const fs::path dir(result.cfg.out_dir);
  fs::create_directories(dir);

  std::vector<SvgPanel> panels;
  for (const Figure1Cell& cell : result.cells) {
    const std::string tag = m_tag(cell.m);
    write_risk_curve_csv((dir / ("risk_m" + tag + ".csv")).string(), cell.curve);
    write_stopping_csv((dir / ("stopping_m" + tag + ".csv")).string(), cell.stopping);

    SvgPanel panel;
    panel.title = "m=" + tag;
    SvgCurve analytic;
    analytic.label = "risk";
    for (size_t i = 0; i < cell.curve.ks.size(); ++i) {
      analytic.x.push_back(static_cast<double>(cell.curve.ks[i]));
      analytic.y.push_back(cell.curve.risk[i]);
    }
    panel.curves.push_back(std::move(analytic));
    if (!cell.curve.mc_mean.empty()) {
      SvgCurve mc;
      mc.color = "#ff7f0e";
      mc.dashed = true;
      mc.label = "MC";
      for (size_t i = 0; i < cell.curve.ks.size(); ++i) {
        mc.x.push_back(static_cast<double>(cell.curve.ks[i]));
        mc.y.push_back(cell.curve.mc_mean[i]);
      }
      panel.curves.push_back(std::move(mc));
    }
    panel.markers.push_back({static_cast<double>(cell.stopping.true_k), "#2ca02c", "true"});
    panel.markers.push_back({static_cast<double>(cell.stopping.estimate_k), "#9467bd", "est"});
    panels.push_back(std::move(panel));
  }
  write_summary_csv((dir / "summary.csv").string(), result);
  write_svg_panels((dir / "figure1.svg").string(), panels, 4);

  std::ofstream meta(dir / "metadata.txt", std::ios::binary);
  if (!meta) throw validation_error("cannot write metadata.txt");
  const ExperimentConfig& c = result.cfg;
  meta << "n=" << c.n << "\n"
       << "p=" << c.p << "\n"
       << "alpha=" << format_double(c.alpha) << "\n"
       << "tau=" << format_double(c.tau) << "\n"
       << "sigma2=" << format_double(c.sigma2) << "\n";
  meta << "ms=";
  for (size_t i = 0; i < c.ms.size(); ++i) meta << (i ? "," : "") << format_double(c.ms[i]);
  meta << "\n";
  meta << "eta_scale=" << format_double(c.eta_scale) << "\n"
       << "eta=" << format_double(result.eta) << "\n"
       << "lambda=" << format_double(c.lambda) << "\n"
       << "trials=" << c.trials << "\n"
       << "k_max=" << c.k_max << "\n"
       << "curve_points=" << c.curve_points << "\n"
       << "seed=" << c.seed << "\n"
       << "rng=" << SubRng::name() << "\n";
  meta << "grid=";
  for (size_t i = 0; i < result.grid.size(); ++i) meta << (i ? "," : "") << result.grid[i];
  meta << "\n";
}

}  // namespace earlystop
