#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "earlystop/csv_io.hpp"
#include "earlystop/equivalence.hpp"
#include "earlystop/errors.hpp"
#include "earlystop/experiment.hpp"
#include "earlystop/phi.hpp"
#include "earlystop/risk.hpp"
#include "earlystop/schedule.hpp"
#include "earlystop/spectral.hpp"
#include "earlystop/stopping.hpp"
#include "earlystop/trajectory.hpp"

namespace es = earlystop;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(es::parse_double(item));
  if (out.empty()) throw es::validation_error("empty numeric list");
  return out;
}

// constant:E | poly:E,M | additive:E0,E | exp:Q | explicit:E1,E2,... | cyclic:T:inner
es::Schedule parse_schedule(const std::string& s) {
  size_t colon = s.find(':');
  std::string fam = s.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (rest.empty()) throw es::validation_error("schedule needs parameters: " + s);
  if (fam == "constant") return es::Schedule::constant(es::parse_double(rest));
  if (fam == "poly") {
    std::vector<double> a = parse_list(rest);
    if (a.size() != 2) throw es::validation_error("poly takes eta,m");
    return es::Schedule::polynomial(a[0], a[1]);
  }
  if (fam == "additive") {
    std::vector<double> a = parse_list(rest);
    if (a.size() != 2) throw es::validation_error("additive takes eta0,eta");
    return es::Schedule::additive_decay(a[0], a[1]);
  }
  if (fam == "exp") return es::Schedule::exponential(es::parse_double(rest));
  if (fam == "explicit") return es::Schedule::explicit_rates(parse_list(rest));
  if (fam == "cyclic") {
    size_t c2 = rest.find(':');
    if (c2 == std::string::npos) throw es::validation_error("cyclic takes period:inner");
    char* end = nullptr;
    long long period = std::strtoll(rest.c_str(), &end, 10);
    if (end != rest.c_str() + c2) throw es::validation_error("bad cyclic period in: " + s);
    return es::Schedule::cyclic(parse_schedule(rest.substr(c2 + 1)), period);
  }
  throw es::validation_error("unknown schedule family: " + fam);
}

struct Holder {
  es::ExperimentConfig cfg;  // filled by resolve(); defaults live in ExperimentConfig
  int n = 0, p = 0, trials = 0, curve_points = 0;
  double alpha = 0, tau = 0, sigma2 = 0, eta_scale = 0, lambda = 0, m = 0, tol = 1e-8;
  std::uint64_t seed = 0;
  long long k_max = 0, k = 10;
  std::string out, config, x_path, y_path, beta_star_path, schedule, mode = "random";
  bool all_configs = false;
};

void add_common(CLI::App* sub, Holder& h) {
  sub->add_option("--config", h.config, "flat key=value config file");
  sub->add_option("--n", h.n, "sample count for synthetic data");
  sub->add_option("--p", h.p, "dimension for synthetic data");
  sub->add_option("--alpha", h.alpha, "power-law exponent of Sigma");
  sub->add_option("--tau", h.tau, "noise standard deviation");
  sub->add_option("--sigma2", h.sigma2, "init/target spread (default 1/p)");
  sub->add_option("--eta-scale", h.eta_scale, "eta = eta-scale / lambda_max(Sigma_hat)");
  sub->add_option("--lambda", h.lambda, "explicit ridge strength");
  sub->add_option("--seed", h.seed, "RNG seed (outranks EARLYSTOP_SEED)");
  sub->add_option("--k-max", h.k_max, "largest iteration considered");
  sub->add_option("--trials", h.trials, "Monte-Carlo trials (0 disables)");
  sub->add_option("--curve-points", h.curve_points, "log-grid size for risk curves");
  sub->add_option("--out", h.out, "output file or directory");
  sub->add_option("--X", h.x_path, "design matrix CSV (rows = samples)");
  sub->add_option("--y", h.y_path, "response vector CSV (one value per row)");
  sub->add_option("--beta-star", h.beta_star_path, "population optimum CSV");
  sub->add_option("--schedule", h.schedule,
                  "constant:E | poly:E,M | additive:E0,E | exp:Q | explicit:... | cyclic:T:inner"
                  " (default: poly with eta-scale/lambda_max and --m)");
  sub->add_option("--m", h.m, "polynomial decay power for the default schedule");
}

void resolve(const CLI::App* sub, Holder& h) {
  es::ExperimentConfig cfg;
  if (!h.config.empty()) cfg = es::load_config_file(h.config, cfg);
  es::apply_env_seed(cfg);
  if (sub->count("--n")) cfg.n = h.n;
  if (sub->count("--p")) cfg.p = h.p;
  if (sub->count("--alpha")) cfg.alpha = h.alpha;
  if (sub->count("--tau")) cfg.tau = h.tau;
  if (sub->count("--sigma2")) cfg.sigma2 = h.sigma2;
  if (sub->count("--eta-scale")) cfg.eta_scale = h.eta_scale;
  if (sub->count("--lambda")) cfg.lambda = h.lambda;
  if (sub->count("--seed")) cfg.seed = h.seed;
  if (sub->count("--k-max")) cfg.k_max = h.k_max;
  if (sub->count("--trials")) cfg.trials = h.trials;
  if (sub->count("--curve-points")) cfg.curve_points = h.curve_points;
  if (sub->count("--out")) cfg.out_dir = h.out;
  h.cfg = cfg;
}

struct Instance {
  es::SpectralData sd;
  es::ProblemSpec spec;
};

Instance make_instance(const Holder& h) {
  if (h.x_path.empty()) {
    es::GeneratedProblem g = es::gen_powerlaw_data(h.cfg);
    return {std::move(g.sd), std::move(g.spec)};
  }
  if (h.y_path.empty()) throw es::validation_error("--y is required with --X");
  Eigen::MatrixXd X = es::load_matrix_csv(h.x_path);
  Eigen::VectorXd y = es::load_vector_csv(h.y_path);
  Instance inst;
  inst.sd = es::decompose(X, y);
  const int p = inst.sd.p;
  inst.spec.beta_star = h.beta_star_path.empty() ? Eigen::VectorXd::Zero(p).eval()
                                                 : es::load_vector_csv(h.beta_star_path);
  inst.spec.beta0 = Eigen::VectorXd::Zero(p);
  inst.spec.tau2 = h.cfg.tau * h.cfg.tau;
  inst.spec.sigma2 = h.cfg.sigma2 < 0 ? 1.0 / p : h.cfg.sigma2;
  inst.spec.lambda = h.cfg.lambda;
  inst.spec.Sigma_test = Eigen::MatrixXd::Identity(p, p);
  es::validate_problem_spec(inst.spec, p);
  return inst;
}

es::Schedule make_schedule(const Holder& h, const es::SpectralData& sd) {
  if (!h.schedule.empty()) return parse_schedule(h.schedule);
  if (!(sd.lambda_max() > 0)) throw es::validation_error("design has no signal");
  return es::Schedule::polynomial(h.cfg.eta_scale / sd.lambda_max(), h.m);
}

long long resolve_k_max(const Holder& h, const Instance& inst, const es::Schedule& s) {
  if (h.cfg.k_max >= 0) return h.cfg.k_max;
  es::AggregateStop agg = es::aggregate_stop(inst.sd, inst.spec, s);
  long long base = agg.never ? 200000 : static_cast<long long>(std::ceil(agg.k_real));
  return std::clamp<long long>(20 * base, 50, 200000);
}

int cmd_trajectory(const Holder& h) {
  Instance inst = make_instance(h);
  es::Schedule s = make_schedule(h, inst.sd);
  es::TrajectoryPoint closed = es::closed_form_beta(inst.sd, inst.spec, s, h.k);
  Eigen::VectorXd iterative = es::gd_final(inst.sd, inst.spec, s, h.k);
  double rel = (closed.beta - iterative).norm() / (1.0 + iterative.norm());
  std::cout << "schedule " << s.describe() << ", k=" << h.k << ", n=" << inst.sd.n
            << ", p=" << inst.sd.p << ", rank=" << inst.sd.rank << "\n";
  std::cout << "closed-form |beta_k| = " << es::format_double(closed.beta.norm())
            << ", iterative deviation = " << es::format_double(rel) << "\n";
  if (!h.out.empty()) {
    es::CsvTable t;
    t.header = {"j", "beta_closed", "beta_iterative"};
    for (int j = 0; j < inst.sd.p; ++j)
      t.rows.push_back({std::to_string(j), es::format_double(closed.beta(j)),
                        es::format_double(iterative(j))});
    es::write_csv(h.out, t);
    std::cout << "wrote " << h.out << "\n";
  }
  return 0;
}

int cmd_risk(const Holder& h) {
  Instance inst = make_instance(h);
  es::Schedule s = make_schedule(h, inst.sd);
  es::InitMode mode = h.mode == "fixed" ? es::InitMode::fixed_init : es::InitMode::random_init;
  if (h.mode != "fixed" && h.mode != "random")
    throw es::validation_error("--mode must be fixed or random");
  long long k_max = resolve_k_max(h, inst, s);
  std::vector<long long> grid = es::log_grid(k_max, h.cfg.curve_points);
  es::RiskCurve curve = es::risk_curve_analytic(inst.sd, inst.spec, s, grid, mode);
  if (h.cfg.trials > 0) {
    std::vector<es::McRisk> mc = es::mc_risk_curve(inst.sd, inst.spec, s, grid, h.cfg.trials,
                                                   h.cfg.seed, mode);
    for (const es::McRisk& r : mc) {
      curve.mc_mean.push_back(r.mean);
      curve.mc_stderr.push_back(r.se);
    }
  }
  size_t best = 0;
  for (size_t i = 1; i < curve.risk.size(); ++i)
    if (curve.risk[i] < curve.risk[best]) best = i;
  std::cout << curve.meta << "\n";
  std::cout << "grid minimum risk " << es::format_double(curve.risk[best]) << " at k="
            << curve.ks[best] << " (k_max=" << k_max << ")\n";
  std::string out = h.out.empty() ? "risk.csv" : h.out;
  es::write_risk_curve_csv(out, curve);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_stop(const Holder& h) {
  Instance inst = make_instance(h);
  es::Schedule s = make_schedule(h, inst.sd);
  long long k_max = resolve_k_max(h, inst, s);
  es::StoppingReport rep = es::make_stopping_report(inst.sd, inst.spec, s, k_max);
  std::cout << "schedule " << s.describe() << ", k_max=" << k_max << "\n";
  std::cout << "aggregate: mean sample eigenvalue = "
            << es::format_double(rep.aggregate.mean_sample_eig)
            << ", target phi = " << es::format_double(rep.aggregate.target_phi)
            << ", k_real = " << es::format_double(rep.aggregate.k_real)
            << (rep.aggregate.never ? " (never)" : "") << "\n";
  std::cout << "estimate_k = " << rep.estimate_k << ", true_k = " << rep.true_k
            << ", raskutti_k = "
            << (rep.raskutti_k ? std::to_string(*rep.raskutti_k) : std::string("none")) << "\n";
  std::cout << "risk at estimate = " << es::format_double(rep.risk_at_estimate)
            << ", risk at true = " << es::format_double(rep.risk_at_true) << "\n";
  if (!h.out.empty()) {
    es::write_stopping_csv(h.out, rep);
    std::cout << "wrote " << h.out << "\n";
  }
  return 0;
}

int cmd_equivalence(const Holder& h) {
  Instance inst = make_instance(h);
  es::Schedule s = make_schedule(h, inst.sd);
  es::EquivalenceReport rep = es::verify_equivalence(inst.sd, inst.spec, s, h.k, h.tol);
  if (!rep.note.empty()) throw es::validation_error(rep.note);
  std::cout << "T=" << rep.T << ", max relative error = " << es::format_double(rep.max_rel_err)
            << ", " << (rep.pass ? "PASS" : "FAIL") << "\n";
  if (!rep.pass)
    throw es::numerical_error("stopped solution and generalized ridge solution disagree");
  return 0;
}

int cmd_reproduce(const Holder& h) {
  if (!h.all_configs) {
    es::Figure1Result r = es::run_figure1(h.cfg);
    es::write_figure1_outputs(r);
    std::cout << "wrote " << r.cfg.out_dir << " (k_max=" << r.cfg.k_max << ", "
              << r.cells.size() << " panels)\n";
    return 0;
  }
  struct Cell {
    int n, p;
    double tau, alpha;
    const char* name;
  };
  const Cell cells[] = {{100, 40, 1.0, 2.0, "p40_n100_alpha2"},
                        {100, 40, 1.0, 4.0, "p40_n100_alpha4"},
                        {40, 100, 0.15, 2.0, "p100_n40_alpha2"},
                        {40, 100, 0.15, 4.0, "p100_n40_alpha4"}};
  namespace fs = std::filesystem;
  for (const Cell& c : cells) {
    es::ExperimentConfig cfg = h.cfg;
    cfg.n = c.n;
    cfg.p = c.p;
    cfg.tau = c.tau;
    cfg.alpha = c.alpha;
    cfg.out_dir = (fs::path(h.cfg.out_dir) / c.name).string();
    es::Figure1Result r = es::run_figure1(cfg);
    es::write_figure1_outputs(r);
    std::cout << "wrote " << r.cfg.out_dir << " (k_max=" << r.cfg.k_max << ")\n";
  }
  return 0;
}

int cmd_selftest(const Holder& h) {
  es::ExperimentConfig cfg = h.cfg;
  cfg.n = 12;
  cfg.p = 6;
  cfg.trials = 0;
  es::GeneratedProblem g = es::gen_powerlaw_data(cfg);
  const double eta = 0.9 / g.sd.lambda_max();

  const double zeta = 0.8 * g.sd.lambda_max();
  const es::Schedule fams[] = {es::Schedule::constant(eta), es::Schedule::polynomial(eta, 1.0),
                               es::Schedule::additive_decay(eta, eta / 40.0),
                               es::Schedule::exponential(0.7)};
  for (const es::Schedule& s : fams) {
    double closed = es::phi_extended(s, zeta, 17).value();
    double product = es::phi_product(s, zeta, 17).value();
    if (std::abs(closed - product) > 1e-9 * (1.0 + std::abs(product)))
      throw es::numerical_error("phi closed form disagrees with direct product");
  }

  es::Schedule s = es::Schedule::polynomial(eta, 0.5);
  es::TrajectoryPoint closed = es::closed_form_beta(g.sd, g.spec, s, 23);
  Eigen::VectorXd iterative = es::gd_final(g.sd, g.spec, s, 23);
  if ((closed.beta - iterative).norm() > 1e-8 * (1.0 + iterative.norm()))
    throw es::numerical_error("closed-form trajectory disagrees with iteration");

  es::EquivalenceReport rep = es::verify_equivalence(g.sd, g.spec, s, 23);
  if (!rep.pass) throw es::numerical_error("ridge equivalence check failed");

  es::RiskScan scan = es::risk_scan(g.sd, g.spec, s, 50, es::InitMode::random_init);
  for (size_t i = 0; i < scan.risk.size(); ++i)
    if (std::abs(scan.bias[i] + scan.variance[i] - scan.risk[i]) > 1e-12)
      throw es::numerical_error("risk does not equal bias plus variance");

  std::cout << "selftest: all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact gradient-descent trajectories, risk curves, and stopping rules "
               "for linear and ridge regression"};
  app.require_subcommand(1);
  Holder h;

  CLI::App* traj = app.add_subcommand("trajectory", "closed-form iterate vs literal iteration");
  add_common(traj, h);
  traj->add_option("--k", h.k, "iteration to evaluate");

  CLI::App* risk = app.add_subcommand("risk", "analytic risk curve with optional MC overlay");
  add_common(risk, h);
  risk->add_option("--mode", h.mode, "fixed | random initialization model");

  CLI::App* stop = app.add_subcommand("stop", "stopping-time estimates and true optimum");
  add_common(stop, h);

  CLI::App* equiv = app.add_subcommand("equivalence-check",
                                       "stopped solution vs generalized ridge solution");
  add_common(equiv, h);
  equiv->add_option("--k", h.k, "stopping iteration T");
  equiv->add_option("--tol", h.tol, "relative tolerance");

  CLI::App* fig = app.add_subcommand("reproduce-fig1", "power-law risk-curve study");
  add_common(fig, h);
  fig->add_flag("--all", h.all_configs, "run all four data configurations");

  CLI::App* self = app.add_subcommand("selftest", "fast internal consistency checks");
  add_common(self, h);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    resolve(sub, h);
    if (sub == traj) return cmd_trajectory(h);
    if (sub == risk) return cmd_risk(h);
    if (sub == stop) return cmd_stop(h);
    if (sub == equiv) return cmd_equivalence(h);
    if (sub == fig) return cmd_reproduce(h);
    if (sub == self) return cmd_selftest(h);
    throw es::validation_error("no subcommand selected");
  } catch (const es::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
