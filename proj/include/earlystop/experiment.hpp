#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "earlystop/risk.hpp"
#include "earlystop/rng.hpp"
#include "earlystop/spectral.hpp"
#include "earlystop/stopping.hpp"

namespace earlystop {

// Synthetic power-law study: risk curves with true and estimated stopping
// markers across polynomial step-size decays m, one figure panel per m.
struct ExperimentConfig {
  int n = 100;
  int p = 40;
  double alpha = 2.0;
  double tau = 1.0;
  double sigma2 = -1.0;  // < 0 resolves to 1/p when data is generated
  std::vector<double> ms = {0.0, 0.25, 0.5, 0.75};
  double eta_scale = 0.9;  // eta = eta_scale / lambda_max(Sigma_hat)
  int trials = 256;        // Monte-Carlo overlay sample count; 0 disables
  long long k_max = -1;    // < 0 resolves to 20x the m=0 aggregate estimate
  int curve_points = 120;
  std::uint64_t seed = 12345;
  std::string out_dir = "fig1_out";
  double lambda = 0.0;
};

// Flat key=value lines, '#' starts a comment; unknown keys are rejected.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});
// EARLYSTOP_SEED, when set, replaces the seed. The CLI applies explicit
// --seed flags after this call, so flags outrank the environment.
void apply_env_seed(ExperimentConfig& cfg);

// Rows are x = Sigma^{1/2} z with z iid standard normal, so E[x x^T] =
// Sigma = diag(j^-alpha).
Eigen::MatrixXd sample_powerlaw_matrix(int n, int p, double alpha, SubRng& rng);

struct GeneratedProblem {
  SpectralData sd;
  ProblemSpec spec;
};
// Sub-streams: data, then beta_star (variance sigma2, with beta0 = 0), then
// noise (variance tau^2). Sigma_test = diag(j^-alpha).
GeneratedProblem gen_powerlaw_data(const ExperimentConfig& cfg);

// 0..10 stepwise, then log-spaced up to and including k_max.
std::vector<long long> log_grid(long long k_max, int points);

struct Figure1Cell {
  double m = 0.0;
  RiskCurve curve;
  StoppingReport stopping;
};
struct Figure1Result {
  ExperimentConfig cfg;  // with sigma2 and k_max resolved
  double eta = 0.0;
  std::vector<long long> grid;
  std::vector<Figure1Cell> cells;
};
Figure1Result run_figure1(const ExperimentConfig& cfg);

// Columns k,risk,bias,variance,mc_mean,mc_stderr; the MC columns are nan
// when no overlay was computed. Values round-trip bit-exactly.
void write_risk_curve_csv(const std::string& path, const RiskCurve& curve);
RiskCurve read_risk_curve_csv(const std::string& path);
// Columns m,true_k,est_k,raskutti_k,min_risk,risk_at_est; raskutti_k is
// empty when the criterion never fires within k_max.
void write_summary_csv(const std::string& path, const Figure1Result& result);
// Per-direction rows j,target_phi,k_real,never; final row j = -1 holds the
// aggregate stop.
void write_stopping_csv(const std::string& path, const StoppingReport& report);

// Emits risk_m<tag>.csv, stopping_m<tag>.csv, summary.csv, figure1.svg, and
// metadata.txt into cfg.out_dir.
void write_figure1_outputs(const Figure1Result& result);

std::string m_tag(double m);

}  // namespace earlystop
