// Copyright 2026 The subgauss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: accounting queries, noise calibration, the
// convergence and conjecture sweeps, the numerical verifiers, and the
// gradient-variance simulator. All outputs are deterministic given the
// flags (and seed, where one applies); sweep progress goes to stderr so
// stdout and the CSV files stay machine-clean.
//
// Exit codes: 0 success, 2 usage error, 3 accountant grid overflow,
// 4 calibration failure, 5 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subgauss/asymptotics.hpp"
#include "subgauss/calibrator.hpp"
#include "subgauss/errors.hpp"
#include "subgauss/gradient_variance.hpp"
#include "subgauss/mechanism.hpp"
#include "subgauss/pld.hpp"
#include "subgauss/single_step.hpp"
#include "subgauss/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitGridOverflow = 3;
constexpr int kExitCalibration = 4;
constexpr int kExitVerification = 5;

struct AccountantFlags {
  double grid_step = subgauss::AccountantConfig{}.grid_step;
  double tail_budget = subgauss::AccountantConfig{}.tail_mass_budget;
  std::int64_t max_grid_points = subgauss::AccountantConfig{}.max_grid_points;

  subgauss::AccountantConfig config() const {
    subgauss::AccountantConfig cfg;
    cfg.grid_step = grid_step;
    cfg.tail_mass_budget = tail_budget;
    cfg.max_grid_points = max_grid_points;
    return cfg;
  }
};

void add_accountant_flags(CLI::App* cmd, AccountantFlags* flags) {
  cmd->add_option("--grid-step", flags->grid_step, "PLD grid step in loss units");
  cmd->add_option("--tail-budget", flags->tail_budget,
                  "truncated tail mass per side");
  cmd->add_option("--max-grid-points", flags->max_grid_points,
                  "grid size limit");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  return out;
}

// Synthetic per-example gradients: deterministic standard normal entries
// from the seed, so simulator runs are reproducible end to end.
subgauss::GradientSet synthetic_gradients(int vectors, int dim, double clip,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  subgauss::GradientSet grads;
  grads.clip_threshold = clip;
  grads.vectors.resize(vectors);
  for (auto& v : grads.vectors) {
    v.resize(dim);
    for (double& x : v) x = normal(rng);
  }
  return grads;
}

int run_delta(double sigma, double q, std::int64_t iterations, double epsilon,
              const AccountantFlags& flags, const std::string& mode,
              const std::string& dump_path) {
  const subgauss::Rounding rounding = (mode == "optimistic")
                                          ? subgauss::Rounding::kOptimistic
                                          : subgauss::Rounding::kPessimistic;
  const subgauss::PrivacyLossFn fn(sigma, q);
  const subgauss::DiscretePld single = discretize(fn, flags.config(), rounding);
  const subgauss::DiscretePld composed =
      self_compose(single, iterations, flags.config());
  if (!dump_path.empty()) {
    std::ofstream dump = open_output(dump_path);
    subgauss::dump_csv(composed, dump);
  }
  std::printf("%.6e\n", delta_from_pld(composed, epsilon));
  return kExitOk;
}

int run_calibrate(double q, std::int64_t iterations, double epsilon,
                  double delta, double rel_tol, const AccountantFlags& flags) {
  subgauss::CalibrationConfig cfg;
  cfg.accountant = flags.config();
  cfg.relative_tolerance = rel_tol;
  const subgauss::CalibrationResult result =
      subgauss::calibrate_sigma(q, iterations, epsilon, delta, cfg);
  std::printf("sigma=%.12e sigma_eff=%.12e achieved_delta=%.12e\n",
              result.sigma, result.sigma_eff, result.achieved_delta);
  return kExitOk;
}

int run_convergence_sweep(const subgauss::SweepSpec& spec,
                          const std::string& output_path) {
  std::ofstream out = open_output(output_path);
  out << "epsilon,q,T,sigma,sigma_eff,sigma_full_batch,ratio\n";
  char line[256];
  const auto on_row = [&](const subgauss::ConvergenceRow& row) {
    std::snprintf(line, sizeof(line),
                  "%.10g,%.10g,%lld,%.12e,%.12e,%.12e,%.12e\n", row.epsilon,
                  row.q, static_cast<long long>(row.iterations), row.sigma,
                  row.sigma_eff, row.sigma_full_batch, row.ratio);
    out << line;
    out.flush();
  };
  const auto progress = [](const std::string& msg) {
    std::cerr << msg << "\n";
  };
  try {
    subgauss::run_convergence_sweep(spec, on_row, progress);
  } catch (const std::exception& e) {
    out << "# error: " << e.what() << "\n";
    out.flush();
    throw;
  }
  return kExitOk;
}

int run_conjecture_sweep(const subgauss::ConjectureSweepConfig& cfg,
                         const std::string& output_path) {
  std::ofstream out = open_output(output_path);
  out << "epsilon,max_a_minus_b,argmax_q,argmax_sigma,achieved_delta\n";
  const auto progress = [](int done, int total) {
    std::fprintf(stderr, "epsilon %d/%d\n", done, total);
  };
  const auto rows = subgauss::conjecture_sweep(cfg, progress);
  char line[256];
  for (const auto& row : rows) {
    if (!row.feasible_found) {
      std::fprintf(stderr, "warning: no feasible (q, sigma) cell at epsilon=%g\n",
                   row.epsilon);
    }
    std::snprintf(line, sizeof(line), "%.12e,%.12e,%.12e,%.12e,%.12e\n",
                  row.epsilon, row.max_a_minus_b, row.argmax_q,
                  row.argmax_sigma, row.achieved_delta);
    out << line;
  }
  return kExitOk;
}

int run_verify_kl(const std::vector<double>& q_values,
                  const std::string& csv_path) {
  const std::vector<double> u_sequence{0.4, 0.2, 0.1, 0.05, 0.025};
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv = open_output(csv_path);
    csv << "q,u,kl,predicted,ratio\n";
  }
  bool all_pass = true;
  for (double q : q_values) {
    const auto rows = subgauss::kl_rate_check(q, u_sequence);
    for (const auto& row : rows) {
      std::printf("q=%g u=%g kl=%.6e predicted=%.6e ratio=%.6f\n", row.q, row.u,
                  row.kl_value, row.predicted_leading, row.ratio);
      if (csv.is_open()) {
        char line[192];
        std::snprintf(line, sizeof(line), "%.10g,%.10g,%.12e,%.12e,%.12e\n",
                      row.q, row.u, row.kl_value, row.predicted_leading,
                      row.ratio);
        csv << line;
      }
    }
    if (rows.back().degenerate) {
      std::printf("PASS kl rate q=%g (degenerate: leading term vanishes)\n", q);
      continue;
    }
    const bool pass = std::abs(rows.back().ratio - 1.0) <= 0.02;
    all_pass = all_pass && pass;
    std::printf("%s kl rate q=%g (final ratio %.6f, target within 2%% of 1)\n",
                pass ? "PASS" : "FAIL", q, rows.back().ratio);
  }
  return all_pass ? kExitOk : kExitVerification;
}

int run_verify_moments(const std::string& csv_path) {
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv = open_output(csv_path);
    csv << "q,sigma,mean,mean_bound,var,var_bound,pass\n";
  }
  bool all_pass = true;
  for (int i = 0; i < 10; ++i) {
    const double q = 0.05 * std::pow(20.0, i / 9.0);
    for (int j = 0; j < 10; ++j) {
      const double sigma = 0.3 * std::pow(5.0 / 0.3, j / 9.0);
      const subgauss::PlrvMomentCheck check = subgauss::plrv_moment_check(q, sigma);
      all_pass = all_pass && check.pass;
      if (!check.pass) {
        std::printf("FAIL moments q=%.4f sigma=%.4f mean=%.6e bound=%.6e "
                    "var=%.6e bound=%.6e\n",
                    q, sigma, check.mean, check.mean_lower_bound, check.variance,
                    check.variance_upper_bound);
      }
      if (csv.is_open()) {
        char line[224];
        std::snprintf(line, sizeof(line), "%.10g,%.10g,%.12e,%.12e,%.12e,%.12e,%d\n",
                      q, sigma, check.mean, check.mean_lower_bound,
                      check.variance, check.variance_upper_bound,
                      check.pass ? 1 : 0);
        csv << line;
      }
    }
  }
  std::printf("%s plrv moment bounds (10x10 grid)\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitOk : kExitVerification;
}

int run_verify_growth(const AccountantFlags& flags, const std::string& csv_path) {
  subgauss::CalibrationConfig cfg;
  cfg.accountant = flags.config();
  const std::vector<std::int64_t> iterations{10, 100, 1000, 10000};
  const subgauss::SigmaGrowthResult result =
      subgauss::sigma_growth_witness(0.2, 1.0, 1e-5, iterations, cfg);
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv = open_output(csv_path);
    csv << "T,sigma,sigma_sq_over_T\n";
  }
  for (const auto& row : result.rows) {
    std::printf("T=%lld sigma=%.6e sigma_sq_over_T=%.6e\n",
                static_cast<long long>(row.iterations), row.sigma,
                row.sigma_sq_over_iterations);
    if (csv.is_open()) {
      char line[128];
      std::snprintf(line, sizeof(line), "%lld,%.12e,%.12e\n",
                    static_cast<long long>(row.iterations), row.sigma,
                    row.sigma_sq_over_iterations);
      csv << line;
    }
  }
  std::printf("%s sigma growth (min sigma^2/T=%.6e, last/first=%.4f)\n",
              result.pass ? "PASS" : "FAIL", result.min_value,
              result.last_over_first);
  return result.pass ? kExitOk : kExitVerification;
}

int run_verify_variance(std::uint64_t seed, const std::string& csv_path) {
  std::mt19937_64 master(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv = open_output(csv_path);
    csv << "q,sigma,subsampling_var,effective_noise_var,total_analytic,"
           "total_empirical,stderr\n";
  }
  bool all_pass = true;
  for (int trial = 0; trial < 5; ++trial) {
    const int vectors = 3 + static_cast<int>(uniform(master) * 9);
    const int dim = 1 + static_cast<int>(uniform(master) * 5);
    const double clip = 0.5 + 1.5 * uniform(master);
    const double q = 0.1 + 0.8 * uniform(master);
    const double sigma = 0.3 + 1.7 * uniform(master);
    const std::uint64_t grad_seed = master();
    const std::uint64_t sim_seed = master();
    const subgauss::GradientSet grads =
        synthetic_gradients(vectors, dim, clip, grad_seed);
    const std::size_t coordinate =
        static_cast<std::size_t>(uniform(master) * dim);

    const subgauss::VarianceDecomposition analytic =
        subgauss::analytic_decomposition(grads, q, sigma, coordinate);
    const subgauss::SimulationResult sim = subgauss::simulate_dp_gradient(
        grads, q, sigma, coordinate, 1000000, sim_seed);

    double full_sum = 0.0;
    for (const auto& g : grads.clipped()) full_sum += g[coordinate];

    const bool var_ok =
        std::abs(sim.empirical_var - analytic.total_var) <= 4.0 * sim.var_stderr;
    const bool mean_ok =
        std::abs(sim.empirical_mean - full_sum) <= 4.0 * sim.mean_stderr;
    all_pass = all_pass && var_ok && mean_ok;
    std::printf(
        "%s variance trial=%d q=%.3f sigma=%.3f total=%.6e empirical=%.6e "
        "(4se=%.2e) mean_gap=%.2e (4se=%.2e)\n",
        (var_ok && mean_ok) ? "PASS" : "FAIL", trial, q, sigma,
        analytic.total_var, sim.empirical_var, 4.0 * sim.var_stderr,
        std::abs(sim.empirical_mean - full_sum), 4.0 * sim.mean_stderr);
    if (csv.is_open()) {
      char line[256];
      std::snprintf(line, sizeof(line), "%.10g,%.10g,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                    q, sigma, analytic.subsampling_var,
                    analytic.effective_noise_var, analytic.total_var,
                    sim.empirical_var, sim.var_stderr);
      csv << line;
    }
  }
  std::printf("%s variance decomposition suite (seed=%llu)\n",
              all_pass ? "PASS" : "FAIL",
              static_cast<unsigned long long>(seed));
  return all_pass ? kExitOk : kExitVerification;
}

int run_simulate_variance(double q, double sigma, double clip, int vectors,
                          int dim, std::size_t coordinate, std::int64_t samples,
                          std::uint64_t seed, const std::string& output_path) {
  const subgauss::GradientSet grads =
      synthetic_gradients(vectors, dim, clip, seed);
  const subgauss::VarianceDecomposition analytic =
      subgauss::analytic_decomposition(grads, q, sigma, coordinate);
  const subgauss::SimulationResult sim =
      subgauss::simulate_dp_gradient(grads, q, sigma, coordinate, samples, seed + 1);
  char line[256];
  std::snprintf(line, sizeof(line), "%.10g,%.10g,%.12e,%.12e,%.12e,%.12e,%.12e\n",
                q, sigma, analytic.subsampling_var, analytic.effective_noise_var,
                analytic.total_var, sim.empirical_var, sim.var_stderr);
  if (output_path.empty()) {
    std::printf("q,sigma,subsampling_var,effective_noise_var,total_analytic,"
                "total_empirical,stderr\n%s",
                line);
  } else {
    std::ofstream out = open_output(output_path);
    out << "q,sigma,subsampling_var,effective_noise_var,total_analytic,"
           "total_empirical,stderr\n"
        << line;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accounting, calibration and verification for the Poisson "
               "subsampled Gaussian mechanism"};
  app.require_subcommand(1);

  // delta
  auto* delta_cmd = app.add_subcommand("delta", "delta(epsilon) of a composed mechanism");
  double d_sigma = 1.0, d_q = 1.0, d_epsilon = 1.0;
  std::int64_t d_iterations = 1;
  std::string d_mode = "pessimistic";
  std::string d_dump;
  AccountantFlags d_flags;
  delta_cmd->add_option("--sigma", d_sigma, "noise standard deviation")->required();
  delta_cmd->add_option("--q", d_q, "subsampling rate")->required();
  delta_cmd->add_option("--iterations", d_iterations, "composition count")->required();
  delta_cmd->add_option("--epsilon", d_epsilon, "epsilon")->required();
  delta_cmd->add_option("--mode", d_mode, "pessimistic|optimistic")
      ->check(CLI::IsMember({"pessimistic", "optimistic"}));
  delta_cmd->add_option("--dump-pld", d_dump,
                        "write the composed PLD as loss,mass CSV");
  add_accountant_flags(delta_cmd, &d_flags);

  // calibrate
  auto* calibrate_cmd = app.add_subcommand("calibrate", "smallest sigma meeting (epsilon, delta)");
  double c_q = 1.0, c_epsilon = 1.0, c_delta = 1e-5, c_rel_tol = 1e-4;
  std::int64_t c_iterations = 1;
  AccountantFlags c_flags;
  calibrate_cmd->add_option("--q", c_q, "subsampling rate")->required();
  calibrate_cmd->add_option("--iterations", c_iterations, "composition count")->required();
  calibrate_cmd->add_option("--epsilon", c_epsilon, "epsilon")->required();
  calibrate_cmd->add_option("--delta", c_delta, "delta target")->required();
  calibrate_cmd->add_option("--rel-tol", c_rel_tol, "relative sigma tolerance");
  add_accountant_flags(calibrate_cmd, &c_flags);

  // convergence-sweep
  auto* conv_cmd = app.add_subcommand(
      "convergence-sweep", "sigma(q, T) sweep against the full-batch line");
  subgauss::SweepSpec spec;
  std::string conv_output;
  AccountantFlags conv_flags;
  double conv_rel_tol = spec.calibration.relative_tolerance;
  conv_cmd->add_option("--output", conv_output, "CSV output path")->required();
  conv_cmd->add_option("--epsilons", spec.epsilons, "epsilon list")->delimiter(',');
  conv_cmd->add_option("--qs", spec.qs, "subsampling rates, ascending")->delimiter(',');
  conv_cmd->add_option("--iteration-counts", spec.iteration_counts,
                       "iteration counts, ascending")->delimiter(',');
  conv_cmd->add_option("--delta", spec.delta_target, "delta target");
  conv_cmd->add_option("--rel-tol", conv_rel_tol, "calibration tolerance");
  add_accountant_flags(conv_cmd, &conv_flags);

  // conjecture-sweep
  auto* conj_cmd = app.add_subcommand(
      "conjecture-sweep", "max(a - b) over feasible (q, sigma) cells per epsilon");
  subgauss::ConjectureSweepConfig conj_cfg;
  std::string conj_output;
  conj_cmd->add_option("--output", conj_output, "CSV output path")->required();
  conj_cmd->add_option("--delta-target", conj_cfg.delta_target, "delta target");
  conj_cmd->add_option("--epsilon-min", conj_cfg.epsilon_min, "epsilon grid start");
  conj_cmd->add_option("--epsilon-max", conj_cfg.epsilon_max, "epsilon grid end");
  conj_cmd->add_option("--epsilon-points", conj_cfg.epsilon_points, "epsilon points");
  conj_cmd->add_option("--q-points", conj_cfg.q_points, "q grid points");
  conj_cmd->add_option("--sigma-points", conj_cfg.sigma_points, "sigma grid points");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run a numerical verifier suite");
  verify_cmd->require_subcommand(1);
  auto* verify_kl = verify_cmd->add_subcommand("kl", "fourth-order KL rate");
  std::vector<double> kl_qs{0.1, 0.5, 0.9};
  std::string kl_csv;
  verify_kl->add_option("--q", kl_qs, "q values")->delimiter(',');
  verify_kl->add_option("--csv", kl_csv, "optional CSV output path");
  auto* verify_moments = verify_cmd->add_subcommand("moments", "PLRV moment bounds");
  std::string moments_csv;
  verify_moments->add_option("--csv", moments_csv, "optional CSV output path");
  auto* verify_growth = verify_cmd->add_subcommand("growth", "sigma^2 = Omega(T) witness");
  std::string growth_csv;
  AccountantFlags growth_flags;
  verify_growth->add_option("--csv", growth_csv, "optional CSV output path");
  add_accountant_flags(verify_growth, &growth_flags);
  auto* verify_variance = verify_cmd->add_subcommand("variance", "variance decomposition");
  std::uint64_t variance_seed = 7;
  std::string variance_csv;
  verify_variance->add_option("--seed", variance_seed, "master seed");
  verify_variance->add_option("--csv", variance_csv, "optional CSV output path");

  // simulate-variance
  auto* sim_cmd = app.add_subcommand("simulate-variance",
                                     "Monte Carlo gradient variance vs analytic");
  double s_q = 0.3, s_sigma = 1.0, s_clip = 1.0;
  int s_vectors = 10, s_dim = 4;
  std::size_t s_coordinate = 0;
  std::int64_t s_samples = 100000;
  std::uint64_t s_seed = 1;
  std::string s_output;
  sim_cmd->add_option("--q", s_q, "subsampling rate")->required();
  sim_cmd->add_option("--sigma", s_sigma, "noise standard deviation")->required();
  sim_cmd->add_option("--clip", s_clip, "clipping threshold C");
  sim_cmd->add_option("--vectors", s_vectors, "number of synthetic gradients");
  sim_cmd->add_option("--dim", s_dim, "gradient dimension");
  sim_cmd->add_option("--coordinate", s_coordinate, "coordinate under study");
  sim_cmd->add_option("--samples", s_samples, "Monte Carlo samples");
  sim_cmd->add_option("--seed", s_seed, "RNG seed");
  sim_cmd->add_option("--output", s_output, "CSV output path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*delta_cmd) {
      return run_delta(d_sigma, d_q, d_iterations, d_epsilon, d_flags, d_mode,
                       d_dump);
    }
    if (*calibrate_cmd) {
      return run_calibrate(c_q, c_iterations, c_epsilon, c_delta, c_rel_tol,
                           c_flags);
    }
    if (*conv_cmd) {
      spec.calibration.accountant = conv_flags.config();
      spec.calibration.relative_tolerance = conv_rel_tol;
      return run_convergence_sweep(spec, conv_output);
    }
    if (*conj_cmd) {
      return run_conjecture_sweep(conj_cfg, conj_output);
    }
    if (*verify_cmd) {
      if (*verify_kl) return run_verify_kl(kl_qs, kl_csv);
      if (*verify_moments) return run_verify_moments(moments_csv);
      if (*verify_growth) return run_verify_growth(growth_flags, growth_csv);
      if (*verify_variance) return run_verify_variance(variance_seed, variance_csv);
    }
    if (*sim_cmd) {
      return run_simulate_variance(s_q, s_sigma, s_clip, s_vectors, s_dim,
                                   s_coordinate, s_samples, s_seed, s_output);
    }
  } catch (const subgauss::GridOverflowError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGridOverflow;
  } catch (const subgauss::CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCalibration;
  } catch (const subgauss::InvalidParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
