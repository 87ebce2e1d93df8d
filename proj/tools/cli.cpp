#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spca/covariance.hpp"
#include "spca/dataio.hpp"
#include "spca/errors.hpp"
#include "spca/experiments.hpp"
#include "spca/kernels.hpp"
#include "spca/simulator.hpp"
#include "spca/solver.hpp"
#include "spca/theory.hpp"

namespace spca::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputDataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputDataError("cannot write " + path);
  return os;
}

char delimiter_of(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw InputDataError("delimiter must be a single character");
  return s[0];
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

struct ModelFlags {
  std::string model_file;
  int p = 128;
  double nu = 0.6;
  std::string eigvec = "threepeak";
  std::string innovation = "gaussian";
  double shape = 0.5;
  int burn_in = 1000;
  std::uint64_t seed = 1;
  CLI::Option* p_opt = nullptr;
  CLI::Option* nu_opt = nullptr;
  CLI::Option* eigvec_opt = nullptr;
  CLI::Option* innovation_opt = nullptr;
  CLI::Option* shape_opt = nullptr;
  CLI::Option* burn_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void add(CLI::App* app, bool with_file, bool with_seed = true) {
    if (with_file) {
      app->add_option("--model", model_file, "Model spec file (key=value); flags override it");
    }
    p_opt = app->add_option("--p", p, "Dimension");
    nu_opt = app->add_option("--nu", nu, "Eigenvalue base nu, in [0,1)");
    eigvec_opt = app->add_option("--eigvec", eigvec, "Leading eigenvector: threepeak|step");
    innovation_opt = app->add_option("--innovation", innovation, "Innovation law: gaussian|weibull");
    shape_opt = app->add_option("--shape", shape, "Weibull shape");
    burn_opt = app->add_option("--burn-in", burn_in, "Burn-in steps");
    if (with_seed) seed_opt = app->add_option("--seed", seed, "Random seed");
  }

  VarModelSpec resolve() const {
    VarModelSpec spec;
    if (!model_file.empty()) spec = parse_model_spec(read_file(model_file));
    const bool from_file = !model_file.empty();
    if (!from_file || p_opt->count()) spec.p = p;
    if (!from_file || nu_opt->count()) spec.nu = nu;
    if (!from_file || eigvec_opt->count()) spec.eigvec = parse_eigvec_kind(eigvec);
    if (!from_file || innovation_opt->count()) spec.innovation = parse_innovation_kind(innovation);
    if (!from_file || shape_opt->count()) spec.shape = shape;
    if (!from_file || burn_opt->count()) spec.burn_in = burn_in;
    if (seed_opt && (!from_file || seed_opt->count())) spec.seed = seed;
    spec.validate();
    return spec;
  }
};

struct CsvFlags {
  std::string input;
  bool header = false;
  std::string delimiter = ",";

  void add(CLI::App* app) {
    app->add_option("--input", input, "Input CSV (rows = time or sample units)")->required();
    app->add_flag("--header", header, "First row holds column labels");
    app->add_option("--delimiter", delimiter, "Field delimiter");
  }

  dataio::PanelData load() const {
    dataio::CsvOptions options;
    options.header = header;
    options.delimiter = delimiter_of(delimiter);
    return dataio::load_csv(input, options);
  }
};

Penalty parse_penalty(const std::string& s) {
  if (s == "l1") return Penalty::L1;
  if (s == "l0") return Penalty::L0;
  if (s == "none") return Penalty::None;
  throw InputDataError("unknown penalty: " + s);
}

void write_summary(std::ostream& os, const std::string& prefix, const std::string& penalty,
                   double lambda, const SparseEstimate& est) {
  os << prefix << "penalty=" << penalty << '\n';
  os << prefix << "lambda=" << fmt(lambda, 12) << '\n';
  os << prefix << "objective=" << fmt(est.objective, 12) << '\n';
  os << prefix << "support_size=" << est.support.size() << '\n';
  os << prefix << "support=";
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    if (i) os << ';';
    os << est.support[i] + 1;
  }
  os << '\n';
  os << prefix << "iterations=" << est.iterations << '\n';
  os << prefix << "converged=" << (est.converged ? "true" : "false") << '\n';
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

int resolve_threads(int flag) { return flag > 0 ? flag : kernels::default_thread_count(); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse principal component analysis for stationary time series"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a VAR(1) observation stretch to CSV");
  ModelFlags sim_model;
  sim_model.add(sim, true);
  int sim_n = 256;
  std::string sim_out;
  std::string sim_save_model;
  sim->add_option("--n", sim_n, "Number of observations");
  sim->add_option("--out", sim_out, "Output CSV")->required();
  sim->add_option("--save-model", sim_save_model, "Also write the resolved model spec here");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a penalized rank-one estimator to a data CSV");
  CsvFlags fit_csv;
  fit_csv.add(fit);
  std::string fit_penalty = "l1";
  std::string fit_lambda = "auto";
  double fit_eta = std::numeric_limits<double>::infinity();
  int fit_max_iter = 10000;
  double fit_tol = 0.0;
  bool fit_detrend = false;
  std::string fit_out;
  std::string fit_summary;
  fit->add_option("--penalty", fit_penalty, "l1 | l0 | none | all");
  fit->add_option("--lambda", fit_lambda, "Penalty level, or 'auto' for the default formula");
  fit->add_option("--eta", fit_eta, "Radius of the feasible ball around the PCA start");
  fit->add_option("--max-iter", fit_max_iter, "Iteration cap");
  fit->add_option("--tol", fit_tol, "Step tolerance; 0 selects 1e-8*(1+|init|)");
  fit->add_flag("--detrend", fit_detrend, "Remove a per-column linear trend first");
  fit->add_option("--out", fit_out, "Estimate CSV")->required();
  fit->add_option("--summary", fit_summary, "Summary file (key=value); default standard output");

  // table1
  auto* t1 = app.add_subcommand("table1", "Monte Carlo comparison of l0, l1 and standard PCA");
  experiments::Table1Config t1_cfg;
  std::string t1_out;
  std::string t1_table;
  std::string t1_loss = "l2sq";
  std::vector<std::string> t1_innovations = {"gaussian", "weibull"};
  std::vector<std::string> t1_kinds = {"threepeak", "step"};
  t1_cfg.threads = 0;
  t1->add_option("--p", t1_cfg.p, "Dimension");
  t1->add_option("--n", t1_cfg.n, "Observations per replication");
  t1->add_option("--reps", t1_cfg.replications, "Replications per cell");
  t1->add_option("--seed", t1_cfg.master_seed, "Master seed");
  t1->add_option("--threads", t1_cfg.threads, "Replication workers (0 = SPCA_THREADS or OpenMP default)")
      ->envname("SPCA_THREADS");
  t1->add_option("--nus", t1_cfg.nus, "Values of nu")->delimiter(',');
  t1->add_option("--kinds", t1_kinds, "Vector kinds")->delimiter(',');
  t1->add_option("--innovations", t1_innovations, "Innovation laws")->delimiter(',');
  t1->add_option("--shape", t1_cfg.weibull_shape, "Weibull shape");
  t1->add_option("--burn-in", t1_cfg.burn_in, "Burn-in steps");
  t1->add_option("--loss", t1_loss, "l2sq (squared norm / p) or l2 (norm / p)");
  t1->add_option("--out", t1_out, "Report CSV")->required();
  t1->add_option("--table", t1_table, "Aligned text table; default standard output");

  // rates
  auto* rates = app.add_subcommand("rates", "Median loss across (n, p, s0) against the l1 rate");
  experiments::RateStudyConfig rate_cfg;
  ModelFlags rate_model;
  rate_model.add(rates, false, false);
  std::string rate_out;
  rate_cfg.threads = 0;
  rates->add_option("--n-list", rate_cfg.n_list, "Sample sizes")->delimiter(',');
  rates->add_option("--p-list", rate_cfg.p_list, "Dimensions")->delimiter(',');
  rates->add_option("--s0-list", rate_cfg.s0_list, "Block sparsities (0 = model vector)")
      ->delimiter(',');
  rates->add_option("--reps", rate_cfg.replications, "Replications per configuration");
  rates->add_option("--seed", rate_cfg.master_seed, "Master seed");
  rates->add_option("--threads", rate_cfg.threads, "Replication workers")->envname("SPCA_THREADS");
  rates->add_option("--out", rate_out, "Output CSV")->required();

  // concentration
  auto* conc = app.add_subcommand("concentration", "Max-norm deviation and Hessian definiteness");
  ModelFlags conc_model;
  conc_model.p = 16;
  conc_model.add(conc, false, false);
  std::vector<int> conc_ns = {100, 1000, 10000};
  experiments::ConcentrationConfig conc_cfg;
  std::string conc_out;
  conc_cfg.threads = 0;
  conc->add_option("--n-list", conc_ns, "Sample sizes")->delimiter(',');
  conc->add_option("--reps", conc_cfg.replications, "Replications");
  conc->add_option("--quantiles", conc_cfg.quantile_levels, "Quantile levels")->delimiter(',');
  conc->add_option("--seed", conc_cfg.master_seed, "Master seed");
  conc->add_option("--threads", conc_cfg.threads, "Replication workers")->envname("SPCA_THREADS");
  conc->add_option("--out", conc_out, "Output CSV")->required();

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "Leading eigenvalues of a data CSV's covariance");
  CsvFlags spec_csv;
  spec_csv.add(spec_cmd);
  int spec_k = 10;
  bool spec_detrend = false;
  std::string spec_out;
  spec_cmd->add_option("--k", spec_k, "Number of eigenvalues");
  spec_cmd->add_flag("--detrend", spec_detrend, "Remove a per-column linear trend first");
  spec_cmd->add_option("--out", spec_out, "Output CSV (rank,eigenvalue)")->required();

  // detrend
  auto* detrend = app.add_subcommand("detrend", "Remove a per-column linear trend");
  CsvFlags detrend_csv;
  detrend_csv.add(detrend);
  std::string detrend_out;
  detrend->add_option("--out", detrend_out, "Output CSV")->required();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate rate and oracle-inequality quantities");
  std::string bounds_params;
  double bounds_p = 512;
  double bounds_n = 256;
  double bounds_xi = 0.0;
  double bounds_lambda0 = 0.0;
  double bounds_lambda1 = 0.0;
  double bounds_beta_l1 = 0.0;
  bounds->add_option("--params", bounds_params, "Theory parameter file (key=value)");
  bounds->add_option("--p", bounds_p, "Dimension");
  bounds->add_option("--n", bounds_n, "Sample size");
  bounds->add_option("--xi", bounds_xi, "xi_n; 0 selects tau_n/2 (Gaussian) or the midpoint of (tau_1n, sigma-3eta)");
  bounds->add_option("--lambda0", bounds_lambda0, "l0 penalty; 0 selects the default formula");
  bounds->add_option("--lambda1", bounds_lambda1, "l1 penalty; 0 selects twice the A_n threshold");
  bounds->add_option("--beta0-l1", bounds_beta_l1, "||beta0||_1; 0 selects sqrt(s0)*phi_max");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) {
      const VarModelSpec spec = sim_model.resolve();
      if (sim_n < 1) throw PreconditionError("--n must be positive");
      const VarModel model = build_model(spec);
      const TimeSeriesMatrix x = simulate(model, spec, sim_n);
      auto os = open_output(sim_out);
      dataio::write_matrix_csv(x.data(), os);
      if (!sim_save_model.empty()) {
        auto ms = open_output(sim_save_model);
        ms << format_model_spec(spec);
      }
      err << "simulate: wrote " << x.n() << "x" << x.p() << " matrix, s0=" << model.s0 << '\n';
    } else if (*fit) {
      dataio::PanelData data = fit_csv.load();
      if (fit_detrend) data = dataio::detrend_linear(data);
      const auto p = data.matrix.cols();
      const auto n = data.matrix.rows();
      const bool auto_lambda = fit_lambda == "auto";
      double lambda_value = 0.0;
      if (!auto_lambda) {
        try {
          std::size_t used = 0;
          lambda_value = std::stod(fit_lambda, &used);
          if (used != fit_lambda.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          err << "--lambda must be 'auto' or a number\n";
          return kUsage;
        }
      }
      std::ostringstream summary;
      if (fit_penalty == "all") {
        dataio::LambdaOverrides overrides;
        if (!auto_lambda) overrides = {lambda_value, lambda_value};
        const dataio::MethodFits fits = dataio::fit_all_methods(data, overrides);
        auto os = open_output(fit_out);
        dataio::write_estimates_csv(fits, data.column_labels, os);
        write_summary(summary, "l0.", "l0", fits.lambda0, fits.l0);
        write_summary(summary, "l1.", "l1", fits.lambda1, fits.l1);
        write_summary(summary, "standard.", "none", 0.0, fits.standard);
      } else {
        const Penalty penalty = parse_penalty(fit_penalty);
        SolverConfig config;
        config.penalty = penalty;
        config.eta = fit_eta;
        config.max_iter = fit_max_iter;
        if (fit_tol > 0.0) config.tol = fit_tol;
        if (auto_lambda) {
          const theory::Lambdas l = theory::default_lambdas(static_cast<double>(p), static_cast<double>(n));
          config.lambda = penalty == Penalty::L0 ? l.lambda0 : penalty == Penalty::L1 ? l.lambda1 : 0.0;
        } else {
          config.lambda = lambda_value;
        }
        const CovarianceMatrix sigma_hat = sample_covariance(TimeSeriesMatrix(data.matrix));
        const SparseEstimate est = solve(sigma_hat, config);
        auto os = open_output(fit_out);
        os << "index,coordinate_label,estimate\n";
        for (Eigen::Index j = 0; j < est.beta.size(); ++j) {
          os << j + 1 << ',' << data.column_labels[static_cast<std::size_t>(j)] << ','
             << fmt(est.beta(j), 12) << '\n';
        }
        write_summary(summary, "", fit_penalty, config.lambda, est);
      }
      summary << "p=" << p << "\nn=" << n << '\n';
      if (fit_summary.empty()) {
        out << summary.str();
      } else {
        auto os = open_output(fit_summary);
        os << summary.str();
      }
    } else if (*t1) {
      t1_cfg.threads = resolve_threads(t1_cfg.threads);
      t1_cfg.loss_kind = experiments::parse_loss_kind(t1_loss);
      t1_cfg.kinds.clear();
      for (const auto& k : t1_kinds) t1_cfg.kinds.push_back(parse_eigvec_kind(k));
      t1_cfg.innovations.clear();
      for (const auto& k : t1_innovations) t1_cfg.innovations.push_back(parse_innovation_kind(k));
      const experiments::ExperimentReport report = experiments::run_table1(t1_cfg);
      auto os = open_output(t1_out);
      experiments::write_report_csv(report, os);
      if (t1_table.empty()) {
        experiments::write_report_table(report, out);
      } else {
        auto ts = open_output(t1_table);
        experiments::write_report_table(report, ts);
      }
      for (const auto& [k, v] : report.metadata) err << k << '=' << v << '\n';
      err << "wall_seconds=" << fmt(report.wall_seconds, 4) << '\n';
    } else if (*rates) {
      rate_cfg.base = rate_model.resolve();
      rate_cfg.threads = resolve_threads(rate_cfg.threads);
      const auto rows = experiments::run_rate_study(rate_cfg);
      auto os = open_output(rate_out);
      experiments::write_rate_csv(rows, os);
      experiments::write_rate_csv(rows, out);
    } else if (*conc) {
      conc_cfg.model = conc_model.resolve();
      conc_cfg.threads = resolve_threads(conc_cfg.threads);
      std::vector<experiments::ConcentrationResult> results;
      for (int n : conc_ns) {
        conc_cfg.n = n;
        results.push_back(experiments::run_concentration_check(conc_cfg));
      }
      auto os = open_output(conc_out);
      experiments::write_concentration_csv(results, os);
      experiments::write_concentration_csv(results, out);
    } else if (*spec_cmd) {
      dataio::PanelData data = spec_csv.load();
      if (spec_detrend) data = dataio::detrend_linear(data);
      const auto values = dataio::spectrum(data, spec_k);
      auto os = open_output(spec_out);
      dataio::write_spectrum_csv(values, os);
    } else if (*detrend) {
      const dataio::PanelData data = dataio::detrend_linear(detrend_csv.load());
      auto os = open_output(detrend_out);
      dataio::write_matrix_csv(data.matrix, os, detrend_csv.header ? data.column_labels
                                                                   : std::vector<std::string>{});
    } else if (*bounds) {
      theory::TheoryParams params;
      if (!bounds_params.empty()) params = theory::parse_theory_params(read_file(bounds_params));
      params.validate();
      const double p = bounds_p;
      const double n = bounds_n;
      const auto line = [&out](const std::string& key, double v) {
        out << key << '=' << fmt(v, 6) << '\n';
      };
      const auto undefined = [&out](const std::string& key, const std::exception& e) {
        out << key << "=undefined (" << e.what() << ")\n";
      };

      const theory::Lambdas lambdas = theory::default_lambdas(p, n);
      line("lambda0", lambdas.lambda0);
      line("lambda1", lambdas.lambda1);
      const double zeta = theory::zeta_n(params, p, n);
      line("zeta_n", zeta);
      line("gamma_n", theory::gamma_n(params, p, n));
      double tau = 0.0;
      try {
        tau = theory::tau_n(params);
        line("tau_n", tau);
      } catch (const PreconditionError& e) {
        undefined("tau_n", e);
      }
      const theory::RateL1 rate = theory::rate_l1_gaussian(params, p, n);
      line("rate.lambda1_star", rate.lambda1_star);
      line("rate.l1_rate", rate.l1_rate);
      line("rate.l2sq_rate", rate.l2sq_rate);

      const double beta_l1 =
          bounds_beta_l1 > 0.0 ? bounds_beta_l1 : std::sqrt(static_cast<double>(params.s0)) * params.phi_max;
      const double ratio = (params.C + 1.0) / (params.C - 1.0);
      try {
        const double xi = bounds_xi > 0.0 ? bounds_xi : tau / 2.0;
        const double a_n = ratio * params.phi_max * beta_l1 * zeta * params.rho_sum;
        const double lambda1 = bounds_lambda1 > 0.0 ? bounds_lambda1 : 2.0 * a_n;
        const theory::OracleBound g = theory::oracle_l1_gaussian(params, p, n, xi, lambda1, beta_l1);
        line("gaussian.xi_n", xi);
        line("gaussian.lambda1", lambda1);
        line("gaussian.A_n", g.A_n);
        line("gaussian.B_n", g.B_n);
        line("gaussian.bound", g.bound);
        line("gaussian.prob_floor", g.prob_floor);
      } catch (const PreconditionError& e) {
        undefined("gaussian", e);
      }

      line("gamma", theory::gamma_exponent(params.gamma1, params.gamma2));
      out << "gamma_below_one=" << (theory::gamma_exponent_below_one(params.gamma1, params.gamma2) ? "true" : "false")
          << '\n';
      try {
        const theory::SubWeibullBounds sw = theory::sub_weibull_bounds(params, p, n);
        line("subweibull.K2", sw.K2);
        line("subweibull.tau1n", sw.tau1n);
        line("subweibull.tau2n", sw.tau2n);
        const double gap = params.sigma_gap - 3.0 * params.eta;
        const double xi = bounds_xi > 0.0 ? bounds_xi : 0.5 * (sw.tau1n + gap);
        const double zeta_sw = std::max(zeta, 2.0 * sw.tau2n);
        const double lambda1 =
            bounds_lambda1 > 0.0 ? bounds_lambda1 : 2.0 * ratio * zeta_sw * beta_l1;
        const theory::OracleBound b =
            theory::oracle_l1_subweibull(params, p, n, xi, zeta_sw, lambda1, beta_l1);
        line("subweibull.xi_n", xi);
        line("subweibull.zeta_n", zeta_sw);
        line("subweibull.lambda1", lambda1);
        line("subweibull.A_n", b.A_n);
        line("subweibull.B_n", b.B_n);
        line("subweibull.bound", b.bound);
        line("subweibull.prob_floor", b.prob_floor);
      } catch (const PreconditionError& e) {
        undefined("subweibull", e);
      }

      try {
        const double lambda0 = bounds_lambda0 > 0.0 ? bounds_lambda0 : lambdas.lambda0;
        const theory::L0Bound l0 = theory::l0_bound(params, p, n, lambda0);
        line("l0.lambda0", lambda0);
        line("l0.s_tilde", l0.s_tilde);
        line("l0.zeta_tilde", l0.zeta_tilde);
        line("l0.gamma_tilde", l0.gamma_tilde);
        line("l0.delta_n", l0.delta_n);
      } catch (const PreconditionError& e) {
        undefined("l0", e);
      }
    }
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}

}  // namespace spca::cli
