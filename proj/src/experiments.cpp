#include "spca/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "spca/errors.hpp"
#include "spca/kernels.hpp"
#include "spca/risk.hpp"
#include "spca/theory.hpp"

namespace spca::experiments {

std::string to_string(LossKind kind) {
  return kind == LossKind::L2SqOverP ? "l2sq_over_p" : "l2_over_p";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::L0:
      return "l0";
    case Method::L1:
      return "l1";
    case Method::Standard:
      return "standard";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view s) {
  if (s == "l2sq" || s == "l2sq_over_p") return LossKind::L2SqOverP;
  if (s == "l2" || s == "l2_over_p") return LossKind::L2OverP;
  throw InputDataError("unknown loss kind: " + std::string(s));
}

std::vector<MethodConfig> default_methods() {
  MethodConfig l0;
  l0.method = Method::L0;
  l0.solver.penalty = Penalty::L0;
  MethodConfig l1;
  l1.method = Method::L1;
  l1.solver.penalty = Penalty::L1;
  MethodConfig standard;
  standard.method = Method::Standard;
  standard.solver.penalty = Penalty::None;
  standard.auto_lambda = false;
  return {l0, l1, standard};
}

namespace {

void run_indexed(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (threads == 1) {
    kernels::for_each_index_serial(count, body);
  } else {
    kernels::for_each_index_parallel(count, threads, body);
  }
}

double resolved_lambda(const MethodConfig& m, int p, int n) {
  if (!m.auto_lambda) return m.solver.lambda;
  const theory::Lambdas l = theory::default_lambdas(p, n);
  switch (m.method) {
    case Method::L0:
      return l.lambda0;
    case Method::L1:
      return l.lambda1;
    case Method::Standard:
      break;
  }
  return 0.0;
}

struct MethodOutcome {
  Vector beta;
  bool converged = true;
};

// Fits one method from the standard-PCA start `init`; the standard method
// is the start itself.
MethodOutcome fit_method(const CovarianceMatrix& sigma_hat, const MethodConfig& m, double lambda,
                         const Vector& init) {
  if (m.method == Method::Standard) return {init, true};
  SolverConfig cfg = m.solver;
  cfg.lambda = lambda;
  SparseEstimate est = solve(sigma_hat, cfg, init);
  return {std::move(est.beta), est.converged};
}

void align_to(Vector& beta, const Vector& target) {
  if (beta.dot(target) < 0.0) beta = -beta;
}

double loss_value(const Vector& beta, const Vector& target, LossKind kind) {
  const double sq = (beta - target).squaredNorm();
  const double p = static_cast<double>(target.size());
  return kind == LossKind::L2SqOverP ? sq / p : std::sqrt(sq) / p;
}

struct CellResult {
  std::vector<std::vector<double>> losses;  // [method][replication]
  std::vector<std::vector<int>> sizes;
  std::vector<std::vector<char>> converged;
};

CellResult run_cell(const VarModelSpec& model_spec, const VarModel& model, int n, int replications,
                    const std::vector<MethodConfig>& methods, const std::vector<double>& lambdas,
                    std::uint64_t master_seed, LossKind loss_kind, int threads) {
  const std::size_t reps = static_cast<std::size_t>(replications);
  CellResult out;
  out.losses.assign(methods.size(), std::vector<double>(reps));
  out.sizes.assign(methods.size(), std::vector<int>(reps));
  out.converged.assign(methods.size(), std::vector<char>(reps));

  run_indexed(reps, threads, [&](std::size_t r) {
    VarModelSpec rep_spec = model_spec;
    rep_spec.seed = replication_seed(master_seed, r);
    const TimeSeriesMatrix x = simulate(model, rep_spec, n);
    const CovarianceMatrix sigma_hat = sample_covariance(x, 1);
    const Vector init = beta0(sigma_hat);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      MethodOutcome fit = fit_method(sigma_hat, methods[m], lambdas[m], init);
      align_to(fit.beta, model.beta0);
      out.losses[m][r] = loss_value(fit.beta, model.beta0, loss_kind);
      out.sizes[m][r] = static_cast<int>(support_of(fit.beta).size());
      out.converged[m][r] = fit.converged ? 1 : 0;
    }
  });
  return out;
}

ReportRow summarize(const VarModelSpec& model_spec, const std::string& method, double lambda,
                    std::vector<double> losses, std::vector<int> sizes,
                    const std::vector<char>& converged) {
  ReportRow row;
  row.vector_kind = to_string(model_spec.eigvec);
  row.nu = model_spec.nu;
  row.innovation = to_string(model_spec.innovation);
  row.method = method;
  row.lambda = lambda;
  const double count = static_cast<double>(losses.size());
  double sum = 0.0;
  double size_sum = 0.0;
  double conv = 0.0;
  for (std::size_t r = 0; r < losses.size(); ++r) {
    sum += losses[r];
    size_sum += sizes[r];
    conv += converged[r];
  }
  row.loss_mean = sum / count;
  double ss = 0.0;
  for (double l : losses) ss += (l - row.loss_mean) * (l - row.loss_mean);
  row.loss_se = losses.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
  row.size_mean = size_sum / count;
  row.converged_rate = conv / count;
  row.losses = std::move(losses);
  row.sizes = std::move(sizes);
  return row;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw PreconditionError("replications must be at least 1");
  if (spec.n < 1) throw PreconditionError("n must be at least 1");
  if (spec.methods.empty()) throw PreconditionError("at least one method is required");
  const auto start = std::chrono::steady_clock::now();

  const VarModel model = build_model(spec.model);
  std::vector<double> lambdas;
  for (const auto& m : spec.methods) lambdas.push_back(resolved_lambda(m, spec.model.p, spec.n));

  CellResult cell = run_cell(spec.model, model, spec.n, spec.replications, spec.methods, lambdas,
                             spec.master_seed, spec.loss_kind, spec.threads);

  ExperimentReport report;
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    report.rows.push_back(summarize(spec.model, to_string(spec.methods[m].method), lambdas[m],
                                    std::move(cell.losses[m]), std::move(cell.sizes[m]),
                                    cell.converged[m]));
  }
  report.metadata = {{"p", std::to_string(spec.model.p)},
                     {"n", std::to_string(spec.n)},
                     {"replications", std::to_string(spec.replications)},
                     {"master_seed", std::to_string(spec.master_seed)},
                     {"loss", to_string(spec.loss_kind)},
                     {"s0", std::to_string(model.s0)}};
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Table1Config full_scale_table1() {
  Table1Config c;
  c.p = 512;
  c.n = 256;
  c.replications = 1000;
  return c;
}

ExperimentReport run_table1(const Table1Config& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  for (InnovationKind innovation : config.innovations) {
    for (EigvecKind kind : config.kinds) {
      for (double nu : config.nus) {
        ExperimentSpec spec;
        spec.model.p = config.p;
        spec.model.nu = nu;
        spec.model.eigvec = kind;
        spec.model.innovation = innovation;
        spec.model.shape = config.weibull_shape;
        spec.model.burn_in = config.burn_in;
        spec.model.seed = config.master_seed;
        spec.n = config.n;
        spec.replications = config.replications;
        spec.master_seed = config.master_seed;
        spec.loss_kind = config.loss_kind;
        spec.threads = config.threads;
        ExperimentReport cell = run_experiment(spec);
        for (auto& row : cell.rows) report.rows.push_back(std::move(row));
      }
    }
  }
  report.metadata = {{"p", std::to_string(config.p)},
                     {"n", std::to_string(config.n)},
                     {"replications", std::to_string(config.replications)},
                     {"master_seed", std::to_string(config.master_seed)},
                     {"loss", to_string(config.loss_kind)},
                     {"weibull_shape", fmt_double(config.weibull_shape)},
                     {"burn_in", std::to_string(config.burn_in)}};
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report_csv(const ExperimentReport& report, std::ostream& os) {
  os << "vector,nu,innovation,method,lambda,loss_mean,loss_se,size_mean,converged_rate\n";
  for (const auto& r : report.rows) {
    os << r.vector_kind << ',' << fmt_double(r.nu) << ',' << r.innovation << ',' << r.method << ','
       << fmt_double(r.lambda) << ',' << fmt_double(r.loss_mean) << ',' << fmt_double(r.loss_se)
       << ',' << fmt_double(r.size_mean) << ',' << fmt_double(r.converged_rate) << '\n';
  }
}

void write_report_table(const ExperimentReport& report, std::ostream& os) {
  // (innovation, vector, nu) -> method -> row, in first-seen order
  std::vector<std::string> innovations;
  std::vector<std::tuple<std::string, std::string, double>> cells;
  std::vector<std::string> methods;
  std::map<std::tuple<std::string, std::string, double, std::string>, const ReportRow*> index;
  for (const auto& r : report.rows) {
    if (std::find(innovations.begin(), innovations.end(), r.innovation) == innovations.end()) {
      innovations.push_back(r.innovation);
    }
    const auto cell = std::make_tuple(r.innovation, r.vector_kind, r.nu);
    if (std::find(cells.begin(), cells.end(), cell) == cells.end()) cells.push_back(cell);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    index[{r.innovation, r.vector_kind, r.nu, r.method}] = &r;
  }

  for (const auto& innovation : innovations) {
    os << innovation << '\n';
    os << std::left << std::setw(10) << "Vector" << std::setw(6) << "nu";
    for (const auto& m : methods) os << std::setw(22) << (m + (m == "standard" ? " Loss" : " Loss (Size)"));
    os << '\n';
    std::string last_vector;
    for (const auto& [inn, vec, nu] : cells) {
      if (inn != innovation) continue;
      os << std::left << std::setw(10) << (vec == last_vector ? "" : vec);
      last_vector = vec;
      std::ostringstream nu_str;
      nu_str << std::fixed << std::setprecision(2) << nu;
      os << std::setw(6) << nu_str.str();
      for (const auto& m : methods) {
        auto it = index.find({inn, vec, nu, m});
        std::ostringstream cell;
        if (it != index.end()) {
          cell << std::fixed << std::setprecision(5) << it->second->loss_mean;
          if (m != "standard") {
            cell << " (" << std::setw(6) << std::right << std::setprecision(2)
                 << it->second->size_mean << ")";
          }
        }
        os << std::left << std::setw(22) << cell.str();
      }
      os << '\n';
    }
  }
}

Vector block_vector(int p, int s) {
  if (s < 1 || s > p) throw PreconditionError("block size must lie in 1..p");
  Vector v = Vector::Zero(p);
  const int first = (p - s) / 2;
  v.segment(first, s).setConstant(1.0 / std::sqrt(static_cast<double>(s)));
  return v;
}

std::vector<RateRow> run_rate_study(const RateStudyConfig& config) {
  if (config.n_list.empty() || config.p_list.empty() || config.s0_list.empty()) {
    throw PreconditionError("rate study lists must be nonempty");
  }
  if (config.replications < 1) throw PreconditionError("replications must be at least 1");
  std::vector<RateRow> rows;
  const double phi_max = 1.0 / std::sqrt(1.0 - config.base.nu * config.base.nu);
  for (int p : config.p_list) {
    for (int s : config.s0_list) {
      VarModelSpec model_spec = config.base;
      model_spec.p = p;
      model_spec.seed = config.master_seed;
      if (s > 0) {
        model_spec.eigvec = EigvecKind::Custom;
        model_spec.custom = block_vector(p, s);
      }
      const VarModel model = build_model(model_spec);
      for (int n : config.n_list) {
        std::vector<double> lambdas;
        for (const auto& m : config.methods) lambdas.push_back(resolved_lambda(m, p, n));
        // loss_kind L2SqOverP scaled back by p gives ‖β̂ − β⁰‖₂².
        CellResult cell = run_cell(model_spec, model, n, config.replications, config.methods,
                                   lambdas, config.master_seed, LossKind::L2SqOverP, config.threads);
        const double s0 = model.s0;
        const double scale =
            s0 * s0 * s0 * std::pow(phi_max, 4) * std::log(static_cast<double>(p)) / n;
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
          std::vector<double> sq = cell.losses[m];
          for (double& v : sq) v *= p;
          RateRow row;
          row.n = n;
          row.p = p;
          row.s0 = model.s0;
          row.method = to_string(config.methods[m].method);
          row.median_loss = median(std::move(sq));
          row.rate_scale = scale;
          row.ratio = row.median_loss / scale;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

void write_rate_csv(const std::vector<RateRow>& rows, std::ostream& os) {
  os << "n,p,s0,method,median_loss,rate_scale,ratio\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.p << ',' << r.s0 << ',' << r.method << ',' << fmt_double(r.median_loss)
       << ',' << fmt_double(r.rate_scale) << ',' << fmt_double(r.ratio) << '\n';
  }
}

ConcentrationResult run_concentration_check(const ConcentrationConfig& config) {
  if (config.model.innovation != InnovationKind::Gaussian) {
    throw PreconditionError("concentration check expects Gaussian innovations");
  }
  if (config.replications < 1) throw PreconditionError("replications must be at least 1");
  for (double level : config.quantile_levels) {
    if (!(level >= 0.0 && level <= 1.0)) throw PreconditionError("quantile levels must lie in [0, 1]");
  }
  VarModelSpec model_spec = config.model;
  model_spec.seed = config.master_seed;
  const VarModel model = build_model(model_spec);

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  ConcentrationResult out;
  out.n = config.n;
  out.levels = config.quantile_levels;
  out.wmax.resize(reps);
  out.hessian_min_eig.resize(reps);
  run_indexed(reps, config.threads, [&](std::size_t r) {
    VarModelSpec rep_spec = model_spec;
    rep_spec.seed = replication_seed(config.master_seed, r);
    const CovarianceMatrix sigma_hat = sample_covariance(simulate(model, rep_spec, config.n), 1);
    out.wmax[r] = deviation_matrix(sigma_hat, model.sigma0).max_norm;
    const Matrix h = risk_hessian(RiskContext(sigma_hat), model.beta0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    out.hessian_min_eig[r] = es.eigenvalues()(0);
  });

  for (double level : config.quantile_levels) out.wmax_quantiles.push_back(quantile(out.wmax, level));
  const auto pd = std::count_if(out.hessian_min_eig.begin(), out.hessian_min_eig.end(),
                                [](double v) { return v > 0.0; });
  out.hessian_pd_rate = static_cast<double>(pd) / static_cast<double>(reps);
  return out;
}

void write_concentration_csv(const std::vector<ConcentrationResult>& results, std::ostream& os) {
  os << "n,statistic,value\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
      os << r.n << ",wmax_q" << fmt_double(r.levels[i]) << ',' << fmt_double(r.wmax_quantiles[i])
         << '\n';
    }
    os << r.n << ",hessian_pd_rate," << fmt_double(r.hessian_pd_rate) << '\n';
  }
}

double quantile(std::vector<double> values, double level) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace spca::experiments
