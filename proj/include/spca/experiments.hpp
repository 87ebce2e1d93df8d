#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spca/simulator.hpp"
#include "spca/solver.hpp"

namespace spca::experiments {

enum class LossKind { L2SqOverP, L2OverP };
enum class Method { L0, L1, Standard };

std::string to_string(LossKind kind);
std::string to_string(Method method);
LossKind parse_loss_kind(std::string_view s);

struct MethodConfig {
  Method method = Method::Standard;
  SolverConfig solver;
  /// Replace solver.lambda by the default λ₀ / λ₁ for the cell's (p, n).
  bool auto_lambda = true;
};

/// The three estimators compared in the simulation study, with default λ.
std::vector<MethodConfig> default_methods();

struct ExperimentSpec {
  VarModelSpec model;
  int n = 128;
  int replications = 200;
  std::vector<MethodConfig> methods = default_methods();
  std::uint64_t master_seed = 7;
  LossKind loss_kind = LossKind::L2SqOverP;
  /// Replication workers; 1 runs the serial reference loop, 0 the default.
  int threads = 1;
};

struct ReportRow {
  std::string vector_kind;
  double nu = 0.0;
  std::string innovation;
  std::string method;
  double lambda = 0.0;
  double loss_mean = 0.0;
  double loss_se = 0.0;
  double size_mean = 0.0;
  double converged_rate = 0.0;
  std::vector<double> losses;  // per replication, index order
  std::vector<int> sizes;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  double wall_seconds = 0.0;
};

/// Monte Carlo over one model cell: every replication simulates, forms Σ̂ₙ,
/// and fits every method from the standard-PCA start. β̂ is sign-aligned to
/// β⁰ before the loss is taken. Replication r uses
/// replication_seed(master_seed, r), so results do not depend on threads.
ExperimentReport run_experiment(const ExperimentSpec& spec);

struct Table1Config {
  int p = 128;
  int n = 128;
  int replications = 200;
  std::uint64_t master_seed = 7;
  int threads = 1;
  LossKind loss_kind = LossKind::L2SqOverP;
  std::vector<EigvecKind> kinds = {EigvecKind::ThreePeak, EigvecKind::Step};
  std::vector<double> nus = {0.85, 0.6, 0.35, 0.1};
  std::vector<InnovationKind> innovations = {InnovationKind::Gaussian,
                                             InnovationKind::TwoSidedWeibull};
  double weibull_shape = 0.5;
  int burn_in = 1000;
};

/// Full scale: p = 512, n = 256, 1000 replications.
Table1Config full_scale_table1();

/// Grid innovation × kind × ν, three methods per cell.
ExperimentReport run_table1(const Table1Config& config);

/// Columns: vector,nu,innovation,method,lambda,loss_mean,loss_se,size_mean,converged_rate
void write_report_csv(const ExperimentReport& report, std::ostream& os);

/// Aligned text table: one block per innovation law, one line per
/// (vector, ν), columns "Loss (Size)" per method.
void write_report_table(const ExperimentReport& report, std::ostream& os);

struct RateStudyConfig {
  VarModelSpec base;
  std::vector<int> n_list = {128, 256, 512, 1024};
  std::vector<int> p_list = {128};
  /// 0 keeps the base vector kind; s > 0 uses a block of s equal entries.
  std::vector<int> s0_list = {0};
  int replications = 100;
  std::uint64_t master_seed = 11;
  int threads = 1;
  std::vector<MethodConfig> methods = default_methods();
};

struct RateRow {
  int n = 0;
  int p = 0;
  int s0 = 0;
  std::string method;
  double median_loss = 0.0;  // median ‖β̂ − β⁰‖₂²
  double rate_scale = 0.0;   // s₀³ φ⁴_max log p / n
  double ratio = 0.0;        // median_loss / rate_scale
};

/// Unit vector with s equal entries centred in 1..p.
Vector block_vector(int p, int s);

std::vector<RateRow> run_rate_study(const RateStudyConfig& config);

void write_rate_csv(const std::vector<RateRow>& rows, std::ostream& os);

struct ConcentrationConfig {
  VarModelSpec model;
  int n = 1000;
  int replications = 200;
  std::vector<double> quantile_levels = {0.5, 0.9, 0.95, 0.99};
  std::uint64_t master_seed = 13;
  int threads = 1;
};

struct ConcentrationResult {
  int n = 0;
  std::vector<double> levels;
  std::vector<double> wmax_quantiles;
  /// Fraction of replications with λ_min(R̈ₙ(β⁰)) > 0.
  double hessian_pd_rate = 0.0;
  std::vector<double> wmax;             // per replication
  std::vector<double> hessian_min_eig;  // per replication
};

/// Empirical distribution of ‖Σ̂ₙ − Σ₀‖_max and positive-definiteness of the
/// empirical Hessian at β⁰. Gaussian innovations only.
ConcentrationResult run_concentration_check(const ConcentrationConfig& config);

void write_concentration_csv(const std::vector<ConcentrationResult>& results, std::ostream& os);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double level);
double median(std::vector<double> values);

}  // namespace spca::experiments
