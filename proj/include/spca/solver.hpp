#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "spca/covariance.hpp"

namespace spca {

/// Coordinates with |βⱼ| above this count as selected ("Size").
inline constexpr double kSupportEps = 1e-10;

enum class Penalty { None, L1, L0 };

struct FixedStep {
  double step;
};

/// Backtracking on the proximal-gradient majorization. When `initial_step`
/// is unset the first trial step is 1/L̂ with L̂ = ‖Σ̂‖₂ + 3(‖init‖₂ + 1)².
struct Backtracking {
  double shrink = 0.5;
  std::optional<double> initial_step;
};

using StepRule = std::variant<FixedStep, Backtracking>;

struct SolverConfig {
  Penalty penalty = Penalty::L1;
  double lambda = 0.0;
  /// Radius of the feasible ball around the initializer; infinity disables
  /// the projection.
  double eta = std::numeric_limits<double>::infinity();
  int max_iter = 10000;
  /// Stop when ‖β_{k+1} − β_k‖₂ ≤ tol. Unset means 1e-8·(1 + ‖init‖₂).
  std::optional<double> tol;
  StepRule step_rule = Backtracking{};
  bool sign_align = true;
  bool record_trace = false;
  /// ℓ0 only: after the hard-thresholding loop, best-improvement local search
  /// over supports (drop, add or swap one coordinate), each support scored by
  /// its exact restricted minimum. Runs when p <= l0_local_search_max_p.
  bool l0_local_search = true;
  int l0_local_search_max_p = 64;

  /// Throws PreconditionError on lambda < 0, tol <= 0, eta <= 0, a bad
  /// shrink factor or a non-positive fixed step.
  void validate() const;
};

struct SparseEstimate {
  Vector beta;
  std::vector<Eigen::Index> support;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Step size used by the last accepted iteration.
  double final_step = 0.0;
  std::vector<double> step_trace;
};

double soft_threshold(double x, double t);
Vector soft_threshold(const Vector& x, double t);

/// Exact proximal map of t·‖·‖₀: keeps xⱼ when xⱼ² > 2t, ties go to zero.
Vector hard_threshold(const Vector& x, double t);

std::vector<Eigen::Index> support_of(const Vector& beta, double eps = kSupportEps);

/// Rₙ(β) + λ·pen(β); the penalty term is dropped for Penalty::None.
double penalized_objective(const CovarianceMatrix& sigma_hat, const Vector& beta, Penalty penalty,
                           double lambda);

/// Proximal gradient for the ℓ1 / ℓ0 / unpenalized rank-one objective.
/// Starts from `init`, or from β⁰(Σ̂) when absent. Non-convergence is
/// reported through SparseEstimate::converged; a non-finite iterate throws
/// NumericalError.
SparseEstimate solve(const CovarianceMatrix& sigma_hat, const SolverConfig& config,
                     const std::optional<Vector>& init = std::nullopt);

/// Global minimizer of Rₙ(β) + λ₀‖β‖₀ by enumerating all 2^p supports.
/// Throws PreconditionError when p > max_p.
SparseEstimate solve_l0_exhaustive(const CovarianceMatrix& sigma_hat, double lambda0,
                                   int max_p = 12);

}  // namespace spca
