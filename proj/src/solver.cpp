#include "spca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spca/errors.hpp"

namespace spca {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0)) throw PreconditionError("lambda must be nonnegative");
  if (tol && !(*tol > 0.0)) throw PreconditionError("tol must be positive");
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  if (l0_local_search_max_p < 0) throw PreconditionError("l0_local_search_max_p must be nonnegative");
  if (max_iter < 0) throw PreconditionError("max_iter must be nonnegative");
  if (const auto* bt = std::get_if<Backtracking>(&step_rule)) {
    if (!(bt->shrink > 0.0 && bt->shrink < 1.0)) {
      throw PreconditionError("backtracking shrink must lie in (0, 1)");
    }
    if (bt->initial_step && !(*bt->initial_step > 0.0)) {
      throw PreconditionError("initial step must be positive");
    }
  } else if (!(std::get<FixedStep>(step_rule).step > 0.0)) {
    throw PreconditionError("fixed step must be positive");
  }
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Vector soft_threshold(const Vector& x, double t) {
  return x.unaryExpr([t](double v) { return soft_threshold(v, t); });
}

Vector hard_threshold(const Vector& x, double t) {
  const double cut = 2.0 * t;
  return x.unaryExpr([cut](double v) { return v * v > cut ? v : 0.0; });
}

std::vector<Eigen::Index> support_of(const Vector& beta, double eps) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta(j)) > eps) s.push_back(j);
  }
  return s;
}

namespace {

double penalty_value(const Vector& beta, Penalty penalty) {
  switch (penalty) {
    case Penalty::L1:
      return beta.lpNorm<1>();
    case Penalty::L0:
      return static_cast<double>(support_of(beta).size());
    case Penalty::None:
      break;
  }
  return 0.0;
}

// −½βᵀ(Σβ) + ¼‖β‖⁴ given a precomputed Σβ.
double smooth_part(const Vector& beta, const Vector& sigma_beta) {
  const double sq = beta.squaredNorm();
  return -0.5 * beta.dot(sigma_beta) + 0.25 * sq * sq;
}

Vector prox(const Vector& x, Penalty penalty, double threshold) {
  switch (penalty) {
    case Penalty::L1:
      return soft_threshold(x, threshold);
    case Penalty::L0:
      return hard_threshold(x, threshold);
    case Penalty::None:
      break;
  }
  return x;
}

// Rayleigh-quotient estimate of ‖Σ‖₂ for the initial step; only a scale.
double spectral_norm_estimate(const Matrix& s) {
  Vector v = Vector::Constant(s.rows(), 1.0 / std::sqrt(static_cast<double>(s.rows())));
  double best = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Vector w = s * v;
    best = std::max(best, std::abs(v.dot(w)));
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
  }
  return best;
}

// Minimizer of Rₙ restricted to `support`, embedded in ℝᵖ.
Vector restricted_beta0(const Matrix& s, const std::vector<Eigen::Index>& support) {
  const auto k = static_cast<Eigen::Index>(support.size());
  Vector out = Vector::Zero(s.rows());
  if (k == 0) return out;
  Matrix sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = s(support[a], support[b]);
  }
  const Vector local = beta0(CovarianceMatrix(std::move(sub)));
  for (Eigen::Index a = 0; a < k; ++a) out(support[a]) = local(a);
  return out;
}

bool inside_ball(const Vector& z, const Vector& center, double radius) {
  return !std::isfinite(radius) || (z - center).norm() <= radius * (1.0 + 1e-12);
}

// Sign of a restricted minimizer is free; take the one nearer the start.
Vector oriented(Vector z, const Vector& start) {
  if (z.dot(start) < 0.0) z = -z;
  return z;
}

// Best-improvement descent on the support of an ℓ0 solution.
void l0_support_search(const CovarianceMatrix& sigma_hat, double lambda, const Vector& start,
                       double eta, Vector& beta, double& objective) {
  const Matrix& s = sigma_hat.data();
  const Eigen::Index p = sigma_hat.p();
  std::vector<char> in(static_cast<std::size_t>(p), 0);
  for (Eigen::Index j : support_of(beta)) in[j] = 1;

  auto score = [&](const std::vector<char>& mask, Vector& candidate) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (mask[j]) support.push_back(j);
    }
    candidate = oriented(restricted_beta0(s, support), start);
    if (!inside_ball(candidate, start, eta)) return std::numeric_limits<double>::infinity();
    return penalized_objective(sigma_hat, candidate, Penalty::L0, lambda);
  };

  // Seed with the best of the current support and the nested supports
  // ordered by |start|, the empty one included.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(start(a)) > std::abs(start(b)); });
  std::vector<std::vector<char>> seeds{in};
  std::vector<char> prefix(static_cast<std::size_t>(p), 0);
  seeds.push_back(prefix);
  for (Eigen::Index k = 0; k < p; ++k) {
    prefix[order[k]] = 1;
    seeds.push_back(prefix);
  }
  for (const auto& seed : seeds) {
    Vector exact;
    const double value = score(seed, exact);
    if (value < objective) {
      objective = value;
      beta = exact;
      in = seed;
    }
  }

  while (true) {
    double best = objective;
    Vector best_beta;
    std::vector<char> best_mask;
    std::vector<char> trial = in;
    Vector candidate;
    auto consider = [&]() {
      const double value = score(trial, candidate);
      if (value < best - 1e-12 * std::max(1.0, std::abs(best))) {
        best = value;
        best_beta = candidate;
        best_mask = trial;
      }
    };
    for (Eigen::Index j = 0; j < p; ++j) {
      trial[j] ^= 1;
      consider();
      trial[j] ^= 1;
    }
    if (best_mask.empty()) {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (!in[i]) continue;
        trial[i] = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
          if (in[j]) continue;
          trial[j] = 1;
          consider();
          trial[j] = 0;
        }
        trial[i] = 1;
      }
    }
    if (best_mask.empty()) break;
    in = std::move(best_mask);
    beta = std::move(best_beta);
    objective = best;
  }
}

void project_to_ball(Vector& z, const Vector& center, double radius) {
  if (!std::isfinite(radius)) return;
  const Vector d = z - center;
  const double dist = d.norm();
  if (dist > radius) z = center + (radius / dist) * d;
}

}  // namespace

double penalized_objective(const CovarianceMatrix& sigma_hat, const Vector& beta, Penalty penalty,
                           double lambda) {
  if (beta.size() != sigma_hat.p()) throw DimensionError("beta length does not match sigma");
  const double sq = beta.squaredNorm();
  const double r = -0.5 * beta.dot(sigma_hat.data() * beta) + 0.25 * sq * sq;
  return penalty == Penalty::None ? r : r + lambda * penalty_value(beta, penalty);
}

SparseEstimate solve(const CovarianceMatrix& sigma_hat, const SolverConfig& config,
                     const std::optional<Vector>& init) {
  config.validate();
  const Matrix& s = sigma_hat.data();
  const Eigen::Index p = sigma_hat.p();

  double spectral_norm = -1.0;
  Vector start;
  if (init) {
    if (init->size() != p) throw DimensionError("initializer length does not match sigma");
    if (!init->allFinite()) throw InputDataError("initializer has non-finite entries");
    start = *init;
  } else {
    const EigenPair pair = leading_eigenpair(sigma_hat);
    spectral_norm = std::abs(pair.value);
    start = std::sqrt(std::max(pair.value, 0.0)) * pair.vector;
  }

  const double init_norm = start.norm();
  const double tol = config.tol.value_or(1e-8 * (1.0 + init_norm));
  const double lambda = config.penalty == Penalty::None ? 0.0 : config.lambda;

  const auto* backtracking = std::get_if<Backtracking>(&config.step_rule);
  double step = 0.0;
  if (backtracking) {
    if (backtracking->initial_step) {
      step = *backtracking->initial_step;
    } else {
      if (spectral_norm < 0.0) spectral_norm = spectral_norm_estimate(s);
      step = 1.0 / (spectral_norm + 3.0 * (init_norm + 1.0) * (init_norm + 1.0));
    }
  } else {
    step = std::get<FixedStep>(config.step_rule).step;
  }
  const double min_step = step * 1e-30;

  SparseEstimate out;
  Vector beta = start;
  Vector sigma_beta = s * beta;
  double smooth = smooth_part(beta, sigma_beta);
  double objective = smooth + lambda * penalty_value(beta, config.penalty);
  if (config.record_trace) out.step_trace.push_back(objective);

  for (int it = 1; it <= config.max_iter; ++it) {
    const Vector grad = -sigma_beta + beta.squaredNorm() * beta;

    Vector z;
    Vector sigma_z;
    double smooth_z = 0.0;
    double objective_z = 0.0;
    bool accepted = false;
    while (true) {
      z = prox(beta - step * grad, config.penalty, step * lambda);
      project_to_ball(z, start, config.eta);
      if (!z.allFinite()) throw NumericalError("non-finite iterate in proximal gradient");
      sigma_z = s * z;
      smooth_z = smooth_part(z, sigma_z);
      objective_z = smooth_z + lambda * penalty_value(z, config.penalty);
      if (!backtracking) {
        accepted = true;
        break;
      }
      const Vector d = z - beta;
      const double slack = 1e-12 * std::max(1.0, std::abs(objective));
      const bool majorized = smooth_z <= smooth + grad.dot(d) + d.squaredNorm() / (2.0 * step) + slack;
      if (majorized && objective_z <= objective + slack) {
        accepted = true;
        break;
      }
      step *= backtracking->shrink;
      if (step < min_step) break;
    }
    if (!std::isfinite(objective_z)) throw NumericalError("non-finite objective in proximal gradient");
    if (!accepted) break;

    const double delta = (z - beta).norm();
    beta = std::move(z);
    sigma_beta = std::move(sigma_z);
    smooth = smooth_z;
    objective = objective_z;
    out.iterations = it;
    if (config.record_trace) out.step_trace.push_back(objective);
    if (delta <= tol) {
      out.converged = true;
      break;
    }
  }
  if (config.max_iter == 0) out.converged = false;

  if (config.penalty == Penalty::L0 && config.l0_local_search && p <= config.l0_local_search_max_p) {
    l0_support_search(sigma_hat, lambda, start, config.eta, beta, objective);
  }

  if (config.sign_align && beta.dot(start) < 0.0) beta = -beta;

  out.support = support_of(beta);
  out.objective = objective;
  out.final_step = step;
  out.beta = std::move(beta);
  return out;
}

SparseEstimate solve_l0_exhaustive(const CovarianceMatrix& sigma_hat, double lambda0, int max_p) {
  const Eigen::Index p = sigma_hat.p();
  if (p > max_p) {
    std::ostringstream msg;
    msg << "exhaustive l0 search limited to p <= " << max_p << " (got " << p << ")";
    throw PreconditionError(msg.str());
  }
  if (p >= 31) throw PreconditionError("exhaustive l0 search supports at most 30 coordinates");
  if (!(lambda0 >= 0.0)) throw PreconditionError("lambda0 must be nonnegative");

  const Matrix& s = sigma_hat.data();
  SparseEstimate best;
  best.beta = Vector::Zero(p);
  best.objective = 0.0;
  best.converged = true;

  const unsigned long total = 1UL << p;
  for (unsigned long mask = 1; mask < total; ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (mask & (1UL << j)) idx.push_back(j);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = s(idx[a], idx[b]);
    }
    const Vector local = beta0(CovarianceMatrix(std::move(sub)));
    Vector candidate = Vector::Zero(p);
    for (Eigen::Index a = 0; a < k; ++a) candidate(idx[a]) = local(a);
    const double obj = penalized_objective(sigma_hat, candidate, Penalty::L0, lambda0);
    if (obj < best.objective) {
      best.objective = obj;
      best.beta = std::move(candidate);
    }
  }
  best.iterations = static_cast<int>(total);
  best.support = support_of(best.beta);
  return best;
}

}  // namespace spca
