#pragma once

#include <utility>

#include "spca/covariance.hpp"

namespace spca {

/// Holds the matrix the risk is evaluated against: Σ₀ for the theoretical
/// risk R, Σ̂ₙ for the empirical risk Rₙ. Same formulas either way.
class RiskContext {
 public:
  explicit RiskContext(CovarianceMatrix sigma) : sigma_(std::move(sigma)) {}

  const Matrix& sigma() const noexcept { return sigma_.data(); }
  Eigen::Index p() const noexcept { return sigma_.p(); }

 private:
  CovarianceMatrix sigma_;
};

/// −½βᵀΣβ + ¼‖β‖₂⁴
double risk(const RiskContext& ctx, const Vector& beta);

/// −Σβ + ‖β‖₂²β
Vector risk_gradient(const RiskContext& ctx, const Vector& beta);

/// −Σ + ‖β‖₂²I + 2ββᵀ
Matrix risk_hessian(const RiskContext& ctx, const Vector& beta);

struct Deviation {
  CovarianceMatrix matrix;
  double max_norm;
};

/// Wₙ = Σ̂ₙ − Σ₀ together with ‖Wₙ‖_max.
Deviation deviation_matrix(const CovarianceMatrix& sigma_hat, const CovarianceMatrix& sigma0);

}  // namespace spca
