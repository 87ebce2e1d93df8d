#include "spca/risk.hpp"

#include <sstream>

#include "spca/errors.hpp"

namespace spca {
namespace {

void check_dims(const RiskContext& ctx, const Vector& beta) {
  if (beta.size() != ctx.p()) {
    std::ostringstream msg;
    msg << "beta has length " << beta.size() << " but sigma is " << ctx.p() << "x" << ctx.p();
    throw DimensionError(msg.str());
  }
}

}  // namespace

double risk(const RiskContext& ctx, const Vector& beta) {
  check_dims(ctx, beta);
  const double sq = beta.squaredNorm();
  return -0.5 * beta.dot(ctx.sigma() * beta) + 0.25 * sq * sq;
}

Vector risk_gradient(const RiskContext& ctx, const Vector& beta) {
  check_dims(ctx, beta);
  return -(ctx.sigma() * beta) + beta.squaredNorm() * beta;
}

Matrix risk_hessian(const RiskContext& ctx, const Vector& beta) {
  check_dims(ctx, beta);
  Matrix h = -ctx.sigma();
  h.diagonal().array() += beta.squaredNorm();
  h.noalias() += 2.0 * beta * beta.transpose();
  return h;
}

Deviation deviation_matrix(const CovarianceMatrix& sigma_hat, const CovarianceMatrix& sigma0) {
  if (sigma_hat.p() != sigma0.p()) {
    throw DimensionError("deviation needs matrices of equal dimension");
  }
  CovarianceMatrix w(sigma_hat.data() - sigma0.data(), CovarianceMatrix::Kind::Deviation);
  const double max_norm = w.max_norm();
  return {std::move(w), max_norm};
}

}  // namespace spca
