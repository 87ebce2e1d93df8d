#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace spca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observation stretch X₁,…,Xₙ stored with rows = time, columns = coordinates.
/// Construction rejects empty or non-finite data.
class TimeSeriesMatrix {
 public:
  explicit TimeSeriesMatrix(Matrix data);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }

 private:
  Matrix data_;
};

/// Symmetric p×p matrix: a covariance (Σ₀, Σ̂ₙ) or a deviation between two
/// covariances. Symmetry is checked on construction; positive
/// semi-definiteness is only checked on request because it needs a full
/// spectrum.
class CovarianceMatrix {
 public:
  enum class Kind { Covariance, Deviation };

  explicit CovarianceMatrix(Matrix data, Kind kind = Kind::Covariance);

  const Matrix& data() const noexcept { return data_; }
  Eigen::Index p() const noexcept { return data_.rows(); }
  Kind kind() const noexcept { return kind_; }

  /// All eigenvalues ≥ −1e-10·(trace/p).
  bool is_psd() const;

  /// maxᵢⱼ |Sᵢⱼ|
  double max_norm() const { return data_.cwiseAbs().maxCoeff(); }

 private:
  Matrix data_;
  Kind kind_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  double residual = 0.0;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  /// Seed of the fallback start vector used when the deterministic start
  /// turns out to be orthogonal to the dominant eigenspace.
  std::uint64_t fallback_seed = 0x5eed5eedULL;
};

/// Σ̂ₙ = (1/n) XᵀX without mean subtraction. threads <= 0 uses the default
/// worker count; the result does not depend on the thread count.
CovarianceMatrix sample_covariance(const TimeSeriesMatrix& x, int threads = 1);

/// Flips `v` so that its first entry with |vⱼ| > 1e-12 is positive.
void normalize_sign(Vector& v);

/// Dominant eigenpair by power iteration, stopping once
/// ‖Sv − (vᵀSv)v‖₂ ≤ tol. Throws ConvergenceError after max_iter steps.
EigenPair leading_eigenpair(const CovarianceMatrix& s, const PowerIterationOptions& options = {});
EigenPair leading_eigenpair(const CovarianceMatrix& s, double tol, int max_iter);

/// β⁰ = φ_max q⁰ for a PSD matrix with leading eigenpair (φ²_max, q⁰).
Vector beta0(const CovarianceMatrix& s, const PowerIterationOptions& options = {});

}  // namespace spca
