#include "spca/covariance.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "spca/errors.hpp"
#include "spca/kernels.hpp"

namespace spca {

TimeSeriesMatrix::TimeSeriesMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InputDataError("time series matrix must have at least one row and one column");
  }
  for (Eigen::Index j = 0; j < data_.cols(); ++j) {
    for (Eigen::Index t = 0; t < data_.rows(); ++t) {
      if (!std::isfinite(data_(t, j))) {
        std::ostringstream msg;
        msg << "non-finite entry at row " << t + 1 << ", column " << j + 1;
        throw InputDataError(msg.str());
      }
    }
  }
}

CovarianceMatrix::CovarianceMatrix(Matrix data, Kind kind) : data_(std::move(data)), kind_(kind) {
  if (data_.rows() != data_.cols() || data_.rows() < 1) {
    throw DimensionError("covariance matrix must be square and non-empty");
  }
  if (!data_.allFinite()) throw InputDataError("covariance matrix has non-finite entries");
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "matrix is not symmetric (max asymmetry " << asym << ")";
    throw InputDataError(msg.str());
  }
}

bool CovarianceMatrix::is_psd() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(data_, Eigen::EigenvaluesOnly);
  const double floor = -1e-10 * std::abs(data_.trace()) / static_cast<double>(p());
  return es.eigenvalues().minCoeff() >= floor;
}

CovarianceMatrix sample_covariance(const TimeSeriesMatrix& x, int threads) {
  return CovarianceMatrix(kernels::gram_parallel(x.data(), threads));
}

void normalize_sign(Vector& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > 1e-12) {
      if (v(j) < 0) v = -v;
      return;
    }
  }
}

namespace {

// A few steps of power iteration restricted to the orthogonal complement of
// `v`. Returns a vector whose Rayleigh quotient exceeds `value` if one is
// found, or an empty vector otherwise.
Vector probe_complement(const Matrix& s, const Vector& v, double value, double tol,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector z(v.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
  for (int step = 0; step < 8; ++step) {
    z -= v.dot(z) * v;
    const double norm = z.norm();
    if (norm == 0.0) return {};
    z /= norm;
    const Vector y = s * z;
    if (z.dot(y) > value + tol) return z;
    z = y;
  }
  return {};
}

}  // namespace

EigenPair leading_eigenpair(const CovarianceMatrix& cov, const PowerIterationOptions& options) {
  if (!(options.tol > 0.0)) throw PreconditionError("power iteration tolerance must be positive");
  if (options.max_iter < 1) throw PreconditionError("power iteration needs max_iter >= 1");

  const Matrix& s = cov.data();
  const Eigen::Index p = cov.p();
  Vector v = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
  Vector d;   // previous search direction
  Vector sd;  // s * d
  bool probed = false;
  double residual = 0.0;

  for (int it = 1; it <= options.max_iter; ++it) {
    const Vector w = s * v;
    const double value = v.dot(w);
    if (!std::isfinite(value)) throw NumericalError("power iteration produced a non-finite value");
    Vector r = w - value * v;
    residual = r.norm();

    if (residual <= options.tol) {
      if (!probed) {
        probed = true;
        Vector better = probe_complement(s, v, value, options.tol, options.fallback_seed);
        if (better.size() != 0) {
          v = std::move(better);
          d.resize(0);
          continue;
        }
      }
      EigenPair out{value, v, it, residual};
      normalize_sign(out.vector);
      return out;
    }

    // Rayleigh-Ritz on span{v, r, d}: the power step s*v lies in span{v, r},
    // so the new iterate is never worse than a plain power step.
    r -= v.dot(r) * v;
    r /= r.norm();
    const Vector sr = s * r;
    int k = 2;
    if (d.size() != 0) {
      const double cv = v.dot(d), cr = r.dot(d);
      d -= cv * v + cr * r;
      sd -= cv * w + cr * sr;
      const double dn = d.norm();
      if (dn > 1e-10) {
        d /= dn;
        sd /= dn;
        k = 3;
      }
    }
    Matrix basis(p, k), image(p, k);
    basis.col(0) = v;
    basis.col(1) = r;
    image.col(0) = w;
    image.col(1) = sr;
    if (k == 3) {
      basis.col(2) = d;
      image.col(2) = sd;
    }
    Matrix g = basis.transpose() * image;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> small(g);
    const Vector c = small.eigenvectors().col(k - 1);

    d = basis.rightCols(k - 1) * c.tail(k - 1);
    sd = image.rightCols(k - 1) * c.tail(k - 1);
    v = basis * c;
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw NumericalError("power iteration produced a degenerate iterate");
    v /= norm;
  }

  std::ostringstream msg;
  msg << "power iteration did not converge in " << options.max_iter
      << " iterations (residual " << residual << ")";
  throw ConvergenceError(msg.str(), residual);
}

EigenPair leading_eigenpair(const CovarianceMatrix& s, double tol, int max_iter) {
  PowerIterationOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return leading_eigenpair(s, options);
}

Vector beta0(const CovarianceMatrix& s, const PowerIterationOptions& options) {
  const EigenPair pair = leading_eigenpair(s, options);
  return std::sqrt(std::max(pair.value, 0.0)) * pair.vector;
}

}  // namespace spca
