#include "spca/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace spca::kernels {
namespace {

// Four independent accumulators; summation order depends only on n, so the
// result of an entry never depends on which thread computed it.
double column_dot(const double* a, const double* b, Eigen::Index n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  Eigen::Index t = 0;
  for (; t + 4 <= n; t += 4) {
    s0 += a[t] * b[t];
    s1 += a[t + 1] * b[t + 1];
    s2 += a[t + 2] * b[t + 2];
    s3 += a[t + 3] * b[t + 3];
  }
  for (; t < n; ++t) s0 += a[t] * b[t];
  return (s0 + s1) + (s2 + s3);
}

int resolve_threads(int threads) {
  return threads > 0 ? threads : default_thread_count();
}

}  // namespace

Eigen::MatrixXd gram_serial(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd g(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) s += x(t, i) * x(t, j);
      g(i, j) = s / static_cast<double>(n);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

Eigen::MatrixXd gram_parallel(const Eigen::MatrixXd& x, int threads) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd g(p, p);
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_threads(threads))
  for (Eigen::Index j = 0; j < p; ++j) {
    const double* cj = x.col(j).data();
    for (Eigen::Index i = j; i < p; ++i) {
      g(i, j) = column_dot(x.col(i).data(), cj, n) * inv_n;
    }
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

void for_each_index_parallel(std::size_t count, int threads,
                             const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto signed_count = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (long long i = 0; i < signed_count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int default_thread_count() {
  if (const char* env = std::getenv("SPCA_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

}  // namespace spca::kernels
