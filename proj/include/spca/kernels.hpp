#pragma once

// Data-parallel kernels. Every parallel kernel has a serial reference kept
// for tests and benchmarks; the parallel versions produce bitwise-identical
// results for any thread count.

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace spca::kernels {

/// (1/n) XᵀX with plain triple loops. Reference implementation.
Eigen::MatrixXd gram_serial(const Eigen::MatrixXd& x);

/// (1/n) XᵀX, columns distributed over `threads` OpenMP workers.
/// threads <= 0 uses the OpenMP default.
Eigen::MatrixXd gram_parallel(const Eigen::MatrixXd& x, int threads);

/// Runs body(0..count-1) in index order on the calling thread.
void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body);

/// Runs body(0..count-1) on an OpenMP team. The first exception thrown by any
/// index (lowest index wins) is rethrown after the team joins.
void for_each_index_parallel(std::size_t count, int threads,
                             const std::function<void(std::size_t)>& body);

/// Thread count used when callers pass 0: SPCA_THREADS if set, else the
/// OpenMP default.
int default_thread_count();

}  // namespace spca::kernels
