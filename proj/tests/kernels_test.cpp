#include "spca/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace spca::kernels {
namespace {

TEST(Gram, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(21);
  for (auto [n, p] : {std::pair{7, 3}, std::pair{64, 33}, std::pair{129, 50}}) {
    const Matrix x = testing::random_gaussian(n, p, rng);
    const Matrix ref = gram_serial(x);
    const Matrix fast = gram_parallel(x, 3);
    EXPECT_LT((ref - fast).cwiseAbs().maxCoeff(), 1e-13) << n << "x" << p;
    EXPECT_TRUE(fast.isApprox(x.transpose() * x / n, 1e-12));
  }
}

TEST(Gram, BitwiseIdenticalAcrossThreadCounts) {
  std::mt19937_64 rng(22);
  const Matrix x = testing::random_gaussian(101, 47, rng);
  const Matrix one = gram_parallel(x, 1);
  for (int threads : {2, 3, 8}) {
    const Matrix many = gram_parallel(x, threads);
    EXPECT_EQ((one - many).cwiseAbs().maxCoeff(), 0.0) << threads;
  }
  EXPECT_EQ(one, one.transpose());
}

TEST(ForEachIndex, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(57);
  for_each_index_parallel(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);

  std::vector<int> order;
  for_each_index_serial(5, [&](std::size_t i) { order.push_back(static_cast<int>(i)); });
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(ForEachIndex, RethrowsLowestFailingIndex) {
  try {
    for_each_index_parallel(20, 4, [](std::size_t i) {
      if (i == 7 || i == 13) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "index 7");
  }
}

}  // namespace
}  // namespace spca::kernels
