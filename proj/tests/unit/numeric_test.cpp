#include <cmath>
#include <atomic>
#include <numeric>

#include <gtest/gtest.h>

#include "kinmv/numeric.hpp"

namespace kinmv {
namespace {

TEST(PairwiseSum, SmallAndLarge) {
  EXPECT_EQ(PairwiseSum(std::vector<double>{}), 0.0);
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(PairwiseSum(v), 500500.0);
  EXPECT_EQ(PairwiseSumStrided(v, 1, 2, 500), 250500.0);  // 2 + 4 + ... + 1000
}

TEST(PairwiseSum, BetterThanNaiveOnTinyTerms) {
  std::vector<double> v(1 << 20, 0.1);
  const double exact = 0.1 * (1 << 20);
  EXPECT_NEAR(PairwiseSum(v), exact, 1e-9);
}

TEST(MinEigenvalue, ClosedFormsAndEigen) {
  EXPECT_EQ(MinEigenvalueSymmetric(std::vector<double>{2.5}, 1), 2.5);
  EXPECT_NEAR(MinEigenvalueSymmetric(std::vector<double>{2, 1, 1, 2}, 2), 1.0, 1e-15);
  // diag(3, 1, 2) rotated by a permutation stays diag.
  EXPECT_NEAR(MinEigenvalueSymmetric(std::vector<double>{3, 0, 0, 0, 1, 0, 0, 0, 2}, 3),
              1.0, 1e-14);
  // [[2,-1,0],[-1,2,-1],[0,-1,2]] has eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
  EXPECT_NEAR(MinEigenvalueSymmetric(std::vector<double>{2, -1, 0, -1, 2, -1, 0, -1, 2}, 3),
              2.0 - std::sqrt(2.0), 1e-14);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (unsigned workers : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    ParallelFor(hits.size(), workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(ParallelFor(10, 4,
                           [](std::size_t b, std::size_t) {
                             if (b > 0) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

}  // namespace
}  // namespace kinmv
