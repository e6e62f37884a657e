#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace kinmv {

// Pairwise (tree) summation with a fixed split rule: the association of the
// additions depends only on values.size(), never on scheduling.
double PairwiseSum(std::span<const double> values) noexcept;

// Strided pairwise sum: adds values[offset + k * stride] for k < count.
double PairwiseSumStrided(std::span<const double> values, std::size_t offset,
                          std::size_t stride, std::size_t count) noexcept;

double EuclideanNorm(std::span<const double> v) noexcept;

// Smallest eigenvalue of a symmetric dim x dim row-major matrix.
double MinEigenvalueSymmetric(std::span<const double> matrix, std::size_t dim);

bool AllFinite(std::span<const double> v) noexcept;

// Splits [0, count) into contiguous chunks, one per worker, and calls
// body(begin, end) for each. The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Body>
void ParallelFor(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, count);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kinmv
