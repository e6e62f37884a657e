#include "kinmv/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "kinmv/errors.hpp"

namespace kinmv {
namespace {

constexpr std::size_t kPairwiseBlock = 8;

double SumStrided(const double* data, std::size_t stride, std::size_t count) {
  if (count <= kPairwiseBlock) {
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) sum += data[k * stride];
    return sum;
  }
  const std::size_t half = count / 2;
  return SumStrided(data, stride, half) +
         SumStrided(data + half * stride, stride, count - half);
}

}  // namespace

double PairwiseSum(std::span<const double> values) noexcept {
  return SumStrided(values.data(), 1, values.size());
}

double PairwiseSumStrided(std::span<const double> values, std::size_t offset,
                          std::size_t stride, std::size_t count) noexcept {
  if (count == 0) return 0.0;
  return SumStrided(values.data() + offset, stride, count);
}

double EuclideanNorm(std::span<const double> v) noexcept {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double MinEigenvalueSymmetric(std::span<const double> matrix,
                              std::size_t dim) {
  if (matrix.size() != dim * dim) {
    throw ShapeError("numeric: matrix has " + std::to_string(matrix.size()) +
                     " entries, expected " + std::to_string(dim * dim));
  }
  if (dim == 1) return matrix[0];
  if (dim == 2) {
    const double a = matrix[0], b = matrix[1], c = matrix[3];
    const double mean = 0.5 * (a + c);
    const double half_gap = std::hypot(0.5 * (a - c), b);
    return mean - half_gap;
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      m(matrix.data(), static_cast<Eigen::Index>(dim),
        static_cast<Eigen::Index>(dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool AllFinite(std::span<const double> v) noexcept {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace kinmv
