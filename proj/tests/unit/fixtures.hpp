#pragma once

#include <cmath>
#include <vector>

#include "kinmv/coefficients.hpp"

namespace kinmv::testing {

inline std::vector<double> Diagonal(std::size_t d, double value) {
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = value;
  return m;
}

// b0 = b1 = 0, sigma = value * I, declared ellipticity `nu`.
inline CoefficientSet ScalarDiffusion(std::size_t d, double value, double nu) {
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  if (value != 0.0) sigma.Add(terms::Constant(Diagonal(d, value)));
  const double bound = std::max(std::abs(value) * std::sqrt(double(d)), 1.0);
  return CoefficientSet("scalar", std::move(b0), std::move(b1), std::move(sigma),
                        {bound, nu, {}, {}});
}

// b0 = value * 1, b1 = 0, sigma = I.
inline CoefficientSet ConstantDrift0(std::size_t d, double value) {
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  b0.Add(terms::Constant(std::vector<double>(d, value)));
  sigma.Add(terms::Constant(Diagonal(d, 1.0)));
  return CoefficientSet("drift0", std::move(b0), std::move(b1), std::move(sigma),
                        {std::abs(value) * std::sqrt(double(d)) + std::sqrt(double(d)),
                         1.0, {}, {}});
}

}  // namespace kinmv::testing

#include "kinmv/integrator.hpp"

namespace kinmv::testing {

// Makes the Wiener increments of steps [from, to) a copy of the ones that
// drove the path just before `from`, so W(to) - W(from) is no longer
// independent of the past. The stored states are left untouched.
inline TrajectoryStore LeakIncrements(TrajectoryStore store, std::size_t from,
                                      std::size_t to) {
  const std::size_t width = to - from;
  for (std::size_t k = 0; k < width; ++k) {
    store.increments[from + k] = store.increments[from - width + k];
  }
  return store;
}

}  // namespace kinmv::testing
