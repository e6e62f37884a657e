#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kinmv/field.hpp"

namespace kinmv {

// Uniform measure on N atoms of R^{dim}, stored row-major.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::vector<double> atoms, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size() / dim_; }
  std::span<const double> atom(std::size_t j) const noexcept {
    return {atoms_.data() + j * dim_, dim_};
  }
  std::span<const double> atoms() const noexcept { return atoms_; }

 private:
  std::vector<double> atoms_;
  std::size_t dim_;
};

// (1/N) sum_j b0(t, z, zeta_j), and likewise for b1 and sigma. Throws
// DomainError for an empty measure, ShapeError on dimension mismatch.
std::vector<double> MeanFieldDrift0(const CoefficientField& field, double t,
                                    std::span<const double> z,
                                    const EmpiricalMeasure& measure);
std::vector<double> MeanFieldDrift1(const CoefficientField& field, double t,
                                    std::span<const double> z,
                                    const EmpiricalMeasure& measure);
std::vector<double> MeanFieldDiffusion(const CoefficientField& field, double t,
                                       std::span<const double> z,
                                       const EmpiricalMeasure& measure);

// Per-row mean-field coefficients, row-major: drift0/drift1 are rows x d,
// diffusion rows x d x d.
struct MeanFieldTable {
  std::size_t rows = 0;
  std::size_t d = 0;
  std::vector<double> drift0;
  std::vector<double> drift1;
  std::vector<double> diffusion;

  std::span<const double> Drift0(std::size_t i) const noexcept {
    return {drift0.data() + i * d, d};
  }
  std::span<const double> Drift1(std::size_t i) const noexcept {
    return {drift1.data() + i * d, d};
  }
  std::span<const double> Diffusion(std::size_t i) const noexcept {
    return {diffusion.data() + i * d * d, d * d};
  }
};

// Seeded subsample of the measure atoms. With size == N the full measure is
// used unchanged.
struct SubsampleSpec {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::uint32_t step = 0;  // selects a fresh subsample per time step
};

// Indices of the subsample in increasing order.
std::vector<std::size_t> SubsampleIndices(std::size_t n, const SubsampleSpec& spec);

// Evaluates the three mean-field coefficients at every point of `points`
// (row-major, 2d columns) against `measure`. Rows are independent and the
// reductions over atoms use a fixed pairwise order, so the table does not
// depend on `workers`.
MeanFieldTable MeanFieldBatch(const CoefficientField& field, double t,
                              std::span<const double> points,
                              const EmpiricalMeasure& measure,
                              unsigned workers = 1);

// Same, with the measure replaced by a subsample of its atoms. Throws
// ConfigError for size 0 or size > N.
MeanFieldTable MeanFieldBatch(const CoefficientField& field, double t,
                              std::span<const double> points,
                              const EmpiricalMeasure& measure,
                              const SubsampleSpec& subsample,
                              unsigned workers = 1);

}  // namespace kinmv
