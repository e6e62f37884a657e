#include "kinmv/meanfield.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "kinmv/errors.hpp"
#include "kinmv/numeric.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {
namespace {

void CheckShapes(const char* op, const CoefficientField& field,
                 std::span<const double> points,
                 const EmpiricalMeasure& measure) {
  const std::size_t dim = field.state_dim();
  if (measure.size() == 0) {
    throw DomainError(std::string("meanfield: ") + op + ": empty measure");
  }
  if (measure.dim() != dim || points.size() % dim != 0) {
    throw ShapeError(std::string("meanfield: ") + op +
                     ": states must have dimension " + std::to_string(dim));
  }
}

// rows x width table of (1/N) sum_j k(t, points_i, atoms_j).
std::vector<double> KernelMeanField(const CompiledKernel& kernel, double t,
                                    std::span<const double> points,
                                    const EmpiricalMeasure& measure,
                                    unsigned workers) {
  const std::size_t dim = measure.dim();
  const std::size_t rows = points.size() / dim;
  const std::size_t n = measure.size();
  const std::size_t width = kernel.width();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& terms = kernel.kernel().separable();

  // Separable components: one O(N) average per component, shared by all rows.
  std::vector<double> factor(kernel.separable().size(), 0.0);
  std::vector<double> values(n);
  for (std::size_t c = 0; c < kernel.separable().size(); ++c) {
    const auto& comp = kernel.separable()[c];
    const double a = comp.time.Weight(t, terms[comp.term].time);
    if (a == 0.0) continue;
    double mean = 1.0;
    if (terms[comp.term].interaction) {
      ParallelFor(n, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
          values[j] = kernel.InteractionValue(comp, t, measure.atom(j));
        }
      });
      mean = PairwiseSum(values) / static_cast<double>(n);
    }
    factor[c] = a * mean;
  }
  std::vector<double> pair_weight(kernel.pairs().size());
  for (std::size_t c = 0; c < kernel.pairs().size(); ++c) {
    const auto& comp = kernel.pairs()[c];
    pair_weight[c] = comp.time.Weight(t, kernel.kernel().pairs()[comp.term].time);
  }
  const double extension = kernel.extension().ExtensionMass(t);
  (void)inv_n;

  std::vector<double> out(rows * width, 0.0);
  ParallelFor(rows, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> pair_values;
    std::vector<double> mean(width);
    for (std::size_t i = begin; i < end; ++i) {
      std::span<const double> z(points.data() + i * dim, dim);
      std::span<double> row(out.data() + i * width, width);
      for (std::size_t c = 0; c < kernel.separable().size(); ++c) {
        if (factor[c] == 0.0) continue;
        kernel.AccumulateState(kernel.separable()[c], t, z, factor[c], row);
      }
      for (std::size_t c = 0; c < kernel.pairs().size(); ++c) {
        if (pair_weight[c] == 0.0) continue;
        pair_values.assign(n * width, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          kernel.AccumulatePair(kernel.pairs()[c], t, z, measure.atom(j), 1.0,
                                {pair_values.data() + j * width, width});
        }
        for (std::size_t e = 0; e < width; ++e) {
          mean[e] = PairwiseSumStrided(pair_values, e, width, n) /
                    static_cast<double>(n);
          row[e] += pair_weight[c] * mean[e];
        }
      }
      kernel.AddExtension(extension, row);
    }
  });
  return out;
}

std::vector<double> SinglePoint(const char* op, const CoefficientField& field,
                                const CompiledKernel& kernel, double t,
                                std::span<const double> z,
                                const EmpiricalMeasure& measure) {
  CheckShapes(op, field, z, measure);
  if (z.size() != field.state_dim()) {
    throw ShapeError(std::string("meanfield: ") + op + ": expected one state");
  }
  if (!AllFinite(z)) {
    throw DomainError(std::string("meanfield: ") + op + ": non-finite state");
  }
  return KernelMeanField(kernel, t, z, measure, 1);
}

EmpiricalMeasure Restrict(const EmpiricalMeasure& measure,
                          const std::vector<std::size_t>& indices) {
  std::vector<double> atoms;
  atoms.reserve(indices.size() * measure.dim());
  for (std::size_t j : indices) {
    const auto a = measure.atom(j);
    atoms.insert(atoms.end(), a.begin(), a.end());
  }
  return EmpiricalMeasure(std::move(atoms), measure.dim());
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> atoms, std::size_t dim)
    : atoms_(std::move(atoms)), dim_(dim) {
  if (dim == 0 || atoms_.size() % dim != 0) {
    throw ShapeError("meanfield: atom storage is not a multiple of the dimension");
  }
  if (!AllFinite(atoms_)) throw DomainError("meanfield: non-finite atom");
}

std::vector<double> MeanFieldDrift0(const CoefficientField& field, double t,
                                    std::span<const double> z,
                                    const EmpiricalMeasure& measure) {
  return SinglePoint("mf_drift0", field, field.drift0(), t, z, measure);
}

std::vector<double> MeanFieldDrift1(const CoefficientField& field, double t,
                                    std::span<const double> z,
                                    const EmpiricalMeasure& measure) {
  return SinglePoint("mf_drift1", field, field.drift1(), t, z, measure);
}

std::vector<double> MeanFieldDiffusion(const CoefficientField& field, double t,
                                       std::span<const double> z,
                                       const EmpiricalMeasure& measure) {
  return SinglePoint("mf_sigma", field, field.diffusion(), t, z, measure);
}

std::vector<std::size_t> SubsampleIndices(std::size_t n,
                                          const SubsampleSpec& spec) {
  if (spec.size == 0) throw ConfigError("meanfield: subsample size must be >= 1");
  if (spec.size > n) {
    throw ConfigError("meanfield: subsample size " + std::to_string(spec.size) +
                      " exceeds ensemble size " + std::to_string(n));
  }
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  if (spec.size == n) return indices;
  const CounterRng rng(spec.seed, StreamDomain::kSubsample);
  for (std::size_t k = 0; k < spec.size; ++k) {
    const double u = rng.Uniform(spec.step, 0, static_cast<std::uint32_t>(k));
    const std::size_t pick =
        k + std::min(n - k - 1, static_cast<std::size_t>(u * static_cast<double>(n - k)));
    std::swap(indices[k], indices[pick]);
  }
  indices.resize(spec.size);
  std::sort(indices.begin(), indices.end());
  return indices;
}

MeanFieldTable MeanFieldBatch(const CoefficientField& field, double t,
                              std::span<const double> points,
                              const EmpiricalMeasure& measure,
                              unsigned workers) {
  CheckShapes("mf_batch", field, points, measure);
  MeanFieldTable table;
  table.d = field.d();
  table.rows = points.size() / field.state_dim();
  table.drift0 = KernelMeanField(field.drift0(), t, points, measure, workers);
  table.drift1 = KernelMeanField(field.drift1(), t, points, measure, workers);
  table.diffusion =
      KernelMeanField(field.diffusion(), t, points, measure, workers);
  return table;
}

MeanFieldTable MeanFieldBatch(const CoefficientField& field, double t,
                              std::span<const double> points,
                              const EmpiricalMeasure& measure,
                              const SubsampleSpec& subsample,
                              unsigned workers) {
  const auto indices = SubsampleIndices(measure.size(), subsample);
  if (indices.size() == measure.size()) {
    return MeanFieldBatch(field, t, points, measure, workers);
  }
  return MeanFieldBatch(field, t, points, Restrict(measure, indices), workers);
}

}  // namespace kinmv
