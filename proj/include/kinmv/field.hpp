#pragma once

// Coefficient kernels and their compiled evaluation plans.
//
// A kernel k(t, z, zeta) with z = (x, y), zeta = (xi, eta) in R^{2d} is a sum
// of terms of two kinds:
//
//   separable:  a(t) * U(t, z) * v(t, zeta)      U vector/matrix, v scalar
//   pair:       a(t) * P(t, z, zeta)             general
//
// Each factor declares the axes it depends on. Averaging a separable term over
// an empirical measure costs O(N) instead of O(N^2), and smoothing by a product
// kernel only has to integrate over the declared axes (the marginal weights of
// the other axes sum to one).
//
// A CompiledKernel is a list of weighted components; the raw kernel compiles
// to one component per term and a mollified kernel to one component per time
// node (or per quadrature node for joint node sets).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace kinmv {

using AxisMask = unsigned;

namespace axis {
inline constexpr AxisMask kNone = 0;
inline constexpr AxisMask kTime = 1u << 0;
inline constexpr AxisMask kX = 1u << 1;
inline constexpr AxisMask kY = 1u << 2;
inline constexpr AxisMask kXi = 1u << 3;
inline constexpr AxisMask kEta = 1u << 4;
inline constexpr AxisMask kState = kX | kY;
inline constexpr AxisMask kInteraction = kXi | kEta;
inline constexpr AxisMask kAll = kTime | kState | kInteraction;
}  // namespace axis

enum class KernelShape { kVector, kMatrix };

using TimeProfile = std::function<double(double t)>;
using StateFactor =
    std::function<void(double t, std::span<const double> z, std::span<double> out)>;
using InteractionFactor =
    std::function<double(double t, std::span<const double> zeta)>;
using PairFunction =
    std::function<void(double t, std::span<const double> z,
                       std::span<const double> zeta, std::span<double> out)>;

// a(t) * U(t, z) * v(t, zeta). An empty `time` or `interaction` is the
// constant 1. Matrix-valued U must write a bitwise symmetric matrix.
struct SeparableTerm {
  TimeProfile time;
  StateFactor state;
  AxisMask state_axes = axis::kNone;  // subset of kTime | kX | kY
  InteractionFactor interaction;
  AxisMask interaction_axes = axis::kNone;  // subset of kTime | kXi | kEta
};

struct PairTerm {
  TimeProfile time;
  PairFunction function;
  AxisMask axes = axis::kAll;
};

class Kernel {
 public:
  Kernel(KernelShape shape, std::size_t d);

  Kernel& Add(SeparableTerm term);
  Kernel& Add(PairTerm term);

  KernelShape shape() const noexcept { return shape_; }
  std::size_t d() const noexcept { return d_; }
  // Number of output entries: d for vectors, d*d for matrices.
  std::size_t width() const noexcept;

  const std::vector<SeparableTerm>& separable() const noexcept {
    return separable_;
  }
  const std::vector<PairTerm>& pairs() const noexcept { return pairs_; }

 private:
  KernelShape shape_;
  std::size_t d_;
  std::vector<SeparableTerm> separable_;
  std::vector<PairTerm> pairs_;
};

// Time weight of a component:  sum_k w_k * tie(t - s_k) * a(t - s_k),
// where tie(u) = 1 for u > 0, 1/2 for u = 0 and 0 for u < 0. The kernel is
// extended by zero (drifts) or the identity (diffusion) for negative times, so
// a node straddling t' = 0 splits its mass evenly. An unconditional weight is
// just a(t).
struct TimeWeights {
  bool unconditional = true;
  std::vector<double> shifts;
  std::vector<double> weights;

  double Weight(double t, const TimeProfile& profile) const;
  // Mass of the nodes that land on negative times.
  double ExtensionMass(double t) const;
};

// A weighted node set over `dim` coordinates; an empty offset table is the
// single node 0 with weight 1.
struct OffsetRule {
  std::size_t dim = 0;
  std::vector<double> weights{1.0};
  std::vector<double> offsets;

  std::size_t size() const noexcept { return weights.size(); }
  bool identity() const noexcept { return offsets.empty(); }
  std::span<const double> offset(std::size_t k) const noexcept {
    return {offsets.data() + k * dim, dim};
  }
};

struct SeparableComponent {
  std::size_t term = 0;
  double shift = 0.0;  // factors are evaluated at t - shift
  TimeWeights time;
  OffsetRule state_rule;        // offsets over z (2d coordinates)
  OffsetRule interaction_rule;  // offsets over zeta (2d coordinates)
};

struct PairComponent {
  std::size_t term = 0;
  double shift = 0.0;
  TimeWeights time;
  // Tensor plans use the product of both rules; joint plans give both rules
  // one node each.
  OffsetRule state_rule;
  OffsetRule interaction_rule;
};

class CompiledKernel {
 public:
  // One component per term, no smoothing.
  static CompiledKernel Raw(std::shared_ptr<const Kernel> kernel);

  CompiledKernel(std::shared_ptr<const Kernel> kernel,
                 std::vector<SeparableComponent> separable,
                 std::vector<PairComponent> pairs, TimeWeights extension);

  const Kernel& kernel() const noexcept { return *kernel_; }
  std::size_t d() const noexcept { return kernel_->d(); }
  std::size_t width() const noexcept { return kernel_->width(); }
  KernelShape shape() const noexcept { return kernel_->shape(); }

  const std::vector<SeparableComponent>& separable() const noexcept {
    return separable_;
  }
  const std::vector<PairComponent>& pairs() const noexcept { return pairs_; }
  const TimeWeights& extension() const noexcept { return extension_; }

  // out = k(t, z, zeta). No argument validation.
  void Evaluate(double t, std::span<const double> z,
                std::span<const double> zeta, std::span<double> out) const;

  // Smoothed state factor of component c at time t - shift, accumulated into
  // `out` with scale `factor`.
  void AccumulateState(const SeparableComponent& c, double t,
                       std::span<const double> z, double factor,
                       std::span<double> out) const;
  // Smoothed interaction factor of component c (1 when the term has none).
  double InteractionValue(const SeparableComponent& c, double t,
                          std::span<const double> zeta) const;
  // Smoothed pair function of component c accumulated into `out`.
  void AccumulatePair(const PairComponent& c, double t,
                      std::span<const double> z, std::span<const double> zeta,
                      double factor, std::span<double> out) const;
  // Adds `mass` times the negative-time extension (identity for matrices,
  // zero for vectors).
  void AddExtension(double mass, std::span<double> out) const;

 private:
  std::shared_ptr<const Kernel> kernel_;
  std::vector<SeparableComponent> separable_;
  std::vector<PairComponent> pairs_;
  TimeWeights extension_;
};

using Modulus = std::function<double(double r)>;

// Shared surface of raw and mollified coefficient sets: the triple
// (b0, b1, sigma), declared constants, and checked pointwise evaluation.
class CoefficientField {
 public:
  struct Constants {
    double bound = 0.0;        // |b0| + |b1| + |sigma|_F <= bound
    double ellipticity = 0.0;  // lambda' sigma lambda >= ellipticity
    Modulus modulus;           // b1, sigma in (x, xi); optional
    Modulus modulus_drift0;    // b0 in (z, zeta); optional
  };

  CoefficientField(std::string name, std::size_t d, CompiledKernel drift0,
                   CompiledKernel drift1, CompiledKernel diffusion,
                   Constants constants);
  virtual ~CoefficientField() = default;

  const std::string& name() const noexcept { return name_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t state_dim() const noexcept { return 2 * d_; }
  double bound() const noexcept { return constants_.bound; }
  double ellipticity() const noexcept { return constants_.ellipticity; }
  const Modulus& modulus() const noexcept { return constants_.modulus; }
  const Modulus& modulus_drift0() const noexcept {
    return constants_.modulus_drift0;
  }
  const Constants& constants() const noexcept { return constants_; }
  // 0 for raw coefficients.
  virtual int level() const noexcept { return 0; }

  const CompiledKernel& drift0() const noexcept { return drift0_; }
  const CompiledKernel& drift1() const noexcept { return drift1_; }
  const CompiledKernel& diffusion() const noexcept { return diffusion_; }

  // Checked evaluation: t >= 0 and finite, z and zeta of length 2d and
  // finite. Throws DomainError / ShapeError.
  std::vector<double> EvalDrift0(double t, std::span<const double> z,
                                 std::span<const double> zeta) const;
  std::vector<double> EvalDrift1(double t, std::span<const double> z,
                                 std::span<const double> zeta) const;
  // Row-major d x d.
  std::vector<double> EvalDiffusion(double t, std::span<const double> z,
                                    std::span<const double> zeta) const;

 protected:
  void CheckArguments(const char* op, double t, std::span<const double> z,
                      std::span<const double> zeta) const;

 private:
  std::vector<double> Eval(const char* op, const CompiledKernel& kernel,
                           double t, std::span<const double> z,
                           std::span<const double> zeta) const;

  std::string name_;
  std::size_t d_;
  CompiledKernel drift0_;
  CompiledKernel drift1_;
  CompiledKernel diffusion_;
  Constants constants_;
};

}  // namespace kinmv
