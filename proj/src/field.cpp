#include "kinmv/field.hpp"

#include <cmath>
#include <utility>

#include "kinmv/errors.hpp"
#include "kinmv/numeric.hpp"

namespace kinmv {
namespace {

inline double Tie(double u) {
  if (u > 0.0) return 1.0;
  if (u == 0.0) return 0.5;
  return 0.0;
}

// Writes base - offset into `shifted` and returns it, or returns base itself
// for the identity rule.
inline std::span<const double> Shift(const OffsetRule& rule, std::size_t k,
                                     std::span<const double> base,
                                     std::vector<double>& shifted) {
  if (rule.identity()) return base;
  const auto offset = rule.offset(k);
  shifted.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) shifted[i] = base[i] - offset[i];
  return shifted;
}

}  // namespace

Kernel::Kernel(KernelShape shape, std::size_t d) : shape_(shape), d_(d) {
  if (d == 0) throw ConfigError("coefficients: dimension d must be positive");
}

Kernel& Kernel::Add(SeparableTerm term) {
  if (!term.state) {
    throw ConfigError("coefficients: separable term without a state factor");
  }
  if ((term.state_axes & ~(axis::kTime | axis::kState)) != 0 ||
      (term.interaction_axes & ~(axis::kTime | axis::kInteraction)) != 0) {
    throw ConfigError("coefficients: separable term declares foreign axes");
  }
  if (!term.interaction) term.interaction_axes = axis::kNone;
  separable_.push_back(std::move(term));
  return *this;
}

Kernel& Kernel::Add(PairTerm term) {
  if (!term.function) throw ConfigError("coefficients: empty pair term");
  pairs_.push_back(std::move(term));
  return *this;
}

std::size_t Kernel::width() const noexcept {
  return shape_ == KernelShape::kVector ? d_ : d_ * d_;
}

double TimeWeights::Weight(double t, const TimeProfile& profile) const {
  if (unconditional) return profile ? profile(t) : 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const double local = t - shifts[k];
    const double tie = Tie(local);
    if (tie == 0.0) continue;
    total += weights[k] * tie * (profile ? profile(local) : 1.0);
  }
  return total;
}

double TimeWeights::ExtensionMass(double t) const {
  if (unconditional) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    total += weights[k] * (1.0 - Tie(t - shifts[k]));
  }
  return total;
}

CompiledKernel CompiledKernel::Raw(std::shared_ptr<const Kernel> kernel) {
  const std::size_t dim = 2 * kernel->d();
  std::vector<SeparableComponent> separable;
  for (std::size_t i = 0; i < kernel->separable().size(); ++i) {
    SeparableComponent c;
    c.term = i;
    c.state_rule.dim = dim;
    c.interaction_rule.dim = dim;
    separable.push_back(std::move(c));
  }
  std::vector<PairComponent> pairs;
  for (std::size_t i = 0; i < kernel->pairs().size(); ++i) {
    PairComponent c;
    c.term = i;
    c.state_rule.dim = dim;
    c.interaction_rule.dim = dim;
    pairs.push_back(std::move(c));
  }
  return CompiledKernel(std::move(kernel), std::move(separable),
                        std::move(pairs), TimeWeights{});
}

CompiledKernel::CompiledKernel(std::shared_ptr<const Kernel> kernel,
                               std::vector<SeparableComponent> separable,
                               std::vector<PairComponent> pairs,
                               TimeWeights extension)
    : kernel_(std::move(kernel)),
      separable_(std::move(separable)),
      pairs_(std::move(pairs)),
      extension_(std::move(extension)) {}

void CompiledKernel::AccumulateState(const SeparableComponent& c, double t,
                                     std::span<const double> z, double factor,
                                     std::span<double> out) const {
  thread_local std::vector<double> shifted, value, smoothed;
  const auto& term = kernel_->separable()[c.term];
  const std::size_t w = width();
  value.assign(w, 0.0);
  smoothed.assign(w, 0.0);
  const double local_t = t - c.shift;
  for (std::size_t k = 0; k < c.state_rule.size(); ++k) {
    term.state(local_t, Shift(c.state_rule, k, z, shifted), value);
    const double weight = c.state_rule.weights[k];
    for (std::size_t i = 0; i < w; ++i) smoothed[i] += weight * value[i];
  }
  for (std::size_t i = 0; i < w; ++i) out[i] += factor * smoothed[i];
}

double CompiledKernel::InteractionValue(const SeparableComponent& c, double t,
                                        std::span<const double> zeta) const {
  const auto& term = kernel_->separable()[c.term];
  if (!term.interaction) return 1.0;
  thread_local std::vector<double> shifted;
  const double local_t = t - c.shift;
  double total = 0.0;
  for (std::size_t k = 0; k < c.interaction_rule.size(); ++k) {
    total += c.interaction_rule.weights[k] *
             term.interaction(local_t,
                              Shift(c.interaction_rule, k, zeta, shifted));
  }
  return total;
}

void CompiledKernel::AccumulatePair(const PairComponent& c, double t,
                                    std::span<const double> z,
                                    std::span<const double> zeta,
                                    double factor,
                                    std::span<double> out) const {
  thread_local std::vector<double> shifted_z, shifted_zeta, value, smoothed;
  const auto& term = kernel_->pairs()[c.term];
  const std::size_t w = width();
  value.assign(w, 0.0);
  smoothed.assign(w, 0.0);
  const double local_t = t - c.shift;
  for (std::size_t a = 0; a < c.state_rule.size(); ++a) {
    const auto zs = Shift(c.state_rule, a, z, shifted_z);
    for (std::size_t b = 0; b < c.interaction_rule.size(); ++b) {
      const auto zetas = Shift(c.interaction_rule, b, zeta, shifted_zeta);
      term.function(local_t, zs, zetas, value);
      const double weight =
          c.state_rule.weights[a] * c.interaction_rule.weights[b];
      for (std::size_t i = 0; i < w; ++i) smoothed[i] += weight * value[i];
    }
  }
  for (std::size_t i = 0; i < w; ++i) out[i] += factor * smoothed[i];
}

void CompiledKernel::AddExtension(double mass, std::span<double> out) const {
  if (shape() != KernelShape::kMatrix || mass == 0.0) return;
  const std::size_t n = d();
  for (std::size_t i = 0; i < n; ++i) out[i * n + i] += mass;
}

void CompiledKernel::Evaluate(double t, std::span<const double> z,
                              std::span<const double> zeta,
                              std::span<double> out) const {
  for (auto& o : out) o = 0.0;
  for (const auto& c : separable_) {
    const double a = c.time.Weight(t, kernel_->separable()[c.term].time);
    if (a == 0.0) continue;
    const double v = InteractionValue(c, t, zeta);
    if (v == 0.0) continue;
    AccumulateState(c, t, z, a * v, out);
  }
  for (const auto& c : pairs_) {
    const double a = c.time.Weight(t, kernel_->pairs()[c.term].time);
    if (a == 0.0) continue;
    AccumulatePair(c, t, z, zeta, a, out);
  }
  AddExtension(extension_.ExtensionMass(t), out);
}

CoefficientField::CoefficientField(std::string name, std::size_t d,
                                   CompiledKernel drift0,
                                   CompiledKernel drift1,
                                   CompiledKernel diffusion,
                                   Constants constants)
    : name_(std::move(name)),
      d_(d),
      drift0_(std::move(drift0)),
      drift1_(std::move(drift1)),
      diffusion_(std::move(diffusion)),
      constants_(std::move(constants)) {
  if (d == 0) throw ConfigError("coefficients: dimension d must be positive");
  if (drift0_.d() != d || drift1_.d() != d || diffusion_.d() != d) {
    throw ShapeError("coefficients: kernel dimensions disagree with d");
  }
  if (drift0_.shape() != KernelShape::kVector ||
      drift1_.shape() != KernelShape::kVector ||
      diffusion_.shape() != KernelShape::kMatrix) {
    throw ShapeError(
        "coefficients: b0 and b1 must be vector kernels, sigma a matrix "
        "kernel");
  }
  if (!(constants_.bound > 0.0) || !(constants_.ellipticity > 0.0)) {
    throw ConfigError(
        "coefficients: bound and ellipticity constants must be positive");
  }
}

void CoefficientField::CheckArguments(const char* op, double t,
                                      std::span<const double> z,
                                      std::span<const double> zeta) const {
  if (z.size() != state_dim() || zeta.size() != state_dim()) {
    throw ShapeError(std::string("coefficients: ") + op +
                     ": expected state vectors of length " +
                     std::to_string(state_dim()) + ", got " +
                     std::to_string(z.size()) + " and " +
                     std::to_string(zeta.size()));
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError(std::string("coefficients: ") + op +
                      ": time must be finite and non-negative");
  }
  if (!AllFinite(z) || !AllFinite(zeta)) {
    throw DomainError(std::string("coefficients: ") + op +
                      ": non-finite state argument");
  }
}

std::vector<double> CoefficientField::Eval(const char* op,
                                           const CompiledKernel& kernel,
                                           double t, std::span<const double> z,
                                           std::span<const double> zeta) const {
  CheckArguments(op, t, z, zeta);
  std::vector<double> out(kernel.width());
  kernel.Evaluate(t, z, zeta, out);
  if (!AllFinite(out)) {
    throw DomainError(std::string("coefficients: ") + op +
                      ": kernel returned a non-finite value");
  }
  return out;
}

std::vector<double> CoefficientField::EvalDrift0(
    double t, std::span<const double> z, std::span<const double> zeta) const {
  return Eval("eval_b0", drift0_, t, z, zeta);
}

std::vector<double> CoefficientField::EvalDrift1(
    double t, std::span<const double> z, std::span<const double> zeta) const {
  return Eval("eval_b1", drift1_, t, z, zeta);
}

std::vector<double> CoefficientField::EvalDiffusion(
    double t, std::span<const double> z, std::span<const double> zeta) const {
  return Eval("eval_sigma", diffusion_, t, z, zeta);
}

}  // namespace kinmv
