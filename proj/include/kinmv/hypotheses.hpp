#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kinmv/field.hpp"

namespace kinmv {

// Sample points: t uniform in [0, time_horizon], every coordinate of z and
// zeta uniform in [-box_radius, box_radius]. Point i is a pure function of
// (seed, i), so reports do not depend on the worker count.
struct SamplerSpec {
  std::size_t num_points = 10000;
  double box_radius = 10.0;
  std::uint64_t seed = 7;
  double time_horizon = -1.0;  // negative: use box_radius
  double tolerance = 1e-9;
  std::vector<double> separations{1e-1, 1e-2, 1e-3};

  double horizon() const noexcept {
    return time_horizon < 0.0 ? box_radius : time_horizon;
  }
};

struct SamplePoint {
  double t = 0.0;
  std::vector<double> z;
  std::vector<double> zeta;
};

// Draws sample i of `spec` for state dimension 2d.
SamplePoint DrawSample(const SamplerSpec& spec, std::size_t d, std::size_t i);

enum class ConditionStatus { kPass, kFail, kObservational };

std::string_view ToString(ConditionStatus status) noexcept;

struct ConditionResult {
  std::string id;
  ConditionStatus status = ConditionStatus::kPass;
  // Worst observed slack; negative means the declared constant is violated.
  // For observational continuity checks it is minus the largest variation.
  double margin = 0.0;
  SamplePoint worst;
  // Continuity checks: (separation, largest observed variation).
  std::vector<std::pair<double, double>> variation;
};

struct HypothesisReport {
  std::string system;
  int level = 0;
  SamplerSpec sampler;
  std::vector<ConditionResult> conditions;

  bool all_pass() const noexcept;
  const ConditionResult& condition(std::string_view id) const;
};

// Sampling surrogate for the standing hypotheses:
//   "bound"              |b0| + |b1| + |sigma|_F <= bound
//   "ellipticity"        min eigenvalue of sigma >= ellipticity
//   "symmetry"           sigma(i, j) == sigma(j, i) bitwise
//   "modulus_x_xi"       |b1(p') - b1(p)| + |sigma(p') - sigma(p)|_F <= rho(r)
//                        for p' - p of norm r along (x, xi)
//   "drift0_continuity"  |b0(p') - b0(p)| <= rho0(r) along (z, zeta)
// Continuity checks are observational when the modulus is not declared.
HypothesisReport ValidateHypotheses(const CoefficientField& field,
                                    const SamplerSpec& spec,
                                    unsigned workers = 1);

struct ScanResult {
  double margin = 0.0;
  SamplePoint worst;
};

// min over samples of (smallest eigenvalue of sigma - ellipticity).
ScanResult EllipticityScan(const CoefficientField& field,
                           const SamplerSpec& spec, unsigned workers = 1);

// min over samples of (bound - |b0| - |b1| - |sigma|_F).
ScanResult BoundScan(const CoefficientField& field, const SamplerSpec& spec,
                     unsigned workers = 1);

}  // namespace kinmv
