#include "kinmv/hypotheses.hpp"

#include <cmath>
#include <limits>

#include "kinmv/errors.hpp"
#include "kinmv/numeric.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {
namespace {

// Directions of the finite-difference pairs live on steps 1, 2, ... of the
// sample's substream; step 0 holds the point itself.
std::vector<double> Direction(const CounterRng& rng, std::size_t i,
                              std::size_t separation_index, std::size_t dim) {
  std::vector<double> u(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t c = 0; c < dim; ++c) {
      u[c] = rng.Normal(static_cast<std::uint32_t>(i),
                        static_cast<std::uint32_t>(1 + separation_index),
                        static_cast<std::uint32_t>(c));
    }
    norm = EuclideanNorm(u);
  }
  for (auto& v : u) v /= norm;
  return u;
}

struct PointValues {
  std::vector<double> b0, b1, sigma;
};

PointValues EvaluateAll(const CoefficientField& field, const SamplePoint& p) {
  PointValues v{std::vector<double>(field.d()), std::vector<double>(field.d()),
                std::vector<double>(field.d() * field.d())};
  field.drift0().Evaluate(p.t, p.z, p.zeta, v.b0);
  field.drift1().Evaluate(p.t, p.z, p.zeta, v.b1);
  field.diffusion().Evaluate(p.t, p.z, p.zeta, v.sigma);
  return v;
}

double DifferenceNorm(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

double SymmetryDefect(std::span<const double> m, std::size_t d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double a = m[i * d + j], b = m[j * d + i];
      if (a != b) worst = std::max(worst, std::abs(a - b));
    }
  }
  return worst;
}

// Per-sample slack values computed in parallel, reduced in index order.
template <class Slack>
std::pair<double, std::size_t> MinOver(std::size_t count, unsigned workers,
                                       Slack&& slack) {
  std::vector<double> values(count);
  ParallelFor(count, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = slack(i);
  });
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (values[i] < best) {
      best = values[i];
      arg = i;
    }
  }
  return {best, arg};
}

void CheckSpec(const SamplerSpec& spec) {
  if (spec.num_points == 0) throw ConfigError("validate: num_points must be >= 1");
  if (!(spec.box_radius > 0.0)) throw ConfigError("validate: box_radius must be positive");
  for (double r : spec.separations) {
    if (!(r > 0.0)) throw ConfigError("validate: separations must be positive");
  }
}

ConditionResult ContinuityCheck(const CoefficientField& field,
                                const SamplerSpec& spec, unsigned workers,
                                const char* id, bool drift0) {
  const std::size_t d = field.d();
  const Modulus& modulus = drift0 ? field.modulus_drift0() : field.modulus();
  const CounterRng rng(spec.seed, StreamDomain::kSampler);
  ConditionResult result;
  result.id = id;
  result.status = modulus ? ConditionStatus::kPass : ConditionStatus::kObservational;
  result.margin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < spec.separations.size(); ++s) {
    const double r = spec.separations[s];
    std::vector<double> variation(spec.num_points);
    ParallelFor(spec.num_points, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const SamplePoint p = DrawSample(spec, d, i);
        SamplePoint q = p;
        if (drift0) {
          const auto u = Direction(rng, i, s, 4 * d);
          for (std::size_t c = 0; c < 2 * d; ++c) {
            q.z[c] += r * u[c];
            q.zeta[c] += r * u[2 * d + c];
          }
        } else {
          const auto u = Direction(rng, i, s, 2 * d);
          for (std::size_t c = 0; c < d; ++c) {
            q.z[c] += r * u[c];
            q.zeta[c] += r * u[d + c];
          }
        }
        const auto a = EvaluateAll(field, p);
        const auto b = EvaluateAll(field, q);
        variation[i] = drift0 ? DifferenceNorm(a.b0, b.b0)
                              : DifferenceNorm(a.b1, b.b1) +
                                    DifferenceNorm(a.sigma, b.sigma);
      }
    });
    double largest = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < variation.size(); ++i) {
      if (variation[i] > largest) {
        largest = variation[i];
        arg = i;
      }
    }
    result.variation.emplace_back(r, largest);
    const double slack = modulus ? modulus(r) - largest : -largest;
    if (slack < result.margin) {
      result.margin = slack;
      result.worst = DrawSample(spec, d, arg);
    }
  }
  if (spec.separations.empty()) result.margin = 0.0;
  if (modulus && result.margin < -spec.tolerance) {
    result.status = ConditionStatus::kFail;
  }
  return result;
}

}  // namespace

SamplePoint DrawSample(const SamplerSpec& spec, std::size_t d, std::size_t i) {
  const CounterRng rng(spec.seed, StreamDomain::kSampler);
  const auto stream = static_cast<std::uint32_t>(i);
  SamplePoint p;
  p.t = rng.Uniform(stream, 0, 0) * spec.horizon();
  p.z.resize(2 * d);
  p.zeta.resize(2 * d);
  const double r = spec.box_radius;
  for (std::size_t c = 0; c < 2 * d; ++c) {
    p.z[c] = (2.0 * rng.Uniform(stream, 0, static_cast<std::uint32_t>(1 + c)) - 1.0) * r;
    p.zeta[c] =
        (2.0 * rng.Uniform(stream, 0, static_cast<std::uint32_t>(1 + 2 * d + c)) - 1.0) * r;
  }
  return p;
}

std::string_view ToString(ConditionStatus status) noexcept {
  switch (status) {
    case ConditionStatus::kPass: return "pass";
    case ConditionStatus::kFail: return "fail";
    case ConditionStatus::kObservational: return "observational";
  }
  return "unknown";
}

bool HypothesisReport::all_pass() const noexcept {
  for (const auto& c : conditions) {
    if (c.status == ConditionStatus::kFail) return false;
  }
  return true;
}

const ConditionResult& HypothesisReport::condition(std::string_view id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return c;
  }
  throw ConfigError("validate: no condition named '" + std::string(id) + "'");
}

ScanResult EllipticityScan(const CoefficientField& field,
                           const SamplerSpec& spec, unsigned workers) {
  CheckSpec(spec);
  const std::size_t d = field.d();
  const auto [margin, arg] = MinOver(spec.num_points, workers, [&](std::size_t i) {
    const SamplePoint p = DrawSample(spec, d, i);
    std::vector<double> sigma(d * d);
    field.diffusion().Evaluate(p.t, p.z, p.zeta, sigma);
    return MinEigenvalueSymmetric(sigma, d) - field.ellipticity();
  });
  return {margin, DrawSample(spec, d, arg)};
}

ScanResult BoundScan(const CoefficientField& field, const SamplerSpec& spec,
                     unsigned workers) {
  CheckSpec(spec);
  const std::size_t d = field.d();
  const auto [margin, arg] = MinOver(spec.num_points, workers, [&](std::size_t i) {
    const auto v = EvaluateAll(field, DrawSample(spec, d, i));
    return field.bound() -
           (EuclideanNorm(v.b0) + EuclideanNorm(v.b1) + EuclideanNorm(v.sigma));
  });
  return {margin, DrawSample(spec, d, arg)};
}

HypothesisReport ValidateHypotheses(const CoefficientField& field,
                                    const SamplerSpec& spec, unsigned workers) {
  CheckSpec(spec);
  const std::size_t d = field.d();
  HypothesisReport report;
  report.system = field.name();
  report.level = field.level();
  report.sampler = spec;

  auto verdict = [&](double margin) {
    return margin >= -spec.tolerance ? ConditionStatus::kPass
                                     : ConditionStatus::kFail;
  };

  const auto bound = BoundScan(field, spec, workers);
  report.conditions.push_back(
      {"bound", verdict(bound.margin), bound.margin, bound.worst, {}});

  const auto elliptic = EllipticityScan(field, spec, workers);
  report.conditions.push_back({"ellipticity", verdict(elliptic.margin),
                               elliptic.margin, elliptic.worst, {}});

  const auto [asym, asym_arg] = MinOver(spec.num_points, workers, [&](std::size_t i) {
    const SamplePoint p = DrawSample(spec, d, i);
    std::vector<double> sigma(d * d);
    field.diffusion().Evaluate(p.t, p.z, p.zeta, sigma);
    return -SymmetryDefect(sigma, d);
  });
  report.conditions.push_back(
      {"symmetry", asym == 0.0 ? ConditionStatus::kPass : ConditionStatus::kFail,
       asym, DrawSample(spec, d, asym_arg), {}});

  report.conditions.push_back(
      ContinuityCheck(field, spec, workers, "modulus_x_xi", false));
  report.conditions.push_back(
      ContinuityCheck(field, spec, workers, "drift0_continuity", true));
  return report;
}

}  // namespace kinmv
