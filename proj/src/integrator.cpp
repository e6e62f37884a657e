#include "kinmv/integrator.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <string>

#include "kinmv/errors.hpp"
#include "kinmv/meanfield.hpp"
#include "kinmv/numeric.hpp"

namespace kinmv {

std::string ToString(InitialLawSpec::Kind kind) {
  switch (kind) {
    case InitialLawSpec::Kind::kPoint: return "point";
    case InitialLawSpec::Kind::kGaussian: return "gaussian";
    case InitialLawSpec::Kind::kUniformBall: return "uniform-ball";
  }
  return "unknown";
}

InitialLawSpec::Kind ParseInitialKind(const std::string& text) {
  if (text == "point") return InitialLawSpec::Kind::kPoint;
  if (text == "gaussian") return InitialLawSpec::Kind::kGaussian;
  if (text == "uniform-ball" || text == "ball") {
    return InitialLawSpec::Kind::kUniformBall;
  }
  throw ConfigError("init: unknown initial law '" + text +
                    "' (point, gaussian, uniform-ball)");
}

std::vector<double> InitialLawSpec::Center(std::size_t d) const {
  if (center.empty()) return std::vector<double>(2 * d, 0.0);
  return center;
}

void InitialLawSpec::Validate(std::size_t d) const {
  if (!center.empty() && center.size() != 2 * d) {
    throw ConfigError("init: center must have " + std::to_string(2 * d) +
                      " components");
  }
  if (!AllFinite(center)) throw ConfigError("init: center must be finite");
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ConfigError("init: scale/radius must be finite and >= 0");
  }
}

double InitialLawSpec::FourthMoment(std::size_t d) const {
  const auto m = Center(d);
  double a = 0.0;
  for (double v : m) a += v * v;
  const double dim = 2.0 * static_cast<double>(d);
  const double s2 = scale * scale;
  switch (kind) {
    case Kind::kPoint: return a * a;
    case Kind::kGaussian:
      return a * a + (2.0 * dim + 4.0) * a * s2 + dim * (dim + 2.0) * s2 * s2;
    case Kind::kUniformBall:
      return a * a + 2.0 * a * s2 + s2 * s2 * dim / (dim + 4.0);
  }
  return 0.0;
}

QuadratureSpec SimulationConfig::ResolvedQuadrature() const {
  return quadrature ? *quadrature : QuadratureSpec::Default(d);
}

void SimulationConfig::Validate() const {
  if (d == 0) throw ConfigError("simulate: d must be >= 1");
  if (particles == 0) throw ConfigError("simulate: N must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("simulate: T must be positive");
  }
  if (steps == 0) throw ConfigError("simulate: steps must be >= 1");
  if (level < 0) throw ConfigError("simulate: mollification level must be >= 0");
  if (snapshot_stride == 0) throw ConfigError("simulate: snapshot stride must be >= 1");
  if (subsample > particles) {
    throw ConfigError("simulate: subsample M exceeds N");
  }
  if (steps > 0xffffffffu || particles > 0xffffffffu) {
    throw ConfigError("simulate: steps and N must fit in 32 bits");
  }
  initial.Validate(d);
  if (level > 0) ResolvedQuadrature().Validate();
}

std::unique_ptr<CoefficientField> BuildField(const SimulationConfig& config) {
  CoefficientSet base = MakeSystem(config.system, config.d, config.params);
  if (config.level == 0) return std::make_unique<CoefficientSet>(std::move(base));
  return std::make_unique<MollifiedCoefficientSet>(
      Mollify(base, config.level, config.ResolvedQuadrature()));
}

ParticleEnsemble InitEnsemble(const InitialLawSpec& spec, std::size_t n,
                              std::size_t d, std::uint64_t seed,
                              StreamDomain domain) {
  if (n == 0) throw ConfigError("init: N must be >= 1");
  spec.Validate(d);
  const std::size_t dim = 2 * d;
  const auto center = spec.Center(d);
  const CounterRng rng(seed, domain);
  ParticleEnsemble e;
  e.d = d;
  e.states.resize(n * dim);
  e.keys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto key = static_cast<std::uint32_t>(i);
    e.keys[i] = key;
    double* z = e.states.data() + i * dim;
    switch (spec.kind) {
      case InitialLawSpec::Kind::kPoint:
        for (std::size_t c = 0; c < dim; ++c) z[c] = center[c];
        break;
      case InitialLawSpec::Kind::kGaussian:
        for (std::size_t c = 0; c < dim; ++c) {
          z[c] = center[c] +
                 spec.scale * rng.Normal(key, 0, static_cast<std::uint32_t>(c));
        }
        break;
      case InitialLawSpec::Kind::kUniformBall: {
        std::vector<double> u(dim);
        double norm = 0.0;
        for (std::uint32_t attempt = 0; norm == 0.0; ++attempt) {
          for (std::size_t c = 0; c < dim; ++c) {
            u[c] = rng.Normal(key, 2 + attempt, static_cast<std::uint32_t>(c));
          }
          norm = EuclideanNorm(u);
        }
        const double radius =
            spec.scale *
            std::pow(rng.Uniform(key, 1, 0), 1.0 / static_cast<double>(dim));
        for (std::size_t c = 0; c < dim; ++c) {
          z[c] = center[c] + radius * u[c] / norm;
        }
        break;
      }
    }
  }
  return e;
}

void EmStep(ParticleEnsemble& ensemble, const CoefficientField& field,
            double h, const StepOptions& options) {
  const std::size_t n = ensemble.size();
  const std::size_t d = ensemble.d;
  const std::size_t dim = 2 * d;
  if (!(h > 0.0)) throw ConfigError("em_step: h must be positive");
  if (d != field.d()) throw ShapeError("em_step: ensemble and coefficients differ in d");
  if (!options.given_increments.empty() &&
      options.given_increments.size() != n * d) {
    throw ShapeError("em_step: given increments must be N x d");
  }

  const ParticleEnsemble& source = options.measure ? *options.measure : ensemble;
  const EmpiricalMeasure measure(source.states, dim);
  const MeanFieldTable table =
      options.subsample == 0
          ? MeanFieldBatch(field, ensemble.time, ensemble.states, measure,
                           options.workers)
          : MeanFieldBatch(field, ensemble.time, ensemble.states, measure,
                           SubsampleSpec{options.subsample, options.seed,
                                         ensemble.epoch},
                           options.workers);

  const CounterRng rng(options.seed, options.wiener);
  const double root_h = std::sqrt(h);
  std::vector<double> increments(n * d);
  ParallelFor(n, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* dw = increments.data() + i * d;
      if (options.given_increments.empty()) {
        for (std::size_t c = 0; c < d; ++c) {
          dw[c] = root_h * rng.Normal(ensemble.keys[i], ensemble.epoch,
                                      static_cast<std::uint32_t>(c));
        }
      } else {
        for (std::size_t c = 0; c < d; ++c) dw[c] = options.given_increments[i * d + c];
      }
      double* z = ensemble.states.data() + i * dim;
      const auto b0 = table.Drift0(i);
      const auto b1 = table.Drift1(i);
      const auto sigma = table.Diffusion(i);
      for (std::size_t c = 0; c < d; ++c) z[c] += b0[c] * h;
      for (std::size_t r = 0; r < d; ++r) {
        double noise = 0.0;
        for (std::size_t c = 0; c < d; ++c) noise += sigma[r * d + c] * dw[c];
        z[d + r] += b1[r] * h + noise;
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!AllFinite(ensemble.state(i))) {
      throw SimulationError("integrator: particle " + std::to_string(i) +
                            " became non-finite at step " +
                            std::to_string(ensemble.epoch));
    }
  }
  if (options.increments) *options.increments = std::move(increments);
  ensemble.time += h;
  ++ensemble.epoch;
}

TrajectoryStore Simulate(const SimulationConfig& config, unsigned workers) {
  config.Validate();
  const auto field = BuildField(config);
  return Simulate(config, *field, workers);
}

TrajectoryStore Simulate(const SimulationConfig& config,
                         const CoefficientField& field, unsigned workers) {
  config.Validate();
  if (field.d() != config.d) throw ShapeError("simulate: coefficients differ in d");
  const double h = config.step_size();

  ParticleEnsemble main =
      InitEnsemble(config.initial, config.particles, config.d, config.seed);
  std::optional<ParticleEnsemble> reference;
  if (config.reference_ensemble) {
    reference = InitEnsemble(config.initial, config.particles, config.d,
                             config.seed, StreamDomain::kReferenceInitial);
  }

  TrajectoryStore store;
  store.config = config;
  auto snapshot = [&](std::size_t step) {
    Snapshot s;
    s.step = step;
    s.time = main.time;
    s.states = main.states;
    if (reference) s.reference = reference->states;
    store.snapshots.push_back(std::move(s));
  };
  snapshot(0);

  StepOptions main_options;
  main_options.seed = config.seed;
  main_options.subsample = config.subsample;
  main_options.workers = workers;
  StepOptions ref_options = main_options;
  ref_options.wiener = StreamDomain::kReferenceWiener;

  for (std::size_t k = 1; k <= config.steps; ++k) {
    std::vector<double> increments;
    main_options.increments = config.retain_increments ? &increments : nullptr;
    if (reference) {
      // Both ensembles read the frozen pre-step reference states.
      const ParticleEnsemble frozen = *reference;
      main_options.measure = &frozen;
      EmStep(main, field, h, main_options);
      ref_options.measure = &frozen;
      EmStep(*reference, field, h, ref_options);
      reference->time = static_cast<double>(k) * h;
    } else {
      EmStep(main, field, h, main_options);
    }
    // Grid times without accumulated rounding.
    main.time = static_cast<double>(k) * h;
    if (config.retain_increments) store.increments.push_back(std::move(increments));
    if (k % config.snapshot_stride == 0 || k == config.steps) snapshot(k);
  }
  store.created = UtcTimestamp();
  return store;
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

}  // namespace kinmv
