#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinmv/coefficients.hpp"
#include "kinmv/mollifier.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {

// Law of the initial state z0 in R^{2d}. `center` is z0 for kPoint, the mean
// for kGaussian (coordinatewise standard deviation `scale`) and the center of
// the ball of radius `scale` for kUniformBall. An empty center means 0.
struct InitialLawSpec {
  enum class Kind { kPoint, kGaussian, kUniformBall };

  Kind kind = Kind::kPoint;
  std::vector<double> center;
  double scale = 0.0;

  void Validate(std::size_t d) const;
  // E|z0|^4.
  double FourthMoment(std::size_t d) const;
  std::vector<double> Center(std::size_t d) const;
};

std::string ToString(InitialLawSpec::Kind kind);
InitialLawSpec::Kind ParseInitialKind(const std::string& text);

struct SimulationConfig {
  std::string system = "free";
  int level = 0;  // mollification level n, 0 = raw coefficients
  std::size_t d = 1;
  std::size_t particles = 100;
  double horizon = 1.0;
  std::size_t steps = 100;
  std::uint64_t seed = 1;
  InitialLawSpec initial;
  std::size_t subsample = 0;  // 0 = full empirical measure
  std::size_t snapshot_stride = 1;
  bool retain_increments = false;
  bool reference_ensemble = false;
  SystemParams params;
  std::optional<QuadratureSpec> quadrature;  // default depends on d

  double step_size() const noexcept {
    return horizon / static_cast<double>(steps);
  }
  QuadratureSpec ResolvedQuadrature() const;
  void Validate() const;
};

// Raw coefficients for level 0, the mollified set otherwise.
std::unique_ptr<CoefficientField> BuildField(const SimulationConfig& config);

struct ParticleEnsemble {
  double time = 0.0;
  std::size_t d = 1;
  std::vector<double> states;      // N x 2d, row-major, (x, y) per row
  std::vector<std::uint32_t> keys; // RNG stream of each particle
  std::uint32_t epoch = 0;         // steps taken so far

  std::size_t size() const noexcept { return keys.size(); }
  std::size_t state_dim() const noexcept { return 2 * d; }
  std::span<const double> state(std::size_t i) const noexcept {
    return {states.data() + i * 2 * d, 2 * d};
  }
};

// N i.i.d. draws; particle i uses stream i of `domain`.
ParticleEnsemble InitEnsemble(const InitialLawSpec& spec, std::size_t n,
                              std::size_t d, std::uint64_t seed,
                              StreamDomain domain = StreamDomain::kInitial);

struct StepOptions {
  std::uint64_t seed = 1;
  StreamDomain wiener = StreamDomain::kWiener;
  std::size_t subsample = 0;  // 0 = full measure
  unsigned workers = 1;
  // Interaction measure; the ensemble itself when null.
  const ParticleEnsemble* measure = nullptr;
  // When set, these N x d Wiener increments are used instead of the RNG.
  std::span<const double> given_increments;
  // When non-null, receives the N x d Wiener increments of the step.
  std::vector<double>* increments = nullptr;
};

// One explicit Euler-Maruyama step with left-point coefficients:
//
//   x_i += B0_i h
//   y_i += B1_i h + Sigma_i dW_i,   dW_i = sqrt(h) g_i
//
// where g_i[c] = Normal(stream = keys[i], step = epoch, index = c) and the
// mean-field coefficients are evaluated at (time, pre-step states). Advances
// time by h and epoch by 1. Throws SimulationError naming the particle and
// step if a state becomes non-finite.
void EmStep(ParticleEnsemble& ensemble, const CoefficientField& field,
            double h, const StepOptions& options);

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> states;     // N x 2d
  std::vector<double> reference;  // N x 2d when the reference mode is on
};

struct TrajectoryStore {
  SimulationConfig config;
  std::string created;  // UTC, ISO 8601
  std::vector<Snapshot> snapshots;
  // One N x d block per step when retained.
  std::vector<std::vector<double>> increments;

  std::size_t particles() const noexcept { return config.particles; }
  std::size_t d() const noexcept { return config.d; }
  bool has_increments() const noexcept { return !increments.empty(); }
  bool has_reference() const noexcept {
    return !snapshots.empty() && !snapshots.front().reference.empty();
  }
};

// Snapshots at t = 0, every snapshot_stride steps and at the final step.
// The result does not depend on `workers`.
TrajectoryStore Simulate(const SimulationConfig& config, unsigned workers = 1);
TrajectoryStore Simulate(const SimulationConfig& config,
                         const CoefficientField& field, unsigned workers = 1);

std::string UtcTimestamp();

}  // namespace kinmv
