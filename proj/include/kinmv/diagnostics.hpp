#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinmv/integrator.hpp"

namespace kinmv {

enum class StateBlock { kZ, kX, kY };

std::string ToString(StateBlock block);
StateBlock ParseStateBlock(const std::string& text);

struct IncrementRow {
  double h = 0.0;
  double moment = 0.0;      // mean of |Z_{t+h} - Z_t|^4 over particles and t
  std::size_t pairs = 0;    // snapshot pairs (t, t + h) used
};

struct MomentReport {
  StateBlock block = StateBlock::kZ;
  double sup4 = 0.0;  // mean over particles of max over snapshots of |Z|^4
  std::size_t particles = 0;
  std::size_t snapshots = 0;
  std::vector<IncrementRow> table;  // h strictly decreasing
  // Least squares fit of log(moment) = intercept + slope * log(h).
  double slope = 0.0;
  double intercept = 0.0;
};

// Throws DomainError for a store with fewer than 2 snapshots or no particles.
MomentReport MomentSup4(const TrajectoryStore& store);

// Averages over every snapshot pair whose step difference equals h / dt.
// Needs >= 3 lags; a lag with no matching pair is a ConfigError.
MomentReport IncrementMoment4(const TrajectoryStore& store,
                              std::span<const double> lags,
                              StateBlock block = StateBlock::kZ);

// Average over `projections` seeded unit directions of the exact 1-d W1
// distance between the projected atom lists. Sizes may differ.
double SlicedW1(std::span<const double> a, std::span<const double> b,
                std::size_t dim, std::size_t projections = 64,
                std::uint64_t seed = 0, unsigned workers = 1);

// Exact W1 between two empirical measures on the line.
double W1Sorted(std::vector<double> a, std::vector<double> b);

enum class LadderAxis { kLevel, kParticles, kSteps };

std::string ToString(LadderAxis axis);
LadderAxis ParseLadderAxis(const std::string& text);

struct LadderSpec {
  LadderAxis axis = LadderAxis::kLevel;
  std::vector<std::size_t> levels;
  // When set, each level is compared with this level instead of its
  // successor.
  std::optional<std::size_t> reference;
  std::size_t projections = 64;
  std::uint64_t projection_seed = 0;
  double slack = 0.2;
};

struct LadderReport {
  LadderAxis axis = LadderAxis::kLevel;
  std::vector<std::size_t> levels;
  std::optional<std::size_t> reference;
  std::vector<double> distances;
  bool nonincreasing = false;  // within slack
  bool halved = false;         // last < first / 2
  bool strictly_decreasing = false;

  bool cauchy_consistent() const noexcept { return nonincreasing && halved; }
};

// Runs `base` once per level with the axis field replaced (same seed for
// every level) and compares terminal laws. A failing member run propagates.
LadderReport RunLadder(const SimulationConfig& base, const LadderSpec& spec,
                       unsigned workers = 1);

// Verdicts for a list of distances.
void JudgeLadder(LadderReport& report, double slack);

struct DegeneracyReport {
  std::size_t steps_replayed = 0;
  std::size_t x_mismatches = 0;
  std::size_t y_mismatches = 0;  // only checked on a full replay
  bool full_replay = false;
  // min over particles and snapshots of C t + 1e-9 - |x(t) - x(0)|.
  double envelope_margin = 0.0;
  double bound = 0.0;

  bool pass() const noexcept {
    return x_mismatches == 0 && y_mismatches == 0 && envelope_margin >= 0.0;
  }
};

// Replays the drifts of a stored run. With retained increments the whole
// path is regenerated from the first snapshot; otherwise every pair of
// consecutive-step snapshots is checked. Throws ConfigError when neither is
// possible.
DegeneracyReport ReplayDegeneracy(const TrajectoryStore& store,
                                  const CoefficientField& field,
                                  unsigned workers = 1);

// Bounded test functions. f reads (Z, W) at s_1..s_k (first coordinate of
// each block); g reads dW = W(s_{k+1}) - W(s_k), scaled by 1/sqrt(s_{k+1}-s_k).
//
//   f: clip_y1    clip(y(s_1))
//      clip_yk    clip(y(s_k))
//      cos_x      cos(x(s_1) + ... + x(s_k))
//      clip_w     clip(W(s_k))
//      cos_yw     cos(y(s_1) + W(s_k))
//   g: clip_dw    clip(dW)
//      cos_dw     cos(dW)
//      const      1
//
// clip(u) = max(-1, min(1, u)).
std::vector<std::string> IndependenceFNames();
std::vector<std::string> IndependenceGNames();

struct IndependenceReport {
  std::vector<double> times;
  std::string f_id;
  std::string g_id;
  int level = 0;
  std::size_t samples = 0;
  double mean_fg = 0.0;
  double mean_f = 0.0;
  double mean_g = 0.0;
  double covariance = 0.0;  // mean_fg - mean_f mean_g
  double standard_error = 0.0;
  double statistic = 0.0;
  bool pass = false;  // |statistic| <= 3
};

// `times` are s_1 < ... < s_{k+1}, each a snapshot time of the store.
// Throws ConfigError "rerun with increments retained" when increments are
// absent.
IndependenceReport IndependenceTest(const TrajectoryStore& store,
                                    std::span<const double> times,
                                    const std::string& f_id,
                                    const std::string& g_id);

// Every (f, g) pair with non-constant g.
std::vector<IndependenceReport> IndependenceSuite(const TrajectoryStore& store,
                                                  std::span<const double> times);

}  // namespace kinmv
