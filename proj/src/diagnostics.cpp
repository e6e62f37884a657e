#include "kinmv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "kinmv/errors.hpp"
#include "kinmv/numeric.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {
namespace {

double Mean(std::span<const double> v) {
  return PairwiseSum(v) / static_cast<double>(v.size());
}

double BlockNorm4(std::span<const double> a, std::span<const double> b,
                  std::size_t d, StateBlock block) {
  std::size_t begin = 0, end = 2 * d;
  if (block == StateBlock::kX) end = d;
  if (block == StateBlock::kY) begin = d;
  double sq = 0.0;
  for (std::size_t c = begin; c < end; ++c) {
    const double diff = b[c] - a[c];
    sq += diff * diff;
  }
  return sq * sq;
}

std::size_t StepsForTime(const TrajectoryStore& store, double time,
                         const char* op) {
  for (std::size_t s = 0; s < store.snapshots.size(); ++s) {
    const double ts = store.snapshots[s].time;
    if (std::abs(ts - time) <= 1e-9 * std::max(1.0, std::abs(time))) return s;
  }
  throw ConfigError(std::string(op) + ": no snapshot at time " +
                    std::to_string(time));
}

double Clip(double u) { return std::max(-1.0, std::min(1.0, u)); }

}  // namespace

std::string ToString(StateBlock block) {
  switch (block) {
    case StateBlock::kZ: return "z";
    case StateBlock::kX: return "x";
    case StateBlock::kY: return "y";
  }
  return "z";
}

StateBlock ParseStateBlock(const std::string& text) {
  if (text == "z") return StateBlock::kZ;
  if (text == "x") return StateBlock::kX;
  if (text == "y") return StateBlock::kY;
  throw ConfigError("diagnostics: unknown block '" + text + "' (z, x, y)");
}

MomentReport MomentSup4(const TrajectoryStore& store) {
  if (store.snapshots.size() < 2 || store.particles() == 0) {
    throw DomainError("moment_sup4: store needs at least 2 snapshots");
  }
  const std::size_t n = store.particles();
  const std::size_t dim = 2 * store.d();
  std::vector<double> sup(n, 0.0);
  for (const auto& snap : store.snapshots) {
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double v = snap.states[i * dim + c];
        sq += v * v;
      }
      sup[i] = std::max(sup[i], sq * sq);
    }
  }
  MomentReport report;
  report.sup4 = Mean(sup);
  report.particles = n;
  report.snapshots = store.snapshots.size();
  return report;
}

MomentReport IncrementMoment4(const TrajectoryStore& store,
                              std::span<const double> lags, StateBlock block) {
  MomentReport report = MomentSup4(store);
  report.block = block;
  if (lags.size() < 3) throw ConfigError("increment_moment4: need at least 3 lags");
  std::vector<double> sorted(lags.begin(), lags.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k] == sorted[k - 1]) {
      throw ConfigError("increment_moment4: duplicate lag");
    }
  }
  const double dt = store.config.step_size();
  const std::size_t n = store.particles();
  const std::size_t d = store.d();
  const std::size_t dim = 2 * d;
  std::map<std::size_t, std::size_t> by_step;
  for (std::size_t s = 0; s < store.snapshots.size(); ++s) {
    by_step[store.snapshots[s].step] = s;
  }

  std::vector<double> per_particle(n);
  for (double h : sorted) {
    const double ratio = h / dt;
    const double lag = std::round(ratio);
    if (!(h > 0.0) || lag < 1.0 || std::abs(ratio - lag) > 1e-9 * ratio) {
      throw ConfigError("increment_moment4: lag " + std::to_string(h) +
                        " is not a multiple of the step size");
    }
    const auto steps = static_cast<std::size_t>(lag);
    std::vector<double> pair_means;
    for (const auto& [step, a] : by_step) {
      const auto it = by_step.find(step + steps);
      if (it == by_step.end()) continue;
      const auto& sa = store.snapshots[a].states;
      const auto& sb = store.snapshots[it->second].states;
      for (std::size_t i = 0; i < n; ++i) {
        per_particle[i] = BlockNorm4({sa.data() + i * dim, dim},
                                     {sb.data() + i * dim, dim}, d, block);
      }
      pair_means.push_back(Mean(per_particle));
    }
    if (pair_means.empty()) {
      throw ConfigError("increment_moment4: no snapshot pair at lag " +
                        std::to_string(h));
    }
    report.table.push_back({h, Mean(pair_means), pair_means.size()});
  }

  bool positive = true;
  for (const auto& row : report.table) positive = positive && row.moment > 0.0;
  if (!positive) {
    report.slope = report.intercept = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& row : report.table) {
    mx += std::log(row.h);
    my += std::log(row.moment);
  }
  const double m = static_cast<double>(report.table.size());
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& row : report.table) {
    const double dx = std::log(row.h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(row.moment) - my);
  }
  report.slope = sxy / sxx;
  report.intercept = my - report.slope * mx;
  return report;
}

double W1Sorted(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("sliced_w1: empty measure");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
  // Quantile functions are step functions with jumps at i/n and j/m; walk
  // the merged breakpoints in units of 1/(n m).
  std::vector<double> pieces;
  pieces.reserve(n + m);
  std::size_t i = 0, j = 0, at = 0;
  while (i < n && j < m) {
    const std::size_t next_a = (i + 1) * m, next_b = (j + 1) * n;
    const std::size_t next = std::min(next_a, next_b);
    pieces.push_back(static_cast<double>(next - at) * scale * std::abs(a[i] - b[j]));
    at = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return PairwiseSum(pieces);
}

double SlicedW1(std::span<const double> a, std::span<const double> b,
                std::size_t dim, std::size_t projections, std::uint64_t seed,
                unsigned workers) {
  if (dim == 0 || a.size() % dim != 0 || b.size() % dim != 0) {
    throw ShapeError("sliced_w1: atom lists must have dimension " +
                     std::to_string(dim));
  }
  if (a.empty() || b.empty()) throw DomainError("sliced_w1: empty measure");
  if (projections == 0) throw ConfigError("sliced_w1: need at least one projection");
  const std::size_t na = a.size() / dim, nb = b.size() / dim;
  const CounterRng rng(seed, StreamDomain::kProjection);
  std::vector<double> distances(projections);
  ParallelFor(projections, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> u(dim);
    for (std::size_t p = begin; p < end; ++p) {
      double norm = 0.0;
      for (std::uint32_t attempt = 0; norm == 0.0; ++attempt) {
        for (std::size_t c = 0; c < dim; ++c) {
          u[c] = rng.Normal(static_cast<std::uint32_t>(p), attempt,
                            static_cast<std::uint32_t>(c));
        }
        norm = EuclideanNorm(u);
      }
      for (auto& v : u) v /= norm;
      std::vector<double> pa(na), pb(nb);
      for (std::size_t i = 0; i < na; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += u[c] * a[i * dim + c];
        pa[i] = s;
      }
      for (std::size_t i = 0; i < nb; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += u[c] * b[i * dim + c];
        pb[i] = s;
      }
      distances[p] = W1Sorted(std::move(pa), std::move(pb));
    }
  });
  return Mean(distances);
}

std::string ToString(LadderAxis axis) {
  switch (axis) {
    case LadderAxis::kLevel: return "n";
    case LadderAxis::kParticles: return "N";
    case LadderAxis::kSteps: return "steps";
  }
  return "n";
}

LadderAxis ParseLadderAxis(const std::string& text) {
  if (text == "n" || text == "level") return LadderAxis::kLevel;
  if (text == "N" || text == "particles") return LadderAxis::kParticles;
  if (text == "steps" || text == "h") return LadderAxis::kSteps;
  throw ConfigError("ladder: unknown axis '" + text + "' (n, N, steps)");
}

void JudgeLadder(LadderReport& report, double slack) {
  const auto& dist = report.distances;
  report.nonincreasing = report.strictly_decreasing = !dist.empty();
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k] > (1.0 + slack) * dist[k - 1]) report.nonincreasing = false;
    if (!(dist[k] < dist[k - 1])) report.strictly_decreasing = false;
  }
  report.halved = dist.size() >= 2 && dist.back() < dist.front() / 2.0;
}

LadderReport RunLadder(const SimulationConfig& base, const LadderSpec& spec,
                       unsigned workers) {
  if (spec.levels.size() < 3) throw ConfigError("ladder: need at least 3 levels");
  for (std::size_t k = 1; k < spec.levels.size(); ++k) {
    if (spec.levels[k] <= spec.levels[k - 1]) {
      throw ConfigError("ladder: levels must be strictly increasing");
    }
  }
  auto terminal = [&](std::size_t level) {
    SimulationConfig config = base;
    switch (spec.axis) {
      case LadderAxis::kLevel: config.level = static_cast<int>(level); break;
      case LadderAxis::kParticles: config.particles = level; break;
      case LadderAxis::kSteps: config.steps = level; break;
    }
    config.snapshot_stride = config.steps;
    config.retain_increments = false;
    return Simulate(config, workers).snapshots.back().states;
  };
  const std::size_t dim = 2 * base.d;
  auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return SlicedW1(a, b, dim, spec.projections, spec.projection_seed, workers);
  };

  LadderReport report;
  report.axis = spec.axis;
  report.levels = spec.levels;
  report.reference = spec.reference;
  if (spec.reference) {
    const auto ref = terminal(*spec.reference);
    for (std::size_t level : spec.levels) {
      report.distances.push_back(distance(terminal(level), ref));
    }
  } else {
    auto previous = terminal(spec.levels.front());
    for (std::size_t k = 1; k < spec.levels.size(); ++k) {
      auto current = terminal(spec.levels[k]);
      report.distances.push_back(distance(previous, current));
      previous = std::move(current);
    }
  }
  JudgeLadder(report, spec.slack);
  return report;
}

DegeneracyReport ReplayDegeneracy(const TrajectoryStore& store,
                                  const CoefficientField& field,
                                  unsigned workers) {
  const auto& config = store.config;
  const std::size_t n = store.particles();
  const std::size_t d = store.d();
  const std::size_t dim = 2 * d;
  if (store.snapshots.empty()) throw DomainError("replay: empty store");
  const double h = config.step_size();

  DegeneracyReport report;
  report.bound = field.bound();
  report.envelope_margin = std::numeric_limits<double>::infinity();
  const auto& first = store.snapshots.front().states;
  for (const auto& snap : store.snapshots) {
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = snap.states[i * dim + c] - first[i * dim + c];
        sq += diff * diff;
      }
      report.envelope_margin = std::min(
          report.envelope_margin, field.bound() * snap.time + 1e-9 - std::sqrt(sq));
    }
  }

  auto ensemble_at = [&](const std::vector<double>& states, const Snapshot& s) {
    ParticleEnsemble e;
    e.d = d;
    e.states = states;
    e.keys.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.keys[i] = static_cast<std::uint32_t>(i);
    e.epoch = static_cast<std::uint32_t>(s.step);
    e.time = s.time;
    return e;
  };
  StepOptions options;
  options.seed = config.seed;
  options.subsample = config.subsample;
  options.workers = workers;

  if (store.has_increments() && !store.has_reference() &&
      store.snapshots.front().step == 0) {
    report.full_replay = true;
    ParticleEnsemble e = ensemble_at(first, store.snapshots.front());
    std::size_t next = 1;
    for (std::size_t k = 1; k <= config.steps && next < store.snapshots.size(); ++k) {
      options.given_increments = store.increments[k - 1];
      EmStep(e, field, h, options);
      e.time = static_cast<double>(k) * h;
      ++report.steps_replayed;
      if (store.snapshots[next].step != k) continue;
      const auto& stored = store.snapshots[next].states;
      for (std::size_t i = 0; i < n; ++i) {
        bool x_ok = true, y_ok = true;
        for (std::size_t c = 0; c < d; ++c) {
          x_ok = x_ok && e.states[i * dim + c] == stored[i * dim + c];
          y_ok = y_ok && e.states[i * dim + d + c] == stored[i * dim + d + c];
        }
        report.x_mismatches += x_ok ? 0 : 1;
        report.y_mismatches += y_ok ? 0 : 1;
      }
      ++next;
    }
    return report;
  }

  const std::vector<double> zeros(n * d, 0.0);
  for (std::size_t s = 0; s + 1 < store.snapshots.size(); ++s) {
    const auto& a = store.snapshots[s];
    const auto& b = store.snapshots[s + 1];
    if (b.step != a.step + 1) continue;
    ParticleEnsemble e = ensemble_at(a.states, a);
    std::optional<ParticleEnsemble> reference;
    if (!a.reference.empty()) reference = ensemble_at(a.reference, a);
    options.measure = reference ? &*reference : nullptr;
    options.given_increments = zeros;
    EmStep(e, field, h, options);
    ++report.steps_replayed;
    for (std::size_t i = 0; i < n; ++i) {
      bool x_ok = true;
      for (std::size_t c = 0; c < d; ++c) {
        x_ok = x_ok && e.states[i * dim + c] == b.states[i * dim + c];
      }
      report.x_mismatches += x_ok ? 0 : 1;
    }
  }
  if (report.steps_replayed == 0) {
    throw ConfigError(
        "replay: store has neither increments nor consecutive-step snapshots");
  }
  return report;
}

std::vector<std::string> IndependenceFNames() {
  return {"clip_y1", "clip_yk", "cos_x", "clip_w", "cos_yw"};
}

std::vector<std::string> IndependenceGNames() {
  return {"clip_dw", "cos_dw", "const"};
}

IndependenceReport IndependenceTest(const TrajectoryStore& store,
                                    std::span<const double> times,
                                    const std::string& f_id,
                                    const std::string& g_id) {
  if (!store.has_increments()) {
    throw ConfigError("independence: no increments in store; rerun with increments retained");
  }
  if (times.size() < 2) throw ConfigError("independence: need at least 2 times");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw ConfigError("independence: times must be strictly increasing");
    }
  }
  const auto fs = IndependenceFNames(), gs = IndependenceGNames();
  if (std::find(fs.begin(), fs.end(), f_id) == fs.end()) {
    throw ConfigError("independence: unknown f '" + f_id + "'");
  }
  if (std::find(gs.begin(), gs.end(), g_id) == gs.end()) {
    throw ConfigError("independence: unknown g '" + g_id + "'");
  }
  const std::size_t n = store.particles();
  const std::size_t d = store.d();
  const std::size_t dim = 2 * d;
  const std::size_t k = times.size() - 1;

  std::vector<std::size_t> snap(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    snap[j] = StepsForTime(store, times[j], "independence");
  }
  // W(s) in the first coordinate, for every particle and chosen time.
  std::vector<std::vector<double>> wiener(times.size(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < times.size(); ++j) {
    const std::size_t steps = store.snapshots[snap[j]].step;
    if (steps > store.increments.size()) {
      throw ConfigError("independence: increments do not cover the chosen times");
    }
    for (std::size_t i = 0; i < n; ++i) {
      double w = 0.0;
      for (std::size_t s = 0; s < steps; ++s) w += store.increments[s][i * d];
      wiener[j][i] = w;
    }
  }
  const double gap = times[k] - times[k - 1];

  std::vector<double> f(n), g(n), fg(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = [&](std::size_t j) { return store.snapshots[snap[j]].states[i * dim]; };
    auto y = [&](std::size_t j) { return store.snapshots[snap[j]].states[i * dim + d]; };
    if (f_id == "clip_y1") {
      f[i] = Clip(y(0));
    } else if (f_id == "clip_yk") {
      f[i] = Clip(y(k - 1));
    } else if (f_id == "cos_x") {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += x(j);
      f[i] = std::cos(s);
    } else if (f_id == "clip_w") {
      f[i] = Clip(wiener[k - 1][i]);
    } else {
      f[i] = std::cos(y(0) + wiener[k - 1][i]);
    }
    const double dw = (wiener[k][i] - wiener[k - 1][i]) / std::sqrt(gap);
    if (g_id == "clip_dw") {
      g[i] = Clip(dw);
    } else if (g_id == "cos_dw") {
      g[i] = std::cos(dw);
    } else {
      g[i] = 1.0;
    }
    fg[i] = f[i] * g[i];
  }

  IndependenceReport report;
  report.times.assign(times.begin(), times.end());
  report.f_id = f_id;
  report.g_id = g_id;
  report.level = store.config.level;
  report.samples = n;
  report.mean_f = Mean(f);
  report.mean_g = Mean(g);
  report.mean_fg = Mean(fg);
  report.covariance = report.mean_fg - report.mean_f * report.mean_g;
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = (f[i] - report.mean_f) * (g[i] - report.mean_g);
  }
  const double c_mean = Mean(centered);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = (centered[i] - c_mean) * (centered[i] - c_mean);
  }
  const double variance =
      n > 1 ? PairwiseSum(dev) / static_cast<double>(n - 1) : 0.0;
  report.standard_error = std::sqrt(variance / static_cast<double>(n));
  if (report.covariance == 0.0) {
    report.statistic = 0.0;
  } else if (report.standard_error == 0.0) {
    report.statistic = std::copysign(std::numeric_limits<double>::infinity(),
                                     report.covariance);
  } else {
    report.statistic = report.covariance / report.standard_error;
  }
  report.pass = std::abs(report.statistic) <= 3.0;
  return report;
}

std::vector<IndependenceReport> IndependenceSuite(const TrajectoryStore& store,
                                                  std::span<const double> times) {
  std::vector<IndependenceReport> out;
  for (const auto& f : IndependenceFNames()) {
    for (const auto& g : IndependenceGNames()) {
      if (g == "const") continue;
      out.push_back(IndependenceTest(store, times, f, g));
    }
  }
  return out;
}

}  // namespace kinmv
