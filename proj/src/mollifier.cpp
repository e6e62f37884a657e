#include "kinmv/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinmv/errors.hpp"
#include "kinmv/hypotheses.hpp"
#include "kinmv/numeric.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {
namespace {

// Cumulative trapezoid table of the unit profile on [-1, 1]. The profile and
// all its derivatives vanish at +-1, so the trapezoid rule is spectrally
// accurate here.
struct ProfileTable {
  static constexpr std::size_t kIntervals = 1 << 16;
  std::vector<double> grid;
  std::vector<double> cumulative;
  double mass = 0.0;

  ProfileTable() : grid(kIntervals + 1), cumulative(kIntervals + 1, 0.0) {
    const double h = 2.0 / kIntervals;
    for (std::size_t i = 0; i <= kIntervals; ++i) grid[i] = -1.0 + h * i;
    for (std::size_t i = 1; i <= kIntervals; ++i) {
      cumulative[i] = cumulative[i - 1] +
                      0.5 * h *
                          (MollifierKernel::UnitProfile(grid[i - 1]) +
                           MollifierKernel::UnitProfile(grid[i]));
    }
    mass = cumulative.back();
  }
};

const ProfileTable& Table() {
  static const ProfileTable table;
  return table;
}

// Root of x^(D+1) = x + 1, the generalized golden ratio of the R_D sequence.
double GeneralizedGoldenRatio(std::size_t dim) {
  double x = 2.0;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (dim + 1.0));
  return x;
}

// Coordinates of z (or zeta) touched by a mask: X/Xi -> [0, d), Y/Eta -> [d, 2d).
std::vector<std::size_t> Coordinates(AxisMask mask, AxisMask first,
                                     AxisMask second, std::size_t d) {
  std::vector<std::size_t> coords;
  if (mask & first) {
    for (std::size_t i = 0; i < d; ++i) coords.push_back(i);
  }
  if (mask & second) {
    for (std::size_t i = 0; i < d; ++i) coords.push_back(d + i);
  }
  return coords;
}

// Product of the 1-d rule over the given coordinates of a 2d-vector.
OffsetRule ProductRule(const std::vector<std::size_t>& coords,
                       const QuadratureTable& table, double eps) {
  const std::size_t dim = 2 * table.d;
  OffsetRule rule;
  rule.dim = dim;
  if (coords.empty()) return rule;
  const std::size_t p = table.unit_weights.size();
  std::size_t count = 1;
  for (std::size_t c = 0; c < coords.size(); ++c) count *= p;
  rule.weights.assign(count, 1.0);
  rule.offsets.assign(count * dim, 0.0);
  for (std::size_t node = 0; node < count; ++node) {
    std::size_t rest = node;
    double weight = 1.0;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const std::size_t k = rest % p;
      rest /= p;
      weight *= table.unit_weights[k];
      rule.offsets[node * dim + coords[c]] = eps * table.unit_nodes[k];
    }
    rule.weights[node] = weight;
  }
  return rule;
}

// Single node of a joint table restricted to `coords`; `block` selects z (1)
// or zeta (1 + 2d) inside a row (t, x, y, xi, eta).
OffsetRule JointNodeRule(const std::vector<std::size_t>& coords,
                         const QuadratureTable& table, std::size_t node,
                         std::size_t block, double eps) {
  const std::size_t dim = 2 * table.d;
  OffsetRule rule;
  rule.dim = dim;
  if (coords.empty()) return rule;
  const std::size_t row = 1 + 4 * table.d;
  rule.offsets.assign(dim, 0.0);
  for (std::size_t c : coords) {
    rule.offsets[c] = eps * table.unit_nodes[node * row + block + c];
  }
  return rule;
}

TimeWeights AllTimeNodes(const QuadratureTable& table, double eps) {
  TimeWeights w;
  w.unconditional = false;
  if (table.spec.mode == QuadratureSpec::Mode::kTensorMidpoint) {
    for (std::size_t k = 0; k < table.unit_nodes.size(); ++k) {
      w.shifts.push_back(eps * table.unit_nodes[k]);
      w.weights.push_back(table.unit_weights[k]);
    }
  } else {
    const std::size_t row = 1 + 4 * table.d;
    for (std::size_t k = 0; k < table.unit_weights.size(); ++k) {
      w.shifts.push_back(eps * table.unit_nodes[k * row]);
      w.weights.push_back(table.unit_weights[k]);
    }
  }
  return w;
}

TimeWeights SingleTimeNode(double shift, double weight) {
  TimeWeights w;
  w.unconditional = false;
  w.shifts = {shift};
  w.weights = {weight};
  return w;
}

CompiledKernel Compile(std::shared_ptr<const Kernel> kernel,
                       const QuadratureTable& table, double eps) {
  const std::size_t d = table.d;
  const bool tensor = table.spec.mode == QuadratureSpec::Mode::kTensorMidpoint;
  const TimeWeights all_times = AllTimeNodes(table, eps);
  std::vector<SeparableComponent> separable;
  std::vector<PairComponent> pairs;

  for (std::size_t i = 0; i < kernel->separable().size(); ++i) {
    const auto& term = kernel->separable()[i];
    const bool timed = ((term.state_axes | term.interaction_axes) & axis::kTime) != 0;
    const auto state_coords = Coordinates(term.state_axes, axis::kX, axis::kY, d);
    const auto inter_coords =
        Coordinates(term.interaction_axes, axis::kXi, axis::kEta, d);
    const bool spatial = !state_coords.empty() || !inter_coords.empty();

    if (tensor || (!timed && !spatial)) {
      OffsetRule state_rule = tensor ? ProductRule(state_coords, table, eps)
                                     : ProductRule({}, table, eps);
      OffsetRule inter_rule = tensor ? ProductRule(inter_coords, table, eps)
                                     : ProductRule({}, table, eps);
      if (!timed) {
        separable.push_back({i, 0.0, all_times, state_rule, inter_rule});
      } else {
        for (std::size_t k = 0; k < all_times.shifts.size(); ++k) {
          separable.push_back({i, all_times.shifts[k],
                               SingleTimeNode(all_times.shifts[k], all_times.weights[k]),
                               state_rule, inter_rule});
        }
      }
      continue;
    }
    for (std::size_t k = 0; k < all_times.shifts.size(); ++k) {
      separable.push_back(
          {i, timed ? all_times.shifts[k] : 0.0,
           SingleTimeNode(all_times.shifts[k], all_times.weights[k]),
           JointNodeRule(state_coords, table, k, 1, eps),
           JointNodeRule(inter_coords, table, k, 1 + 2 * d, eps)});
    }
  }

  for (std::size_t i = 0; i < kernel->pairs().size(); ++i) {
    const auto& term = kernel->pairs()[i];
    const bool timed = (term.axes & axis::kTime) != 0;
    const auto state_coords = Coordinates(term.axes, axis::kX, axis::kY, d);
    const auto inter_coords = Coordinates(term.axes, axis::kXi, axis::kEta, d);
    if (tensor) {
      OffsetRule state_rule = ProductRule(state_coords, table, eps);
      OffsetRule inter_rule = ProductRule(inter_coords, table, eps);
      if (!timed) {
        pairs.push_back({i, 0.0, all_times, state_rule, inter_rule});
      } else {
        for (std::size_t k = 0; k < all_times.shifts.size(); ++k) {
          pairs.push_back({i, all_times.shifts[k],
                           SingleTimeNode(all_times.shifts[k], all_times.weights[k]),
                           state_rule, inter_rule});
        }
      }
      continue;
    }
    for (std::size_t k = 0; k < all_times.shifts.size(); ++k) {
      pairs.push_back({i, timed ? all_times.shifts[k] : 0.0,
                       SingleTimeNode(all_times.shifts[k], all_times.weights[k]),
                       JointNodeRule(state_coords, table, k, 1, eps),
                       JointNodeRule(inter_coords, table, k, 1 + 2 * d, eps)});
    }
  }
  return CompiledKernel(std::move(kernel), std::move(separable),
                        std::move(pairs), all_times);
}

double AxisSpacing(const CoefficientField& field) {
  const auto* mollified = dynamic_cast<const MollifiedCoefficientSet*>(&field);
  if (mollified == nullptr) return 1e-3;
  const auto& spec = mollified->quadrature().spec;
  const double eps = mollified->bandwidth();
  if (spec.mode == QuadratureSpec::Mode::kTensorMidpoint) {
    return 2.0 * eps / spec.points_per_axis;
  }
  const double per_axis =
      std::pow(static_cast<double>(spec.total_nodes), 1.0 / (1.0 + 4.0 * field.d()));
  return 2.0 * eps / std::max(1.0, per_axis);
}

}  // namespace

MollifierKernel::MollifierKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("mollify: bandwidth must be positive and finite");
  }
  scale_ = 1.0 / (bandwidth * UnitMass());
}

MollifierKernel MollifierKernel::ForLevel(int n) {
  if (n < 1) throw ConfigError("mollify: level n must be >= 1");
  return MollifierKernel(1.0 / n);
}

double MollifierKernel::operator()(double u) const noexcept {
  return scale_ * UnitProfile(u / bandwidth_);
}

double MollifierKernel::UnitProfile(double s) noexcept {
  const double q = 1.0 - s * s;
  if (!(q > 0.0)) return 0.0;
  return std::exp(-1.0 / q);
}

double MollifierKernel::UnitMass() noexcept { return Table().mass; }

double MollifierKernel::UnitQuantile(double p) noexcept {
  const auto& t = Table();
  const double target = std::clamp(p, 0.0, 1.0) * t.mass;
  const auto it = std::lower_bound(t.cumulative.begin(), t.cumulative.end(), target);
  if (it == t.cumulative.begin()) return -1.0;
  if (it == t.cumulative.end()) return 1.0;
  const std::size_t i = static_cast<std::size_t>(it - t.cumulative.begin());
  const double lo = t.cumulative[i - 1], hi = t.cumulative[i];
  const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.5;
  return t.grid[i - 1] + frac * (t.grid[i] - t.grid[i - 1]);
}

QuadratureSpec QuadratureSpec::Default(std::size_t d) {
  QuadratureSpec spec;
  spec.mode = d == 1 ? Mode::kTensorMidpoint : Mode::kQuasiRandom;
  return spec;
}

void QuadratureSpec::Validate() const {
  if (mode == Mode::kTensorMidpoint && points_per_axis < 1) {
    throw ConfigError("mollify: points_per_axis must be >= 1");
  }
  if (mode == Mode::kQuasiRandom && (total_nodes < 2 || total_nodes % 2 != 0)) {
    throw ConfigError("mollify: total_nodes must be even and >= 2");
  }
}

std::string ToString(QuadratureSpec::Mode mode) {
  return mode == QuadratureSpec::Mode::kTensorMidpoint ? "tensor" : "quasi";
}

QuadratureSpec::Mode ParseQuadratureMode(const std::string& text) {
  if (text == "tensor" || text == "tensor-midpoint") {
    return QuadratureSpec::Mode::kTensorMidpoint;
  }
  if (text == "quasi" || text == "quasi-random") {
    return QuadratureSpec::Mode::kQuasiRandom;
  }
  throw ConfigError("mollify: unknown quadrature mode '" + text + "'");
}

QuadratureTable QuadratureTable::Build(const QuadratureSpec& spec,
                                       std::size_t d) {
  spec.Validate();
  QuadratureTable table;
  table.spec = spec;
  table.d = d;
  if (spec.mode == QuadratureSpec::Mode::kTensorMidpoint) {
    const std::size_t p = static_cast<std::size_t>(spec.points_per_axis);
    table.unit_nodes.assign(p, 0.0);
    for (std::size_t k = 0; k < (p + 1) / 2; ++k) {
      const double s = -1.0 + (2.0 * k + 1.0) / p;
      table.unit_nodes[k] = s;
      table.unit_nodes[p - 1 - k] = -s;
    }
    if (p % 2 == 1) table.unit_nodes[p / 2] = 0.0;
    std::vector<double> raw(p);
    for (std::size_t k = 0; k < p; ++k) {
      raw[k] = MollifierKernel::UnitProfile(table.unit_nodes[k]);
    }
    const double total = PairwiseSum(raw);
    table.unit_weights.resize(p);
    for (std::size_t k = 0; k < p; ++k) table.unit_weights[k] = raw[k] / total;
    return table;
  }

  const std::size_t dim = 1 + 4 * d;
  const std::size_t count = static_cast<std::size_t>(spec.total_nodes);
  const std::size_t half = count / 2;
  const double phi = GeneralizedGoldenRatio(dim);
  const CounterRng rng(spec.seed, StreamDomain::kQuadrature);
  std::vector<double> alpha(dim), shift(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    alpha[j] = std::fmod(std::pow(1.0 / phi, static_cast<double>(j + 1)), 1.0);
    shift[j] = rng.Uniform(0, 0, static_cast<std::uint32_t>(j));
  }
  table.unit_nodes.assign(count * dim, 0.0);
  table.unit_weights.assign(count, 1.0 / static_cast<double>(count));
  for (std::size_t m = 0; m < half; ++m) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = std::fmod(shift[j] + (m + 1) * alpha[j], 1.0);
      const double s = MollifierKernel::UnitQuantile(u);
      table.unit_nodes[m * dim + j] = s;
      table.unit_nodes[(half + m) * dim + j] = -s;
    }
  }
  return table;
}

double QuadratureTable::full_node_count() const noexcept {
  if (spec.mode == QuadratureSpec::Mode::kQuasiRandom) {
    return static_cast<double>(spec.total_nodes);
  }
  return std::pow(static_cast<double>(spec.points_per_axis), 1.0 + 4.0 * d);
}

MollifiedCoefficientSet::MollifiedCoefficientSet(
    CoefficientSet base, int level, QuadratureTable table, CompiledKernel drift0,
    CompiledKernel drift1, CompiledKernel diffusion)
    : CoefficientField(base.name(), base.d(), std::move(drift0),
                       std::move(drift1), std::move(diffusion),
                       {base.bound(), std::min(base.ellipticity(), 1.0),
                        base.modulus(), base.modulus_drift0()}),
      base_(std::move(base)),
      level_(level),
      table_(std::move(table)) {}

MollifiedCoefficientSet Mollify(const CoefficientSet& cs, int n,
                                const QuadratureSpec& quadrature) {
  if (n < 1) throw ConfigError("mollify: level n must be >= 1");
  const double root_d = std::sqrt(static_cast<double>(cs.d()));
  if (cs.bound() < root_d) {
    throw ConfigError(
        "mollify: identity extension violates declared bound (bound " +
        std::to_string(cs.bound()) + " < sqrt(d) = " + std::to_string(root_d) +
        ")");
  }
  QuadratureTable table = QuadratureTable::Build(quadrature, cs.d());
  const double eps = 1.0 / n;
  auto drift0 = Compile(cs.drift0_kernel(), table, eps);
  auto drift1 = Compile(cs.drift1_kernel(), table, eps);
  auto diffusion = Compile(cs.diffusion_kernel(), table, eps);
  return MollifiedCoefficientSet(cs, n, std::move(table), std::move(drift0),
                                 std::move(drift1), std::move(diffusion));
}

ProbeAxis ParseProbeAxis(const std::string& text) {
  ProbeAxis axis;
  std::string name = text;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    axis.component = std::stoul(text.substr(colon + 1));
  }
  if (name == "t") axis.block = ProbeAxis::Block::kTime;
  else if (name == "x") axis.block = ProbeAxis::Block::kX;
  else if (name == "y") axis.block = ProbeAxis::Block::kY;
  else if (name == "xi") axis.block = ProbeAxis::Block::kXi;
  else if (name == "eta") axis.block = ProbeAxis::Block::kEta;
  else throw ConfigError("mollify: unknown probe axis '" + text + "'");
  return axis;
}

double LipschitzProbe(const CoefficientField& field, ProbeAxis axis,
                      const ProbeSpec& spec) {
  if (spec.num_pairs == 0) throw ConfigError("lipschitz_probe: num_pairs must be >= 1");
  const std::size_t d = field.d();
  if (axis.block != ProbeAxis::Block::kTime && axis.component >= d) {
    throw ShapeError("lipschitz_probe: axis component out of range");
  }
  const double step = spec.separation > 0.0 ? spec.separation : AxisSpacing(field);
  SamplerSpec sampler;
  sampler.box_radius = spec.box_radius;
  sampler.seed = spec.seed;
  sampler.time_horizon = spec.box_radius;
  const std::size_t width = d + d + d * d;

  auto values = [&](const SamplePoint& p, std::vector<double>& out) {
    out.resize(width);
    std::span<double> all(out);
    field.drift0().Evaluate(p.t, p.z, p.zeta, all.subspan(0, d));
    field.drift1().Evaluate(p.t, p.z, p.zeta, all.subspan(d, d));
    field.diffusion().Evaluate(p.t, p.z, p.zeta, all.subspan(2 * d, d * d));
  };

  double largest = 0.0;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < spec.num_pairs; ++i) {
    SamplePoint p = DrawSample(sampler, d, i);
    SamplePoint q = p;
    switch (axis.block) {
      case ProbeAxis::Block::kTime: q.t += step; break;
      case ProbeAxis::Block::kX: q.z[axis.component] += step; break;
      case ProbeAxis::Block::kY: q.z[d + axis.component] += step; break;
      case ProbeAxis::Block::kXi: q.zeta[axis.component] += step; break;
      case ProbeAxis::Block::kEta: q.zeta[d + axis.component] += step; break;
    }
    values(p, a);
    values(q, b);
    double diff = 0.0;
    for (std::size_t k = 0; k < width; ++k) diff += (a[k] - b[k]) * (a[k] - b[k]);
    largest = std::max(largest, std::sqrt(diff) / step);
  }
  return largest;
}

}  // namespace kinmv
