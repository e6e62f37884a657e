#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kinmv/coefficients.hpp"

namespace kinmv {

// Normalized bump u -> c/eps * exp(-1 / (1 - (u/eps)^2)) on |u| < eps.
class MollifierKernel {
 public:
  explicit MollifierKernel(double bandwidth);
  // Level n smooths with bandwidth 1/n.
  static MollifierKernel ForLevel(int n);

  double bandwidth() const noexcept { return bandwidth_; }
  double operator()(double u) const noexcept;

  // exp(-1 / (1 - s^2)) on |s| < 1, the unnormalized unit profile.
  static double UnitProfile(double s) noexcept;
  // Integral of UnitProfile over (-1, 1).
  static double UnitMass() noexcept;
  // Quantile function of the normalized unit profile, p in [0, 1].
  static double UnitQuantile(double p) noexcept;

 private:
  double bandwidth_;
  double scale_;
};

// Discretization of the (1 + 4d)-dimensional smoothing integral.
//
// kTensorMidpoint: the product of a 1-d midpoint rule with `points_per_axis`
//   nodes per coordinate, weights proportional to the bump. Only the 1-d rule
//   is stored; products are formed over the axes a term depends on.
// kQuasiRandom: `total_nodes` joint nodes (a shifted Kronecker sequence
//   pushed through the bump quantile, plus the mirrored nodes) with equal
//   weights.
struct QuadratureSpec {
  enum class Mode { kTensorMidpoint, kQuasiRandom };

  Mode mode = Mode::kTensorMidpoint;
  int points_per_axis = 9;
  int total_nodes = 4096;
  std::uint64_t seed = 0x6d6f6c6c;

  // Tensor rule for d = 1, quasi-random nodes otherwise.
  static QuadratureSpec Default(std::size_t d);

  void Validate() const;
};

std::string ToString(QuadratureSpec::Mode mode);
QuadratureSpec::Mode ParseQuadratureMode(const std::string& text);

// Materialized node table on the unit cube [-1, 1]^(1 + 4d); scale by the
// bandwidth to get offsets. Tensor: `unit_nodes` / `unit_weights` is the 1-d
// rule. Quasi-random: `unit_nodes` is total_nodes x (1 + 4d), row-major, and
// `unit_weights` the per-node weight.
struct QuadratureTable {
  QuadratureSpec spec;
  std::size_t d = 1;
  std::vector<double> unit_nodes;
  std::vector<double> unit_weights;

  static QuadratureTable Build(const QuadratureSpec& spec, std::size_t d);
  // Number of nodes of the full (1 + 4d)-dimensional rule.
  double full_node_count() const noexcept;
};

class MollifiedCoefficientSet : public CoefficientField {
 public:
  const CoefficientSet& base() const noexcept { return base_; }
  int level() const noexcept override { return level_; }
  const QuadratureTable& quadrature() const noexcept { return table_; }
  double bandwidth() const noexcept { return 1.0 / level_; }

 private:
  friend MollifiedCoefficientSet Mollify(const CoefficientSet&, int,
                                         const QuadratureSpec&);
  MollifiedCoefficientSet(CoefficientSet base, int level, QuadratureTable table,
                          CompiledKernel drift0, CompiledKernel drift1,
                          CompiledKernel diffusion);

  CoefficientSet base_;
  int level_;
  QuadratureTable table_;
};

// Smooths b0, b1 and sigma in (t, x, y, xi, eta) at bandwidth 1/n, extending
// the drifts by 0 and sigma by the identity for negative times. The result
// keeps the bound of `cs` and has ellipticity constant min(nu, 1).
// Throws ConfigError for n < 1, an invalid quadrature, or bound < sqrt(d).
MollifiedCoefficientSet Mollify(const CoefficientSet& cs, int n,
                                const QuadratureSpec& quadrature);

// Largest difference quotient of (b0, b1, sigma) along one coordinate.
struct ProbeAxis {
  enum class Block { kTime, kX, kY, kXi, kEta };
  Block block = Block::kX;
  std::size_t component = 0;
};

ProbeAxis ParseProbeAxis(const std::string& text);

struct ProbeSpec {
  std::size_t num_pairs = 1000;
  std::uint64_t seed = 11;
  double box_radius = 1.0;
  // Pair separation. Non-positive means the node spacing of the quadrature
  // along the probed axis: below that spacing the discretized convolution of
  // a discontinuous coefficient is piecewise constant.
  double separation = 0.0;
};

double LipschitzProbe(const CoefficientField& field, ProbeAxis axis,
                      const ProbeSpec& spec);

}  // namespace kinmv
