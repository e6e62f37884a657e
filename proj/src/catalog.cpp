#include <cmath>
#include <charconv>

#include "kinmv/coefficients.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/hypotheses.hpp"

namespace kinmv {
namespace {

// Positions of the blocks inside z = (x, y) and zeta = (xi, eta).
inline double X(std::span<const double> z, std::size_t i) { return z[i]; }
inline double Y(std::span<const double> z, std::size_t d, std::size_t i) {
  return z[d + i];
}

inline double Sign(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<double> Identity(std::size_t d, double scale = 1.0) {
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = scale;
  return m;
}

std::vector<double> Unit(std::size_t d, double scale) {
  std::vector<double> v(d, 0.0);
  v[0] = scale;
  return v;
}

TimeProfile Switch(double from) {
  return [from](double t) { return t >= from ? 1.0 : 0.0; };
}

Modulus Linear(double slope) {
  return [slope](double r) { return slope * r; };
}

CoefficientSet Free(std::size_t d) {
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  sigma.Add(terms::Constant(Identity(d)));
  return CoefficientSet("free", std::move(b0), std::move(b1), std::move(sigma),
                        {std::sqrt(static_cast<double>(d)), 1.0, Linear(0.0),
                         Linear(0.0)});
}

CoefficientSet ConstantSystem(std::size_t d) {
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  b0.Add(terms::Constant(Unit(d, 0.5)));
  b1.Add(terms::Constant(Unit(d, 0.25)));
  sigma.Add(terms::Constant(Identity(d)));
  return CoefficientSet("constant", std::move(b0), std::move(b1),
                        std::move(sigma),
                        {0.75 + std::sqrt(static_cast<double>(d)), 1.0,
                         Linear(0.0), Linear(0.0)});
}

CoefficientSet Transport(std::size_t d, const SystemParams& p) {
  const double scale = p.c_sat / std::sqrt(static_cast<double>(d));
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  b0.Add(SeparableTerm{
      .state =
          [d, scale](double, std::span<const double> z, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i) out[i] = scale * std::tanh(Y(z, d, i));
          },
      .state_axes = axis::kY});
  sigma.Add(terms::Constant(Identity(d, p.sigma_scale)));
  const double root_d = std::sqrt(static_cast<double>(d));
  return CoefficientSet(
      "transport", std::move(b0), std::move(b1), std::move(sigma),
      {std::max(p.c_sat + p.sigma_scale * root_d, root_d), p.sigma_scale,
       Linear(0.0), Linear(p.c_sat)});
}

CoefficientSet Saturating(std::size_t d, const SystemParams& p) {
  const double scale = p.c_sat / std::sqrt(static_cast<double>(d));
  const double kappa = p.kappa;
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);
  b0.Add(PairTerm{
      .function =
          [d, scale, kappa](double, std::span<const double> z,
                            std::span<const double> zeta, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i) {
              out[i] = scale * std::tanh(kappa * (X(zeta, i) - X(z, i)));
            }
          },
      .axes = axis::kX | axis::kXi});
  b1.Add(PairTerm{
      .function =
          [d, scale, kappa](double, std::span<const double> z,
                            std::span<const double> zeta, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i) {
              out[i] = 0.5 * scale *
                       std::tanh(kappa * (Y(zeta, d, i) - Y(z, d, i)));
            }
          },
      .axes = axis::kY | axis::kEta});
  sigma.Add(terms::Constant(Identity(d)));
  return CoefficientSet("saturating", std::move(b0), std::move(b1),
                        std::move(sigma),
                        {1.5 * p.c_sat + std::sqrt(static_cast<double>(d)), 1.0,
                         Linear(0.0), Linear(1.5 * p.c_sat * kappa)});
}

// Everything is switched on at t = switch_time; before that the system is the
// free one, which is also what the negative-time extension looks like.
//
//   b0    = H(t) tanh(y) / (2 sqrt(d))
//   b1_i  = H(t) [ -sign(y_i) / 2 + sin(xi_i - x_i) 1{eta_i > 0} / 4 ] / sqrt(d)
//   sigma = [ 1 + H(t) ( 1{y_1 eta_1 > 0} / 4 + cos(x_1 - xi_1) / 8 ) ] I
//
// b1 and sigma jump in t, y and eta but are Lipschitz in (x, xi); both
// interaction terms are written in separable form.
CoefficientSet Rough(std::size_t d, const SystemParams& p) {
  const double root_d = std::sqrt(static_cast<double>(d));
  const double s = 1.0 / root_d;
  const TimeProfile on = Switch(p.switch_time);
  Kernel b0(KernelShape::kVector, d), b1(KernelShape::kVector, d);
  Kernel sigma(KernelShape::kMatrix, d);

  b0.Add(SeparableTerm{
      .time = on,
      .state =
          [d, s](double, std::span<const double> z, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i) out[i] = 0.5 * s * std::tanh(Y(z, d, i));
          },
      .state_axes = axis::kY});

  b1.Add(SeparableTerm{
      .time = on,
      .state =
          [d, s](double, std::span<const double> z, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i) out[i] = -0.5 * s * Sign(Y(z, d, i));
          },
      .state_axes = axis::kY});
  // sin(xi - x) = cos(x) sin(xi) - sin(x) cos(xi)
  for (std::size_t i = 0; i < d; ++i) {
    b1.Add(SeparableTerm{
        .time = on,
        .state =
            [i, s](double, std::span<const double> z, std::span<double> out) {
              std::fill(out.begin(), out.end(), 0.0);
              out[i] = 0.25 * s * std::cos(X(z, i));
            },
        .state_axes = axis::kX,
        .interaction =
            [i, d](double, std::span<const double> zeta) {
              return Y(zeta, d, i) > 0.0 ? std::sin(X(zeta, i)) : 0.0;
            },
        .interaction_axes = axis::kXi | axis::kEta});
    b1.Add(SeparableTerm{
        .time = on,
        .state =
            [i, s](double, std::span<const double> z, std::span<double> out) {
              std::fill(out.begin(), out.end(), 0.0);
              out[i] = -0.25 * s * std::sin(X(z, i));
            },
        .state_axes = axis::kX,
        .interaction =
            [i, d](double, std::span<const double> zeta) {
              return Y(zeta, d, i) > 0.0 ? std::cos(X(zeta, i)) : 0.0;
            },
        .interaction_axes = axis::kXi | axis::kEta});
  }

  auto scaled_identity = [d](double scale, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) out[i * d + i] = scale;
  };
  sigma.Add(terms::Constant(Identity(d)));
  // 1{y eta > 0} = 1{y > 0} 1{eta > 0} + 1{y < 0} 1{eta < 0}
  sigma.Add(SeparableTerm{
      .time = on,
      .state =
          [d, scaled_identity](double, std::span<const double> z,
                               std::span<double> out) {
            scaled_identity(Y(z, d, 0) > 0.0 ? 0.25 : 0.0, out);
          },
      .state_axes = axis::kY,
      .interaction =
          [d](double, std::span<const double> zeta) {
            return Y(zeta, d, 0) > 0.0 ? 1.0 : 0.0;
          },
      .interaction_axes = axis::kEta});
  sigma.Add(SeparableTerm{
      .time = on,
      .state =
          [d, scaled_identity](double, std::span<const double> z,
                               std::span<double> out) {
            scaled_identity(Y(z, d, 0) < 0.0 ? 0.25 : 0.0, out);
          },
      .state_axes = axis::kY,
      .interaction =
          [d](double, std::span<const double> zeta) {
            return Y(zeta, d, 0) < 0.0 ? 1.0 : 0.0;
          },
      .interaction_axes = axis::kEta});
  // cos(x - xi) = cos(x) cos(xi) + sin(x) sin(xi)
  sigma.Add(SeparableTerm{
      .time = on,
      .state =
          [scaled_identity](double, std::span<const double> z,
                            std::span<double> out) {
            scaled_identity(0.125 * std::cos(X(z, 0)), out);
          },
      .state_axes = axis::kX,
      .interaction =
          [](double, std::span<const double> zeta) { return std::cos(X(zeta, 0)); },
      .interaction_axes = axis::kXi});
  sigma.Add(SeparableTerm{
      .time = on,
      .state =
          [scaled_identity](double, std::span<const double> z,
                            std::span<double> out) {
            scaled_identity(0.125 * std::sin(X(z, 0)), out);
          },
      .state_axes = axis::kX,
      .interaction =
          [](double, std::span<const double> zeta) { return std::sin(X(zeta, 0)); },
      .interaction_axes = axis::kXi});

  return CoefficientSet("rough", std::move(b0), std::move(b1), std::move(sigma),
                        {1.25 + 1.375 * root_d, 0.75, Linear(1.0), Linear(1.0)});
}

// d = 2 only.
//   b0    = tanh(y) / (2 sqrt(2))
//   b1    = tanh(kappa (xi - x)) / (2 sqrt(2))
//   sigma = [[1.2 + 0.2 cos(x1 - xi1), 0.3 tanh(y1)],
//            [0.3 tanh(y1),            0.8 + 0.1 sin(x2 - xi2)]]
CoefficientSet Anisotropic(std::size_t d, const SystemParams& p) {
  if (d != 2) {
    throw ConfigError("coefficients: system 'anisotropic' requires d = 2");
  }
  const double s = 0.5 / std::sqrt(2.0);
  const double kappa = p.kappa;
  Kernel b0(KernelShape::kVector, 2), b1(KernelShape::kVector, 2);
  Kernel sigma(KernelShape::kMatrix, 2);
  b0.Add(SeparableTerm{
      .state =
          [s](double, std::span<const double> z, std::span<double> out) {
            out[0] = s * std::tanh(z[2]);
            out[1] = s * std::tanh(z[3]);
          },
      .state_axes = axis::kY});
  b1.Add(PairTerm{
      .function =
          [s, kappa](double, std::span<const double> z,
                     std::span<const double> zeta, std::span<double> out) {
            out[0] = s * std::tanh(kappa * (zeta[0] - z[0]));
            out[1] = s * std::tanh(kappa * (zeta[1] - z[1]));
          },
      .axes = axis::kX | axis::kXi});

  sigma.Add(terms::Constant({1.2, 0.0, 0.0, 0.8}));
  sigma.Add(SeparableTerm{
      .state =
          [](double, std::span<const double> z, std::span<double> out) {
            const double c = 0.3 * std::tanh(z[2]);
            out[0] = 0.0;
            out[1] = c;
            out[2] = c;
            out[3] = 0.0;
          },
      .state_axes = axis::kY});
  auto entry = [](std::size_t index, double value, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    out[index] = value;
  };
  // 0.2 cos(x1 - xi1) = 0.2 [cos x1 cos xi1 + sin x1 sin xi1]
  sigma.Add(SeparableTerm{
      .state = [entry](double, std::span<const double> z,
                       std::span<double> out) { entry(0, 0.2 * std::cos(z[0]), out); },
      .state_axes = axis::kX,
      .interaction = [](double, std::span<const double> zeta) { return std::cos(zeta[0]); },
      .interaction_axes = axis::kXi});
  sigma.Add(SeparableTerm{
      .state = [entry](double, std::span<const double> z,
                       std::span<double> out) { entry(0, 0.2 * std::sin(z[0]), out); },
      .state_axes = axis::kX,
      .interaction = [](double, std::span<const double> zeta) { return std::sin(zeta[0]); },
      .interaction_axes = axis::kXi});
  // 0.1 sin(x2 - xi2) = 0.1 [sin x2 cos xi2 - cos x2 sin xi2]
  sigma.Add(SeparableTerm{
      .state = [entry](double, std::span<const double> z,
                       std::span<double> out) { entry(3, 0.1 * std::sin(z[1]), out); },
      .state_axes = axis::kX,
      .interaction = [](double, std::span<const double> zeta) { return std::cos(zeta[1]); },
      .interaction_axes = axis::kXi});
  sigma.Add(SeparableTerm{
      .state = [entry](double, std::span<const double> z,
                       std::span<double> out) { entry(3, -0.1 * std::cos(z[1]), out); },
      .state_axes = axis::kX,
      .interaction = [](double, std::span<const double> zeta) { return std::sin(zeta[1]); },
      .interaction_axes = axis::kXi});

  return CoefficientSet("anisotropic", std::move(b0), std::move(b1),
                        std::move(sigma),
                        {2.75, 0.5, Linear(0.5 * kappa + 0.35), Linear(0.5)});
}

void RequireWellPosed(const CoefficientSet& cs) {
  SamplerSpec spec;
  spec.num_points = 256;
  spec.seed = 0xC0FFEE;
  spec.separations.clear();
  const auto report = ValidateHypotheses(cs, spec);
  for (const char* id : {"bound", "ellipticity", "symmetry"}) {
    const auto& c = report.condition(id);
    if (c.status == ConditionStatus::kFail) {
      throw ConfigError("coefficients: catalog system '" + cs.name() +
                        "' violates its declared " + id + " (margin " +
                        std::to_string(c.margin) + ")");
    }
  }
}

}  // namespace

std::pair<std::string, std::size_t> ResolveSystemName(std::string_view name,
                                                      std::size_t d) {
  const auto dash = name.rfind("-d");
  if (dash != std::string_view::npos && dash + 2 < name.size()) {
    std::size_t parsed = 0;
    const auto digits = name.substr(dash + 2);
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), parsed);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) {
      return {std::string(name.substr(0, dash)), parsed};
    }
  }
  return {std::string(name), d};
}

std::vector<std::string> CatalogNames() {
  return {"free", "constant", "transport", "saturating", "rough", "anisotropic"};
}

CoefficientSet MakeSystem(std::string_view name, std::size_t d,
                          const SystemParams& params) {
  const auto [base, dim] = ResolveSystemName(name, d);
  if (dim == 0) throw ConfigError("coefficients: dimension d must be positive");
  auto build = [&]() -> CoefficientSet {
    if (base == "free") return Free(dim);
    if (base == "constant") return ConstantSystem(dim);
    if (base == "transport") return Transport(dim, params);
    if (base == "saturating") return Saturating(dim, params);
    if (base == "rough") return Rough(dim, params);
    if (base == "anisotropic") return Anisotropic(dim, params);
    throw ConfigError("coefficients: unknown system '" + std::string(name) + "'");
  };
  CoefficientSet cs = build();
  RequireWellPosed(cs);
  return cs;
}

}  // namespace kinmv
