#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kinmv/field.hpp"

namespace kinmv {

// The raw coefficient triple (b0, b1, sigma) with its declared constants.
class CoefficientSet : public CoefficientField {
 public:
  CoefficientSet(std::string name, Kernel drift0, Kernel drift1,
                 Kernel diffusion, Constants constants);

  const std::shared_ptr<const Kernel>& drift0_kernel() const noexcept {
    return drift0_kernel_;
  }
  const std::shared_ptr<const Kernel>& drift1_kernel() const noexcept {
    return drift1_kernel_;
  }
  const std::shared_ptr<const Kernel>& diffusion_kernel() const noexcept {
    return diffusion_kernel_;
  }

 private:
  CoefficientSet(std::string name, std::shared_ptr<const Kernel> drift0,
                 std::shared_ptr<const Kernel> drift1,
                 std::shared_ptr<const Kernel> diffusion, Constants constants);

  std::shared_ptr<const Kernel> drift0_kernel_;
  std::shared_ptr<const Kernel> drift1_kernel_;
  std::shared_ptr<const Kernel> diffusion_kernel_;
};

// Tunables of the built-in systems. Every field has a default that keeps the
// catalog invariants (bounded, nu <= 1, bound >= sqrt(d)).
struct SystemParams {
  double c_sat = 1.0;        // saturation level of tanh couplings
  double kappa = 1.0;        // interaction stiffness
  double sigma_scale = 0.5;  // transport: sigma = sigma_scale * I
  double switch_time = 0.25; // rough: coefficients switch on at this time
};

// Built-in systems, addressable by name:
//
//   free         b0 = b1 = 0, sigma = I
//   constant     b0 = e1/2, b1 = e1/4, sigma = I
//   transport    b0 = c_sat tanh(y)/sqrt(d), b1 = 0, sigma = sigma_scale I
//   saturating   b0 = c_sat tanh(kappa (xi - x))/sqrt(d),
//                b1 = c_sat/2 tanh(kappa (eta - y))/sqrt(d), sigma = I
//   rough        piecewise in t, y, eta; Lipschitz in (x, xi), see catalog.cpp
//   anisotropic  d = 2 only; full 2x2 sigma with interaction in (x, xi)
//
// tanh and sign are applied coordinatewise. A "-d<k>" suffix selects the
// dimension, e.g. "rough-d2". Construction runs a short hypothesis scan and
// throws ConfigError if the system is not bounded and elliptic.
CoefficientSet MakeSystem(std::string_view name, std::size_t d = 1,
                          const SystemParams& params = {});

// Splits "rough-d2" into ("rough", 2); names without suffix keep `d`.
std::pair<std::string, std::size_t> ResolveSystemName(std::string_view name,
                                                      std::size_t d);

std::vector<std::string> CatalogNames();

// Building blocks used by the catalog and by tests.
namespace terms {

// U(t, z) = value (constant vector or matrix), no interaction.
SeparableTerm Constant(std::vector<double> value);

}  // namespace terms

}  // namespace kinmv
