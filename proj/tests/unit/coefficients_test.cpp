#include <cmath>

#include <gtest/gtest.h>

#include "kinmv/coefficients.hpp"
#include "kinmv/errors.hpp"

namespace kinmv {
namespace {

std::vector<double> Z(std::initializer_list<double> v) { return v; }

TEST(Catalog, NamesResolve) {
  for (const auto& name : CatalogNames()) {
    const std::size_t d = name == "anisotropic" ? 2 : 1;
    const CoefficientSet cs = MakeSystem(name, d);
    EXPECT_EQ(cs.name(), name);
    EXPECT_EQ(cs.d(), d);
    EXPECT_GE(cs.bound(), std::sqrt(static_cast<double>(d)));
    EXPECT_GT(cs.ellipticity(), 0.0);
    EXPECT_LE(cs.ellipticity(), 1.0);
  }
}

TEST(Catalog, DimensionSuffix) {
  EXPECT_EQ(ResolveSystemName("rough-d3", 1), std::make_pair(std::string("rough"), std::size_t{3}));
  EXPECT_EQ(ResolveSystemName("free", 2), std::make_pair(std::string("free"), std::size_t{2}));
  EXPECT_EQ(MakeSystem("saturating-d2").d(), 2u);
}

TEST(Catalog, Errors) {
  EXPECT_THROW(MakeSystem("nonesuch"), ConfigError);
  EXPECT_THROW(MakeSystem("anisotropic", 1), ConfigError);
  EXPECT_THROW(MakeSystem("free", 0), ConfigError);
}

TEST(Catalog, FreeAndConstantValues) {
  const auto free = MakeSystem("free", 2);
  const auto z = Z({1, 2, 3, 4}), zeta = Z({-1, 0, 5, 6});
  EXPECT_EQ(free.EvalDrift0(0.3, z, zeta), Z({0, 0}));
  EXPECT_EQ(free.EvalDiffusion(0.3, z, zeta), Z({1, 0, 0, 1}));
  const auto constant = MakeSystem("constant", 1);
  EXPECT_EQ(constant.EvalDrift0(2.0, Z({7, 8}), Z({9, 10})), Z({0.5}));
  EXPECT_EQ(constant.EvalDrift1(2.0, Z({7, 8}), Z({9, 10})), Z({0.25}));
}

TEST(Catalog, TransportAndSaturatingFormulas) {
  const auto transport = MakeSystem("transport", 1);
  EXPECT_DOUBLE_EQ(transport.EvalDrift0(0, Z({3, 0.7}), Z({0, 0}))[0], std::tanh(0.7));
  EXPECT_DOUBLE_EQ(transport.EvalDiffusion(0, Z({3, 0.7}), Z({0, 0}))[0], 0.5);
  const auto sat = MakeSystem("saturating", 1);
  EXPECT_DOUBLE_EQ(sat.EvalDrift0(0, Z({0.2, 0.1}), Z({1.0, -0.4}))[0], std::tanh(0.8));
  EXPECT_DOUBLE_EQ(sat.EvalDrift1(0, Z({0.2, 0.1}), Z({1.0, -0.4}))[0], 0.5 * std::tanh(-0.5));
}

TEST(Catalog, RoughSwitchesOnAtQuarter) {
  const auto rough = MakeSystem("rough", 1);
  const auto z = Z({0.3, 0.8}), zeta = Z({1.1, 0.5});
  EXPECT_EQ(rough.EvalDrift0(0.2, z, zeta), Z({0}));
  EXPECT_EQ(rough.EvalDrift1(0.2, z, zeta), Z({0}));
  EXPECT_EQ(rough.EvalDiffusion(0.2, z, zeta), Z({1}));
  // t >= 1/4: b0 = tanh(y)/2, b1 = -sign(y)/2 + sin(xi - x)/4 * 1{eta > 0},
  // sigma = 1 + 1{y eta > 0}/4 + cos(x - xi)/8.
  EXPECT_DOUBLE_EQ(rough.EvalDrift0(0.25, z, zeta)[0], 0.5 * std::tanh(0.8));
  EXPECT_NEAR(rough.EvalDrift1(0.5, z, zeta)[0], -0.5 + 0.25 * std::sin(0.8), 1e-15);
  EXPECT_NEAR(rough.EvalDiffusion(0.5, z, zeta)[0], 1.25 + 0.125 * std::cos(0.8), 1e-15);
  EXPECT_NEAR(rough.EvalDiffusion(0.5, z, Z({1.1, -0.5}))[0], 1.0 + 0.125 * std::cos(0.8),
              1e-15);
}

TEST(Catalog, AnisotropicSymmetric) {
  const auto cs = MakeSystem("anisotropic", 2);
  const auto s = cs.EvalDiffusion(0.1, Z({0.3, -1, 2, 0.5}), Z({1, 2, 0, 0}));
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[1], s[2]);
  EXPECT_DOUBLE_EQ(s[1], 0.3 * std::tanh(2.0));
}

TEST(CoefficientField, CheckedEvaluation) {
  const auto cs = MakeSystem("free", 1);
  EXPECT_THROW(cs.EvalDrift0(0, Z({1}), Z({1, 2})), ShapeError);
  EXPECT_THROW(cs.EvalDrift0(-1, Z({1, 2}), Z({1, 2})), DomainError);
  EXPECT_THROW(cs.EvalDrift0(0, Z({NAN, 2}), Z({1, 2})), DomainError);
}

}  // namespace
}  // namespace kinmv
