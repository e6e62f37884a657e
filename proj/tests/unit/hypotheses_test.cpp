#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/hypotheses.hpp"

namespace kinmv {
namespace {

SamplerSpec Small() {
  SamplerSpec spec;
  spec.num_points = 2000;
  return spec;
}

TEST(Validate, CatalogPasses) {
  for (const auto& name : CatalogNames()) {
    const auto cs = MakeSystem(name, name == "anisotropic" ? 2 : 1);
    const auto report = ValidateHypotheses(cs, Small());
    EXPECT_TRUE(report.all_pass()) << name;
    EXPECT_EQ(report.conditions.size(), 5u);
  }
}

TEST(Validate, ZeroDiffusionFailsWithMarginMinusNu) {
  const auto cs = testing::ScalarDiffusion(1, 0.0, 0.75);
  const auto report = ValidateHypotheses(cs, Small());
  EXPECT_FALSE(report.all_pass());
  const auto& e = report.condition("ellipticity");
  EXPECT_EQ(e.status, ConditionStatus::kFail);
  EXPECT_EQ(e.margin, -0.75);
}

TEST(Validate, UndeclaredModulusIsObservational) {
  const auto cs = testing::ScalarDiffusion(1, 1.0, 1.0);
  const auto report = ValidateHypotheses(cs, Small());
  EXPECT_EQ(report.condition("modulus_x_xi").status, ConditionStatus::kObservational);
  EXPECT_TRUE(report.all_pass());
  EXPECT_THROW(report.condition("nonesuch"), ConfigError);
}

TEST(Validate, BoundViolationDetected) {
  Kernel b0(KernelShape::kVector, 1), b1(KernelShape::kVector, 1);
  Kernel sigma(KernelShape::kMatrix, 1);
  b0.Add(terms::Constant({3.0}));
  sigma.Add(terms::Constant({1.0}));
  const CoefficientSet cs("loose", b0, b1, sigma, {2.0, 1.0, {}, {}});
  const auto report = ValidateHypotheses(cs, Small());
  EXPECT_EQ(report.condition("bound").status, ConditionStatus::kFail);
  EXPECT_DOUBLE_EQ(report.condition("bound").margin, -2.0);
}

TEST(Scan, EllipticityMargins) {
  EXPECT_EQ(EllipticityScan(testing::ScalarDiffusion(1, 1.0, 1.0), Small()).margin, 0.0);
  EXPECT_EQ(EllipticityScan(testing::ScalarDiffusion(1, 1.5, 1.0), Small()).margin, 0.5);
}

TEST(Scan, Deterministic) {
  const auto cs = MakeSystem("rough", 1);
  const auto a = ValidateHypotheses(cs, Small(), 1);
  const auto b = ValidateHypotheses(cs, Small(), 4);
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    EXPECT_EQ(a.conditions[i].margin, b.conditions[i].margin);
  }
}

TEST(Sampler, RejectsBadSpec) {
  SamplerSpec spec;
  spec.num_points = 0;
  EXPECT_THROW(ValidateHypotheses(MakeSystem("free"), spec), ConfigError);
}

}  // namespace
}  // namespace kinmv
