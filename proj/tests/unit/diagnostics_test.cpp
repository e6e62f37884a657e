#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "kinmv/diagnostics.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/rng.hpp"

namespace kinmv {
namespace {

using Kind = InitialLawSpec::Kind;

TEST(SlicedW1, HandValues) {
  const std::vector<double> a{0.0, 1.0}, b{0.0, 2.0};
  EXPECT_EQ(SlicedW1(a, a, 1), 0.0);
  EXPECT_NEAR(SlicedW1(std::vector<double>{0.3}, std::vector<double>{-1.2}, 1), 1.5, 1e-12);
  EXPECT_NEAR(SlicedW1(a, b, 1), 0.5, 1e-12);
}

TEST(W1Sorted, UnequalSizes) {
  EXPECT_DOUBLE_EQ(W1Sorted({0.0}, {0.0, 2.0}), 1.0);
  // Quantile pieces: [1/3,1/2) |1-0|, [1/2,2/3) |1-3|, [2/3,1) |2-3|.
  EXPECT_NEAR(W1Sorted({2.0, 0.0, 1.0}, {3.0, 0.0}), 1.0 / 6 + 2.0 / 6 + 1.0 / 3, 1e-15);
  EXPECT_THROW(W1Sorted({}, {1.0}), DomainError);
}

TEST(SlicedW1, Pseudometric) {
  const CounterRng rng(1, StreamDomain::kSampler);
  auto cloud = [&](std::uint32_t s, std::size_t n, double shift) {
    std::vector<double> v(2 * n);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = rng.Normal(s, 0, static_cast<std::uint32_t>(i)) + shift;
    }
    return v;
  };
  for (std::uint32_t trial = 0; trial < 5; ++trial) {
    const auto x = cloud(3 * trial, 60, 0.0), y = cloud(3 * trial + 1, 45, 0.5),
               z = cloud(3 * trial + 2, 80, -0.3);
    const double xy = SlicedW1(x, y, 2), yx = SlicedW1(y, x, 2);
    EXPECT_EQ(xy, yx);
    EXPECT_LE(SlicedW1(x, z, 2), xy + SlicedW1(y, z, 2) + 1e-9);
    EXPECT_GT(xy, 0.0);
  }
  EXPECT_EQ(SlicedW1(cloud(0, 10, 0), cloud(0, 10, 0), 2, 64, 0, 4),
            SlicedW1(cloud(0, 10, 0), cloud(0, 10, 0), 2, 64, 0, 1));
  EXPECT_THROW(SlicedW1(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}, 2), ShapeError);
}

SimulationConfig FreeConfig(std::size_t n, std::size_t steps, double horizon) {
  SimulationConfig c;
  c.system = "free";
  c.particles = n;
  c.steps = steps;
  c.horizon = horizon;
  c.seed = 3;
  return c;
}

TEST(Moments, VanishingTime) {
  const auto store = Simulate(FreeConfig(1000, 1, 1e-6));
  EXPECT_NEAR(MomentSup4(store).sup4, 0.0, 1e-3);
  TrajectoryStore single = store;
  single.snapshots.resize(1);
  EXPECT_THROW(MomentSup4(single), DomainError);
}

TEST(Moments, FreeIncrementsFollowThreeHSquared) {
  const auto store = Simulate(FreeConfig(20000, 16, 1.0));
  const std::vector<double> lags{0.25, 0.125, 0.0625};
  const auto r = IncrementMoment4(store, lags, StateBlock::kY);
  ASSERT_EQ(r.table.size(), 3u);
  for (const auto& row : r.table) {
    EXPECT_NEAR(row.moment, 3.0 * row.h * row.h, 0.08 * 3.0 * row.h * row.h) << row.h;
  }
  EXPECT_NEAR(r.slope, 2.0, 0.1);
  EXPECT_GT(r.table[0].h, r.table[1].h);
}

TEST(Moments, FreeIncrementsInTwoDimensions) {
  auto c = FreeConfig(20000, 8, 1.0);
  c.d = 2;
  const auto store = Simulate(c);
  const std::vector<double> lags{0.5, 0.25, 0.125};
  const auto r = IncrementMoment4(store, lags, StateBlock::kY);
  for (const auto& row : r.table) {
    EXPECT_NEAR(row.moment, 8.0 * row.h * row.h, 0.08 * 8.0 * row.h * row.h);
  }
}

TEST(Moments, DeterministicXBlockHasSlopeFour) {
  auto c = FreeConfig(10, 16, 1.0);
  c.system = "constant";
  const auto store = Simulate(c);
  const std::vector<double> lags{0.5, 0.25, 0.125};
  const auto r = IncrementMoment4(store, lags, StateBlock::kX);
  for (const auto& row : r.table) {
    EXPECT_NEAR(row.moment, std::pow(0.5 * row.h, 4), 1e-15);
  }
  EXPECT_NEAR(r.slope, 4.0, 1e-9);
}

TEST(Moments, LagErrors) {
  auto c = FreeConfig(10, 10, 1.0);
  c.snapshot_stride = 5;
  const auto store = Simulate(c);
  EXPECT_THROW(IncrementMoment4(store, std::vector<double>{0.5, 0.25}), ConfigError);
  EXPECT_THROW(IncrementMoment4(store, std::vector<double>{0.5, 0.3, 0.1}), ConfigError);
  EXPECT_THROW(IncrementMoment4(store, std::vector<double>{1.0, 0.5, 0.2}), ConfigError);
}

TEST(Ladder, Judge) {
  LadderReport r;
  r.distances = {1.0, 1.1, 0.4};
  JudgeLadder(r, 0.2);
  EXPECT_TRUE(r.nonincreasing);
  EXPECT_TRUE(r.halved);
  EXPECT_FALSE(r.strictly_decreasing);
  r.distances = {1.0, 1.3, 0.4};
  JudgeLadder(r, 0.2);
  EXPECT_FALSE(r.cauchy_consistent());
}

TEST(Ladder, FreeSystemAcrossLevelsIsFlat) {
  auto c = FreeConfig(200, 20, 1.0);
  LadderSpec spec;
  spec.axis = LadderAxis::kLevel;
  spec.levels = {1, 2, 4};
  const auto r = RunLadder(c, spec);
  ASSERT_EQ(r.distances.size(), 2u);
  for (double v : r.distances) EXPECT_LT(v, 1e-12);
}

TEST(Ladder, ParticleAxisAgainstReference) {
  auto c = FreeConfig(0, 10, 1.0);
  c.initial = {Kind::kGaussian, {}, 1.0};
  LadderSpec spec;
  spec.axis = LadderAxis::kParticles;
  spec.levels = {50, 500, 5000};
  spec.reference = 50000;
  const auto r = RunLadder(c, spec, 4);
  ASSERT_EQ(r.distances.size(), 3u);
  EXPECT_TRUE(r.strictly_decreasing);
  spec.levels = {10, 5, 20};
  EXPECT_THROW(RunLadder(c, spec), ConfigError);
}

TEST(Replay, ReproducesXBitwise) {
  SimulationConfig c;
  c.system = "rough";
  c.level = 2;
  c.particles = 30;
  c.steps = 10;
  c.horizon = 0.5;
  c.initial = {Kind::kGaussian, {}, 1.0};
  const auto field = BuildField(c);
  const auto pairs = ReplayDegeneracy(Simulate(c, *field), *field);
  EXPECT_FALSE(pairs.full_replay);
  EXPECT_EQ(pairs.steps_replayed, 10u);
  EXPECT_TRUE(pairs.pass());
  EXPECT_GE(pairs.envelope_margin, 0.0);

  c.retain_increments = true;
  c.snapshot_stride = 3;
  auto store = Simulate(c, *field);
  const auto full = ReplayDegeneracy(store, *field);
  EXPECT_TRUE(full.full_replay);
  EXPECT_TRUE(full.pass());

  store.snapshots[2].states[0] = std::nextafter(store.snapshots[2].states[0], 10.0);
  EXPECT_EQ(ReplayDegeneracy(store, *field).x_mismatches, 1u);

  // Without increments and with stride 3 only the final pair is replayable.
  c.retain_increments = false;
  const auto envelope = ReplayDegeneracy(Simulate(c, *field), *field);
  EXPECT_FALSE(envelope.full_replay);
  EXPECT_EQ(envelope.steps_replayed, 1u);  // steps 9 and 10: the final step is always kept
  EXPECT_TRUE(envelope.pass());
}

TEST(Replay, EnvelopeViolationDetected) {
  auto c = FreeConfig(5, 4, 1.0);
  auto store = Simulate(c);
  store.snapshots[1].states[0] += 1.0;
  const auto r = ReplayDegeneracy(store, MakeSystem("free"));
  EXPECT_LT(r.envelope_margin, 0.0);
  EXPECT_FALSE(r.pass());
}

TrajectoryStore IndependenceStore(std::size_t n) {
  auto c = FreeConfig(n, 20, 1.0);
  c.retain_increments = true;
  c.initial = {Kind::kGaussian, {}, 0.5};
  return Simulate(c);
}

TEST(Independence, FreeSystemPasses) {
  const auto store = IndependenceStore(10000);
  const std::vector<double> times{0.25, 0.5, 0.75};
  const auto suite = IndependenceSuite(store, times);
  ASSERT_EQ(suite.size(), 10u);
  int passed = 0;
  for (const auto& r : suite) passed += r.pass;
  EXPECT_GE(passed, 9);
}

TEST(Independence, ConstantGFactorsExactly) {
  const auto store = IndependenceStore(500);
  const std::vector<double> times{0.25, 0.5, 0.75};
  for (const auto& f : IndependenceFNames()) {
    const auto r = IndependenceTest(store, times, f, "const");
    EXPECT_EQ(r.covariance, 0.0);
    EXPECT_TRUE(r.pass);
  }
}

TEST(Independence, LeakFixtureFails) {
  // times 0.25, 0.5, 0.75 are steps 5, 10, 15.
  const auto leaked = testing::LeakIncrements(IndependenceStore(10000), 10, 15);
  const std::vector<double> times{0.25, 0.5, 0.75};
  const auto r = IndependenceTest(leaked, times, "clip_yk", "clip_dw");
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.statistic, 3.0);
}

TEST(Independence, Errors) {
  auto c = FreeConfig(10, 4, 1.0);
  const auto store = Simulate(c);
  const std::vector<double> times{0.25, 0.5, 0.75};
  try {
    IndependenceTest(store, times, "clip_y1", "clip_dw");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("rerun with increments retained"), std::string::npos);
  }
  const auto with = IndependenceStore(10);
  EXPECT_THROW(IndependenceTest(with, std::vector<double>{0.25, 0.33}, "clip_y1", "clip_dw"),
               ConfigError);
  EXPECT_THROW(IndependenceTest(with, times, "clip_q", "clip_dw"), ConfigError);
}

}  // namespace
}  // namespace kinmv
