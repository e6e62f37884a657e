#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "kinmv/cli.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/persistence.hpp"

namespace kinmv {
namespace {

RunConfig Resolve(const std::string& text, std::vector<std::string> overrides = {}) {
  auto entries = ParseConfigText(text, "test.cfg");
  for (const auto& o : overrides) entries.push_back(ParseOverride(o, "--set"));
  return ResolveConfig(entries);
}

std::string ErrorOf(const std::string& text) {
  try {
    Resolve(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, MinimalFileFillsDefaults) {
  const auto c = Resolve("system = \"free\"\nN = 100\nT = 1.0\nsteps = 100\nseed = 1\n");
  EXPECT_EQ(c.sim.system, "free");
  EXPECT_EQ(c.sim.particles, 100u);
  EXPECT_EQ(c.sim.level, 0);
  EXPECT_EQ(c.sim.subsample, 0u);  // full
  EXPECT_EQ(c.sim.d, 1u);
  EXPECT_EQ(ConfigToJson(c.sim)["subsample"], 0);
}

TEST(Config, OverrideWins) {
  const auto c = Resolve("system = free\nseed = 1\n", {"seed=7"});
  EXPECT_EQ(c.sim.seed, 7u);
  const auto d = Resolve("system = free\n[init]\nscale = 1\n", {"init.scale=0.25"});
  EXPECT_EQ(d.sim.initial.scale, 0.25);
}

TEST(Config, SectionsAndLists) {
  const auto c = Resolve(
      "system = rough  # comment\nn = 4\nsubsample = 50\nN = 100\n"
      "[init]\nkind = gaussian\ncenter = 1, 2\n"
      "[ladder]\naxis = N\nlevels = 10, 100, 1000\nreference = 10000\n"
      "[independence]\ntimes = 0.25,0.5,0.75\nf = clip_y1, cos_x\n"
      "[mollify]\nquadrature = quasi\n");
  EXPECT_EQ(c.sim.level, 4);
  EXPECT_EQ(c.sim.subsample, 50u);
  EXPECT_EQ(c.sim.initial.kind, InitialLawSpec::Kind::kGaussian);
  EXPECT_EQ(c.sim.initial.center, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.ladder.axis, LadderAxis::kParticles);
  EXPECT_EQ(c.ladder.levels, (std::vector<std::size_t>{10, 100, 1000}));
  EXPECT_EQ(c.ladder.reference, std::size_t{10000});
  EXPECT_EQ(c.times.size(), 3u);
  EXPECT_EQ(c.f_ids, (std::vector<std::string>{"clip_y1", "cos_x"}));
  EXPECT_EQ(c.sim.quadrature->mode, QuadratureSpec::Mode::kQuasiRandom);
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const auto msg = ErrorOf("system = free\n\nNparticles = 3\n");
  EXPECT_NE(msg.find("unknown key 'Nparticles'"), std::string::npos);
  EXPECT_NE(msg.find("test.cfg:3"), std::string::npos);
  EXPECT_NE(ErrorOf("system = free\n[init]\nN = 3\n").find("unknown key 'init.N'"),
            std::string::npos);
}

TEST(Config, TypeMismatchNamesKeyAndLine) {
  const auto msg = ErrorOf("system = free\nN = many\n");
  EXPECT_NE(msg.find("key 'N'"), std::string::npos);
  EXPECT_NE(msg.find("test.cfg:2"), std::string::npos);
  EXPECT_NE(msg.find("integer"), std::string::npos);
  EXPECT_NE(ErrorOf("system = free\nretain_increments = maybe\n").find("boolean"),
            std::string::npos);
  EXPECT_NE(ErrorOf("system = free\nT = 1.0x\n").find("key 'T'"), std::string::npos);
}

TEST(Config, MissingSystemAndMalformedLines) {
  EXPECT_NE(ErrorOf("N = 3\n").find("missing required key 'system'"), std::string::npos);
  EXPECT_NE(ErrorOf("system = free\njunk\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(ErrorOf("[init\nsystem = free\n").find("test.cfg:1"), std::string::npos);
}

TEST(Config, EveryKnownKeyAccepted) {
  EXPECT_GE(KnownConfigKeys().size(), 40u);
}

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    out_ = std::filesystem::temp_directory_path() /
           ("kinmv_run_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(out_);
  }
  void TearDown() override { std::filesystem::remove_all(out_); }

  int Execute(const std::string& command, const std::string& text, std::string* stdout_text = nullptr,
              std::string* stderr_text = nullptr) {
    RunConfig c = Resolve(text);
    c.command = command;
    c.out = out_;
    std::ostringstream out, err;
    const int status = kinmv::Run(c, out, err);
    if (stdout_text) *stdout_text = out.str();
    if (stderr_text) *stderr_text = err.str();
    return status;
  }

  std::filesystem::path out_;
};

TEST_F(RunTest, ValidateFree) {
  std::string out;
  EXPECT_EQ(Execute("validate", "system = free\n[validate]\nnum_points = 500\n", &out), 0);
  EXPECT_EQ(out.rfind("summary: validate", 0), 0u);
  const auto report = nlohmann::json::parse(ReadTextFile(out_ / "report.json"));
  EXPECT_TRUE(report["validate"]["all_pass"].get<bool>());
  EXPECT_TRUE(std::filesystem::exists(out_ / "validate.csv"));
}

TEST_F(RunTest, SimulateWritesStore) {
  EXPECT_EQ(Execute("simulate", "system = free\nN = 1000\nsteps = 10\n"), 0);
  EXPECT_TRUE(std::filesystem::exists(out_ / "manifest"));
  EXPECT_TRUE(std::filesystem::exists(out_ / "snap_10.bin"));
  EXPECT_EQ(LoadStore(out_).snapshots.size(), 11u);
  const auto csv = ReadTextFile(out_ / "terminal.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "particle,x0,y0");
}

TEST_F(RunTest, FailuresAreSingleLine) {
  std::string err;
  EXPECT_EQ(Execute("simulate", "system = nonesuch\n", nullptr, &err), 2);
  EXPECT_EQ(err.rfind("error: ConfigError: ", 0), 0u);
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
  EXPECT_EQ(Execute("frobnicate", "system = free\n", nullptr, &err), 2);
}

TEST_F(RunTest, ValidationFailureExitsNonzero) {
  // sigma_scale = 0 breaks ellipticity of the transport system.
  std::string err;
  const int status = Execute("validate", "system = transport\n[system]\nsigma_scale = 0\n",
                             nullptr, &err);
  EXPECT_NE(status, 0);
}

}  // namespace
}  // namespace kinmv
