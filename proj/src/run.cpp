#include <cmath>
#include <ostream>
#include <sstream>

#include "kinmv/cli.hpp"
#include "kinmv/errors.hpp"
#include "kinmv/persistence.hpp"
#include "kinmv/report.hpp"

namespace kinmv {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Outcome {
  Json report;
  std::string summary;
  bool failed = false;
};

Json StoreSummary(const Json& manifest) {
  Json blocks = Json::array();
  for (const auto& s : manifest.at("snapshots")) {
    blocks.push_back({{"step", s.at("step")}, {"time", s.at("time")}, {"sha256", s.at("sha256")}});
  }
  return Json{{"format_version", manifest.at("format_version")},
              {"snapshots", std::move(blocks)},
              {"increment_blocks", manifest.at("increments").size()}};
}

std::vector<double> DefaultLags(const SimulationConfig& sim) {
  const double unit = sim.step_size() * static_cast<double>(sim.snapshot_stride);
  return {4.0 * unit, 2.0 * unit, unit};
}

std::vector<double> DefaultTimes(const SimulationConfig& sim) {
  // Snapshot steps nearest to T/4 and T/2, and the final step.
  const std::size_t stride = sim.snapshot_stride;
  auto snap = [&](std::size_t step) {
    step = std::max<std::size_t>(stride, step / stride * stride);
    return static_cast<double>(step) * sim.step_size();
  };
  return {snap(sim.steps / 4), snap(sim.steps / 2),
          static_cast<double>(sim.steps) * sim.step_size()};
}

Outcome Simulate(const RunConfig& c) {
  const TrajectoryStore store = kinmv::Simulate(c.sim, c.workers);
  const Json manifest = SaveStore(store, c.out);
  const MomentReport moments = MomentSup4(store);
  Outcome o;
  o.report["store"] = StoreSummary(manifest);
  o.report["moments"] = {{"sup4", moments.sup4}};
  if (c.csv) {
    const std::size_t dim = 2 * c.sim.d;
    std::vector<std::string> header{"particle"};
    for (std::size_t k = 0; k < c.sim.d; ++k) header.push_back("x" + std::to_string(k));
    for (std::size_t k = 0; k < c.sim.d; ++k) header.push_back("y" + std::to_string(k));
    CsvTable table(header);
    const auto& states = store.snapshots.back().states;
    for (std::size_t i = 0; i < c.sim.particles; ++i) {
      table.Row().Add(i);
      for (std::size_t k = 0; k < dim; ++k) table.Add(states[i * dim + k]);
    }
    table.Write(c.out / "terminal.csv");
  }
  o.summary = "simulate system=" + c.sim.system + " N=" + std::to_string(c.sim.particles) +
              " steps=" + std::to_string(c.sim.steps) + " sup4=" + FormatDouble(moments.sup4);
  return o;
}

Outcome Validate(const RunConfig& c) {
  const auto field = BuildField(c.sim);
  const HypothesisReport report = ValidateHypotheses(*field, c.validate, c.workers);
  Outcome o;
  o.report["validate"] = ToJson(report);
  o.failed = !report.all_pass();
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_id;
  for (const auto& cond : report.conditions) {
    if (cond.status == ConditionStatus::kObservational) continue;
    if (cond.margin < worst) {
      worst = cond.margin;
      worst_id = cond.id;
    }
  }
  if (c.csv) {
    CsvTable table({"condition", "status", "margin"});
    for (const auto& cond : report.conditions) {
      table.Row().Add(cond.id).Add(std::string(ToString(cond.status))).Add(cond.margin);
    }
    table.Write(c.out / "validate.csv");
    CsvTable variation({"condition", "separation", "variation"});
    for (const auto& cond : report.conditions) {
      for (const auto& [r, v] : cond.variation) variation.Row().Add(cond.id).Add(r).Add(v);
    }
    variation.Write(c.out / "modulus.csv");
  }
  o.summary = "validate system=" + report.system + " n=" + std::to_string(report.level) +
              " all_pass=" + (report.all_pass() ? "true" : "false") +
              " worst=" + worst_id + ":" + FormatDouble(worst);
  return o;
}

Outcome Ladder(const RunConfig& c) {
  const LadderReport report = RunLadder(c.sim, c.ladder, c.workers);
  Outcome o;
  o.report["ladder"] = ToJson(report);
  if (c.csv) {
    CsvTable table({"level", "compared_with", "distance"});
    for (std::size_t k = 0; k < report.distances.size(); ++k) {
      if (report.reference) {
        table.Row().Add(report.levels[k]).Add(*report.reference).Add(report.distances[k]);
      } else {
        table.Row().Add(report.levels[k]).Add(report.levels[k + 1]).Add(report.distances[k]);
      }
    }
    table.Write(c.out / "ladder.csv");
  }
  std::string distances;
  for (double v : report.distances) {
    distances += (distances.empty() ? "" : ";") + FormatDouble(v);
  }
  o.summary = "ladder axis=" + ToString(report.axis) + " distances=" + distances +
              " verdict=" + (report.cauchy_consistent() ? "cauchy-consistent" : "inconclusive");
  return o;
}

Outcome Diagnose(const RunConfig& c) {
  const auto field = BuildField(c.sim);
  const TrajectoryStore store = kinmv::Simulate(c.sim, *field, c.workers);
  const Json manifest = SaveStore(store, c.out);
  const auto lags = c.lags.empty() ? DefaultLags(c.sim) : c.lags;
  const MomentReport moments = IncrementMoment4(store, lags, c.block);
  const DegeneracyReport replay = ReplayDegeneracy(store, *field, c.workers);
  SamplerSpec scan_spec = c.validate;
  const ScanResult ellipticity = EllipticityScan(*field, scan_spec, c.workers);
  Outcome o;
  o.report["store"] = StoreSummary(manifest);
  o.report["moments"] = ToJson(moments);
  o.report["degeneracy"] = ToJson(replay);
  o.report["ellipticity_scan"] = ToJson(ellipticity);
  if (c.csv) {
    CsvTable table({"h", "moment", "pairs"});
    for (const auto& row : moments.table) table.Row().Add(row.h).Add(row.moment).Add(row.pairs);
    table.Write(c.out / "increments.csv");
  }
  o.summary = "diagnose system=" + c.sim.system + " n=" + std::to_string(c.sim.level) +
              " slope=" + FormatDouble(moments.slope) + " sup4=" + FormatDouble(moments.sup4) +
              " replay=" + (replay.pass() ? "pass" : "fail");
  return o;
}

Outcome Independence(const RunConfig& c) {
  SimulationConfig sim = c.sim;
  sim.retain_increments = true;
  const TrajectoryStore store = kinmv::Simulate(sim, c.workers);
  const Json manifest = SaveStore(store, c.out);
  const auto times = c.times.empty() ? DefaultTimes(sim) : c.times;
  const auto fs_ids = c.f_ids.empty() ? IndependenceFNames() : c.f_ids;
  std::vector<std::string> gs_ids = c.g_ids;
  if (gs_ids.empty()) {
    for (const auto& g : IndependenceGNames()) {
      if (g != "const") gs_ids.push_back(g);
    }
  }
  Json tests = Json::array();
  std::size_t passed = 0, total = 0;
  CsvTable table({"f", "g", "covariance", "standard_error", "statistic", "pass"});
  for (const auto& f : fs_ids) {
    for (const auto& g : gs_ids) {
      const auto r = IndependenceTest(store, times, f, g);
      tests.push_back(ToJson(r));
      ++total;
      passed += r.pass ? 1 : 0;
      table.Row().Add(f).Add(g).Add(r.covariance).Add(r.standard_error).Add(r.statistic)
          .Add(std::string(r.pass ? "true" : "false"));
    }
  }
  if (c.csv) table.Write(c.out / "independence.csv");
  Outcome o;
  o.report["store"] = StoreSummary(manifest);
  o.report["independence"] = {{"times", times},
                              {"passed", passed},
                              {"total", total},
                              {"tests", std::move(tests)}};
  o.summary = "independence system=" + sim.system + " n=" + std::to_string(sim.level) +
              " passed=" + std::to_string(passed) + "/" + std::to_string(total);
  return o;
}

}  // namespace

int Run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.sim.Validate();
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec) throw StoreError("run: cannot create " + config.out.string());

    Outcome o;
    if (config.command == "simulate") {
      o = Simulate(config);
    } else if (config.command == "validate") {
      o = Validate(config);
    } else if (config.command == "ladder") {
      o = Ladder(config);
    } else if (config.command == "diagnose") {
      o = Diagnose(config);
    } else if (config.command == "independence") {
      o = Independence(config);
    } else {
      throw ConfigError("run: unknown subcommand '" + config.command + "'");
    }
    Json report;
    report["command"] = config.command;
    report["config"] = ConfigToJson(config.sim);
    for (auto& [key, value] : o.report.items()) report[key] = value;
    report["summary"] = o.summary;
    WriteTextFile(config.out / "report.json", report.dump(2) + "\n");
    out << "summary: " << o.summary << "\n";
    return o.failed ? 1 : 0;
  } catch (const ConfigError& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    err << "error: ShapeError: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: DomainError: " << e.what() << "\n";
    return 3;
  } catch (const SimulationError& e) {
    err << "error: SimulationError: " << e.what() << "\n";
    return 3;
  } catch (const StoreError& e) {
    err << "error: StoreError: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: InternalError: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace kinmv
