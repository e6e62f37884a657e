#include "kinmv/report.hpp"

#include <charconv>
#include <cmath>

#include "kinmv/persistence.hpp"

namespace kinmv {
namespace {

using Json = nlohmann::ordered_json;

Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json ToJson(const SamplerSpec& spec) {
  return Json{{"num_points", spec.num_points},
              {"box_radius", spec.box_radius},
              {"seed", spec.seed},
              {"time_horizon", spec.horizon()},
              {"tolerance", spec.tolerance},
              {"separations", spec.separations}};
}

Json ToJson(const SamplePoint& point) {
  return Json{{"t", point.t}, {"z", point.z}, {"zeta", point.zeta}};
}

Json ToJson(const HypothesisReport& report) {
  Json conditions = Json::array();
  for (const auto& c : report.conditions) {
    Json entry{{"id", c.id},
               {"status", std::string(ToString(c.status))},
               {"margin", Number(c.margin)},
               {"worst", ToJson(c.worst)}};
    if (!c.variation.empty()) {
      Json rows = Json::array();
      for (const auto& [r, v] : c.variation) {
        rows.push_back({{"separation", r}, {"variation", Number(v)}});
      }
      entry["variation"] = std::move(rows);
    }
    conditions.push_back(std::move(entry));
  }
  return Json{{"system", report.system},
              {"n", report.level},
              {"sampler", ToJson(report.sampler)},
              {"all_pass", report.all_pass()},
              {"conditions", std::move(conditions)}};
}

Json ToJson(const ScanResult& scan) {
  return Json{{"margin", Number(scan.margin)}, {"worst", ToJson(scan.worst)}};
}

Json ToJson(const MomentReport& report) {
  Json table = Json::array();
  for (const auto& row : report.table) {
    table.push_back({{"h", row.h}, {"moment", Number(row.moment)}, {"pairs", row.pairs}});
  }
  return Json{{"block", ToString(report.block)},
              {"sup4", Number(report.sup4)},
              {"particles", report.particles},
              {"snapshots", report.snapshots},
              {"increments", std::move(table)},
              {"slope", Number(report.slope)},
              {"intercept", Number(report.intercept)}};
}

Json ToJson(const LadderReport& report) {
  Json out{{"axis", ToString(report.axis)},
           {"levels", report.levels},
           {"reference", report.reference ? Json(*report.reference) : Json(nullptr)}};
  Json distances = Json::array();
  for (double v : report.distances) distances.push_back(Number(v));
  out["distances"] = std::move(distances);
  out["nonincreasing_within_slack"] = report.nonincreasing;
  out["halved"] = report.halved;
  out["strictly_decreasing"] = report.strictly_decreasing;
  out["verdict"] = report.cauchy_consistent() ? "cauchy-consistent" : "inconclusive";
  return out;
}

Json ToJson(const DegeneracyReport& report) {
  return Json{{"full_replay", report.full_replay},
              {"steps_replayed", report.steps_replayed},
              {"x_mismatches", report.x_mismatches},
              {"y_mismatches", report.y_mismatches},
              {"bound", report.bound},
              {"envelope_margin", Number(report.envelope_margin)},
              {"pass", report.pass()}};
}

Json ToJson(const IndependenceReport& report) {
  return Json{{"times", report.times},
              {"f", report.f_id},
              {"g", report.g_id},
              {"n", report.level},
              {"samples", report.samples},
              {"mean_fg", Number(report.mean_fg)},
              {"mean_f", Number(report.mean_f)},
              {"mean_g", Number(report.mean_g)},
              {"covariance", Number(report.covariance)},
              {"standard_error", Number(report.standard_error)},
              {"statistic", Number(report.statistic)},
              {"pass", report.pass}};
}

std::string FormatDouble(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::Row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::Add(const std::string& cell) {
  rows_.back().push_back(cell);
  return *this;
}

CsvTable& CsvTable::Add(double value) { return Add(FormatDouble(value)); }

CsvTable& CsvTable::Add(std::size_t value) { return Add(std::to_string(value)); }

std::string CsvTable::str() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    return out + "\n";
  };
  std::string out = line(header_);
  for (const auto& row : rows_) out += line(row);
  return out;
}

void CsvTable::Write(const std::filesystem::path& path) const {
  WriteTextFile(path, str());
}

}  // namespace kinmv
