#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinmv/diagnostics.hpp"
#include "kinmv/hypotheses.hpp"

namespace kinmv {

// JSON views of the reports. Field names are listed in
// docs/report_schema.md. Non-finite numbers serialize as null.
nlohmann::ordered_json ToJson(const SamplerSpec& spec);
nlohmann::ordered_json ToJson(const SamplePoint& point);
nlohmann::ordered_json ToJson(const HypothesisReport& report);
nlohmann::ordered_json ToJson(const ScanResult& scan);
nlohmann::ordered_json ToJson(const MomentReport& report);
nlohmann::ordered_json ToJson(const LadderReport& report);
nlohmann::ordered_json ToJson(const DegeneracyReport& report);
nlohmann::ordered_json ToJson(const IndependenceReport& report);

// Comma-separated table with a header row. Numbers use shortest
// round-trip formatting.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& Row();
  CsvTable& Add(const std::string& cell);
  CsvTable& Add(double value);
  CsvTable& Add(std::size_t value);

  std::string str() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string FormatDouble(double value);

}  // namespace kinmv
