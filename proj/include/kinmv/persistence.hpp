#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "kinmv/integrator.hpp"

namespace kinmv {

inline constexpr int kStoreFormatVersion = 1;

// Layout of a run directory:
//
//   manifest        JSON: format_version, created, config echo, N, d, and
//                   per block the file name and SHA-256 of its bytes
//   snap_<k>.bin    snapshot k, N x 2d little-endian float64, row-major
//   ref_<k>.bin     reference ensemble at snapshot k (reference mode only)
//   incr_<k>.bin    Wiener increments of step k, N x d (when retained)
//
// Returns the manifest written. Throws StoreError naming the path; files
// written before the failure are removed.
nlohmann::ordered_json SaveStore(const TrajectoryStore& store,
                                 const std::filesystem::path& dir);

// Inverse of SaveStore. Throws StoreError on a missing manifest, a format
// version other than kStoreFormatVersion, a truncated block or a hash
// mismatch; the message names the block.
TrajectoryStore LoadStore(const std::filesystem::path& dir);

nlohmann::ordered_json ConfigToJson(const SimulationConfig& config);
SimulationConfig ConfigFromJson(const nlohmann::ordered_json& json);

std::string Sha256Hex(std::span<const unsigned char> bytes);
std::string Sha256Hex(const std::string& text);

// Writes `text` to `path` atomically (temporary file + rename).
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace kinmv
