#include "kinmv/persistence.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "kinmv/errors.hpp"

namespace kinmv {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::vector<unsigned char> ToBytes(std::span<const double> values) {
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
  }
  return bytes;
}

std::vector<double> FromBytes(std::span<const unsigned char> bytes) {
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void WriteBytes(const fs::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw StoreError("store: cannot write " + path.string());
}

std::vector<unsigned char> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("store: cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Tracks the files of one save so a failure can remove them.
class SaveTransaction {
 public:
  explicit SaveTransaction(fs::path dir) : dir_(std::move(dir)) {}
  ~SaveTransaction() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  std::string WriteBlock(const std::string& name, std::span<const double> values) {
    const auto bytes = ToBytes(values);
    const fs::path path = dir_ / name;
    written_.push_back(path);
    WriteBytes(path, bytes);
    return Sha256Hex(bytes);
  }

  void WriteManifest(const std::string& text) {
    written_.push_back(dir_ / "manifest");
    WriteTextFile(dir_ / "manifest", text);
  }

  void Commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::vector<double> LoadBlock(const fs::path& dir, const Json& entry,
                              const char* file_key, const char* hash_key,
                              std::size_t expected_values) {
  const std::string name = entry.at(file_key).get<std::string>();
  const auto bytes = ReadBytes(dir / name);
  if (bytes.size() != expected_values * 8) {
    throw StoreError("store: truncated block " + name + " (" +
                     std::to_string(bytes.size()) + " bytes, expected " +
                     std::to_string(expected_values * 8) + ")");
  }
  if (Sha256Hex(bytes) != entry.at(hash_key).get<std::string>()) {
    throw StoreError("store: hash mismatch in block " + name);
  }
  return FromBytes(bytes);
}

}  // namespace

std::string Sha256Hex(std::span<const unsigned char> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw StoreError("store: SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string Sha256Hex(const std::string& text) {
  return Sha256Hex(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw StoreError("store: cannot write " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("store: cannot write " + path.string());
  }
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("store: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ConfigToJson(const SimulationConfig& c) {
  const QuadratureSpec q = c.ResolvedQuadrature();
  return Json{
      {"system", c.system},
      {"n", c.level},
      {"d", c.d},
      {"N", c.particles},
      {"T", c.horizon},
      {"steps", c.steps},
      {"seed", c.seed},
      {"init", {{"kind", ToString(c.initial.kind)},
                {"center", c.initial.Center(c.d)},
                {"scale", c.initial.scale}}},
      {"subsample", c.subsample},
      {"snapshot_stride", c.snapshot_stride},
      {"retain_increments", c.retain_increments},
      {"reference_ensemble", c.reference_ensemble},
      {"system_params", {{"c_sat", c.params.c_sat},
                         {"kappa", c.params.kappa},
                         {"sigma_scale", c.params.sigma_scale},
                         {"switch_time", c.params.switch_time}}},
      {"mollify", {{"quadrature", ToString(q.mode)},
                   {"points_per_axis", q.points_per_axis},
                   {"total_nodes", q.total_nodes},
                   {"seed", q.seed}}},
  };
}

SimulationConfig ConfigFromJson(const Json& j) {
  SimulationConfig c;
  try {
    c.system = j.at("system").get<std::string>();
    c.level = j.at("n").get<int>();
    c.d = j.at("d").get<std::size_t>();
    c.particles = j.at("N").get<std::size_t>();
    c.horizon = j.at("T").get<double>();
    c.steps = j.at("steps").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& init = j.at("init");
    c.initial.kind = ParseInitialKind(init.at("kind").get<std::string>());
    c.initial.center = init.at("center").get<std::vector<double>>();
    c.initial.scale = init.at("scale").get<double>();
    c.subsample = j.at("subsample").get<std::size_t>();
    c.snapshot_stride = j.at("snapshot_stride").get<std::size_t>();
    c.retain_increments = j.at("retain_increments").get<bool>();
    c.reference_ensemble = j.at("reference_ensemble").get<bool>();
    const auto& p = j.at("system_params");
    c.params.c_sat = p.at("c_sat").get<double>();
    c.params.kappa = p.at("kappa").get<double>();
    c.params.sigma_scale = p.at("sigma_scale").get<double>();
    c.params.switch_time = p.at("switch_time").get<double>();
    const auto& m = j.at("mollify");
    QuadratureSpec q;
    q.mode = ParseQuadratureMode(m.at("quadrature").get<std::string>());
    q.points_per_axis = m.at("points_per_axis").get<int>();
    q.total_nodes = m.at("total_nodes").get<int>();
    q.seed = m.at("seed").get<std::uint64_t>();
    c.quadrature = q;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("store: bad config echo: ") + e.what());
  }
  return c;
}

Json SaveStore(const TrajectoryStore& store, const fs::path& dir) {
  const std::size_t n = store.particles();
  const std::size_t d = store.d();
  for (std::size_t k = 0; k < store.snapshots.size(); ++k) {
    const auto& s = store.snapshots[k];
    if (s.states.empty() || n == 0) {
      throw StoreError("store: snapshot " + std::to_string(k) +
                       " has no particles (N = 0)");
    }
    if (s.states.size() != n * 2 * d ||
        (!s.reference.empty() && s.reference.size() != n * 2 * d)) {
      throw StoreError("store: snapshot " + std::to_string(k) +
                       " does not match N x 2d");
    }
    if (k > 0 && !(s.time > store.snapshots[k - 1].time)) {
      throw StoreError("store: snapshot times must be strictly increasing");
    }
  }
  for (const auto& block : store.increments) {
    if (block.size() != n * d) throw StoreError("store: increment block is not N x d");
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw StoreError("store: cannot create directory " + dir.string());
  }

  SaveTransaction tx(dir);
  Json manifest;
  manifest["format_version"] = kStoreFormatVersion;
  manifest["created"] = store.created;
  manifest["config"] = ConfigToJson(store.config);
  manifest["N"] = n;
  manifest["d"] = d;
  Json snaps = Json::array();
  for (std::size_t k = 0; k < store.snapshots.size(); ++k) {
    const auto& s = store.snapshots[k];
    Json entry{{"step", s.step}, {"time", s.time}};
    const std::string name = "snap_" + std::to_string(k) + ".bin";
    entry["file"] = name;
    entry["sha256"] = tx.WriteBlock(name, s.states);
    if (!s.reference.empty()) {
      const std::string ref = "ref_" + std::to_string(k) + ".bin";
      entry["reference_file"] = ref;
      entry["reference_sha256"] = tx.WriteBlock(ref, s.reference);
    }
    snaps.push_back(std::move(entry));
  }
  manifest["snapshots"] = std::move(snaps);
  Json incr = Json::array();
  for (std::size_t k = 0; k < store.increments.size(); ++k) {
    const std::string name = "incr_" + std::to_string(k + 1) + ".bin";
    incr.push_back({{"step", k + 1},
                    {"file", name},
                    {"sha256", tx.WriteBlock(name, store.increments[k])}});
  }
  manifest["increments"] = std::move(incr);
  tx.WriteManifest(manifest.dump(2) + "\n");
  tx.Commit();
  return manifest;
}

TrajectoryStore LoadStore(const fs::path& dir) {
  const fs::path path = dir / "manifest";
  if (!fs::exists(path)) throw StoreError("store: no manifest in " + dir.string());
  Json manifest;
  try {
    manifest = Json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw StoreError("store: unreadable manifest " + path.string() + ": " + e.what());
  }
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kStoreFormatVersion) {
      throw StoreError("store: unsupported format version " +
                       std::to_string(version) + " in " + path.string() +
                       " (this build reads version " +
                       std::to_string(kStoreFormatVersion) + ")");
    }
    TrajectoryStore store;
    store.config = ConfigFromJson(manifest.at("config"));
    store.created = manifest.at("created").get<std::string>();
    const auto n = manifest.at("N").get<std::size_t>();
    const auto d = manifest.at("d").get<std::size_t>();
    if (n != store.config.particles || d != store.config.d) {
      throw StoreError("store: manifest N/d disagree with the config echo");
    }
    for (const auto& entry : manifest.at("snapshots")) {
      Snapshot s;
      s.step = entry.at("step").get<std::size_t>();
      s.time = entry.at("time").get<double>();
      s.states = LoadBlock(dir, entry, "file", "sha256", n * 2 * d);
      if (entry.contains("reference_file")) {
        s.reference = LoadBlock(dir, entry, "reference_file", "reference_sha256",
                                n * 2 * d);
      }
      store.snapshots.push_back(std::move(s));
    }
    for (const auto& entry : manifest.at("increments")) {
      store.increments.push_back(LoadBlock(dir, entry, "file", "sha256", n * d));
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw StoreError("store: malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace kinmv
