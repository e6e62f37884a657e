#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "kinmv/cli.hpp"
#include "kinmv/errors.hpp"

namespace kinmv {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string Unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Type errors carry only the expectation; the caller adds key and line.
struct TypeMismatch {
  std::string expected;
};

template <class T>
T ParseNumber(const std::string& text, const char* expected) {
  T value{};
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw TypeMismatch{expected};
  }
  return value;
}

std::size_t Count(const std::string& v) { return ParseNumber<std::size_t>(v, "a non-negative integer"); }
double Real(const std::string& v) { return ParseNumber<double>(v, "a number"); }
int Int(const std::string& v) { return ParseNumber<int>(v, "an integer"); }
std::uint64_t Seed(const std::string& v) { return ParseNumber<std::uint64_t>(v, "a 64-bit unsigned integer"); }

bool Bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw TypeMismatch{"a boolean"};
}

std::vector<std::string> Items(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Unquote(Trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class F>
auto List(const std::string& v, F parse) {
  std::vector<decltype(parse(std::string()))> out;
  for (const auto& item : Items(v)) out.push_back(parse(item));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = {
      {"command", [](RunConfig& c, const std::string& v) { c.command = v; }},
      {"system", [](RunConfig& c, const std::string& v) { c.sim.system = v; }},
      {"n", [](RunConfig& c, const std::string& v) { c.sim.level = Int(v); }},
      {"d", [](RunConfig& c, const std::string& v) { c.sim.d = Count(v); }},
      {"N", [](RunConfig& c, const std::string& v) { c.sim.particles = Count(v); }},
      {"T", [](RunConfig& c, const std::string& v) { c.sim.horizon = Real(v); }},
      {"steps", [](RunConfig& c, const std::string& v) { c.sim.steps = Count(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.sim.seed = Seed(v); }},
      {"subsample", [](RunConfig& c, const std::string& v) {
         c.sim.subsample = v == "full" ? 0 : Count(v);
       }},
      {"snapshot_stride", [](RunConfig& c, const std::string& v) { c.sim.snapshot_stride = Count(v); }},
      {"retain_increments", [](RunConfig& c, const std::string& v) { c.sim.retain_increments = Bool(v); }},
      {"reference_ensemble", [](RunConfig& c, const std::string& v) { c.sim.reference_ensemble = Bool(v); }},

      {"init.kind", [](RunConfig& c, const std::string& v) { c.sim.initial.kind = ParseInitialKind(v); }},
      {"init.center", [](RunConfig& c, const std::string& v) { c.sim.initial.center = List(v, Real); }},
      {"init.scale", [](RunConfig& c, const std::string& v) { c.sim.initial.scale = Real(v); }},

      {"system.c_sat", [](RunConfig& c, const std::string& v) { c.sim.params.c_sat = Real(v); }},
      {"system.kappa", [](RunConfig& c, const std::string& v) { c.sim.params.kappa = Real(v); }},
      {"system.sigma_scale", [](RunConfig& c, const std::string& v) { c.sim.params.sigma_scale = Real(v); }},
      {"system.switch_time", [](RunConfig& c, const std::string& v) { c.sim.params.switch_time = Real(v); }},

      {"mollify.quadrature", [](RunConfig& c, const std::string& v) {
         auto q = c.sim.ResolvedQuadrature();
         q.mode = ParseQuadratureMode(v);
         c.sim.quadrature = q;
       }},
      {"mollify.points_per_axis", [](RunConfig& c, const std::string& v) {
         auto q = c.sim.ResolvedQuadrature();
         q.points_per_axis = Int(v);
         c.sim.quadrature = q;
       }},
      {"mollify.total_nodes", [](RunConfig& c, const std::string& v) {
         auto q = c.sim.ResolvedQuadrature();
         q.total_nodes = Int(v);
         c.sim.quadrature = q;
       }},
      {"mollify.seed", [](RunConfig& c, const std::string& v) {
         auto q = c.sim.ResolvedQuadrature();
         q.seed = Seed(v);
         c.sim.quadrature = q;
       }},

      {"validate.num_points", [](RunConfig& c, const std::string& v) { c.validate.num_points = Count(v); }},
      {"validate.box_radius", [](RunConfig& c, const std::string& v) { c.validate.box_radius = Real(v); }},
      {"validate.seed", [](RunConfig& c, const std::string& v) { c.validate.seed = Seed(v); }},
      {"validate.time_horizon", [](RunConfig& c, const std::string& v) { c.validate.time_horizon = Real(v); }},
      {"validate.tolerance", [](RunConfig& c, const std::string& v) { c.validate.tolerance = Real(v); }},
      {"validate.separations", [](RunConfig& c, const std::string& v) { c.validate.separations = List(v, Real); }},

      {"diagnostics.lags", [](RunConfig& c, const std::string& v) { c.lags = List(v, Real); }},
      {"diagnostics.block", [](RunConfig& c, const std::string& v) { c.block = ParseStateBlock(v); }},

      {"ladder.axis", [](RunConfig& c, const std::string& v) { c.ladder.axis = ParseLadderAxis(v); }},
      {"ladder.levels", [](RunConfig& c, const std::string& v) { c.ladder.levels = List(v, Count); }},
      {"ladder.reference", [](RunConfig& c, const std::string& v) {
         if (v == "none") {
           c.ladder.reference.reset();
         } else {
           c.ladder.reference = Count(v);
         }
       }},
      {"ladder.projections", [](RunConfig& c, const std::string& v) { c.ladder.projections = Count(v); }},
      {"ladder.projection_seed", [](RunConfig& c, const std::string& v) { c.ladder.projection_seed = Seed(v); }},
      {"ladder.slack", [](RunConfig& c, const std::string& v) { c.ladder.slack = Real(v); }},

      {"independence.times", [](RunConfig& c, const std::string& v) { c.times = List(v, Real); }},
      {"independence.f", [](RunConfig& c, const std::string& v) {
         c.f_ids = v == "all" ? std::vector<std::string>{} : Items(v);
       }},
      {"independence.g", [](RunConfig& c, const std::string& v) {
         c.g_ids = v == "all" ? std::vector<std::string>{} : Items(v);
       }},

      {"output.dir", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"output.csv", [](RunConfig& c, const std::string& v) { c.csv = Bool(v); }},
  };
  return table;
}

std::string Where(const ConfigEntry& e) {
  return e.line ? e.source + ":" + std::to_string(e.line) : e.source;
}

std::string FullKey(const ConfigEntry& e) {
  return e.section.empty() ? e.key : e.section + "." + e.key;
}

}  // namespace

std::vector<ConfigEntry> ParseConfigText(const std::string& text,
                                         const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::stringstream ss(text);
  std::string raw, section;
  std::size_t line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    std::string s = raw;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (!quoted && (s[i] == '#' || s[i] == ';')) {
        s.resize(i);
        break;
      }
    }
    s = Trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("config: malformed section header at " + source + ":" +
                          std::to_string(line));
      }
      section = Trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value at " + source + ":" +
                        std::to_string(line));
    }
    entries.push_back({section, Trim(s.substr(0, eq)), Unquote(Trim(s.substr(eq + 1))),
                       source, line});
  }
  return entries;
}

ConfigEntry ParseOverride(const std::string& text, const std::string& source) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("config: override '" + text + "' must be key=value");
  }
  ConfigEntry e;
  std::string key = Trim(text.substr(0, eq));
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    e.section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }
  e.key = key;
  e.value = Unquote(Trim(text.substr(eq + 1)));
  e.source = source;
  return e;
}

std::vector<std::string> KnownConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : Setters()) keys.push_back(key);
  return keys;
}

RunConfig ResolveConfig(const std::vector<ConfigEntry>& entries) {
  RunConfig config;
  bool have_system = false;
  // Quadrature defaults depend on d, so apply d before the rest.
  std::vector<const ConfigEntry*> ordered;
  for (const auto& e : entries) {
    if (FullKey(e) == "d") ordered.push_back(&e);
  }
  for (const auto& e : entries) {
    if (FullKey(e) != "d") ordered.push_back(&e);
  }
  for (const ConfigEntry* e : ordered) {
    const std::string key = FullKey(*e);
    const auto it = Setters().find(key);
    if (it == Setters().end()) {
      throw ConfigError("config: unknown key '" + key + "' at " + Where(*e));
    }
    try {
      it->second(config, e->value);
    } catch (const TypeMismatch& m) {
      throw ConfigError("config: key '" + key + "' at " + Where(*e) + " expects " +
                        m.expected + ", got '" + e->value + "'");
    } catch (const ConfigError& err) {
      throw ConfigError("config: key '" + key + "' at " + Where(*e) + ": " + err.what());
    }
    if (key == "system") have_system = true;
  }
  if (!have_system) throw ConfigError("config: missing required key 'system'");
  return config;
}

}  // namespace kinmv
