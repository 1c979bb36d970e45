#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nsaudit/errors.hpp"
#include "nsaudit/harness.hpp"

namespace nsaudit::harness {

namespace {

const std::set<std::string> integer_keys = {
    "grid.n",     "time.snapshot_every", "init.seed",         "audit.lemma18_pairs",
    "scatter.nk", "scatter.lebedev",     "scatter.born_order", "reconstruct.targets_n"};

const std::set<std::string> real_keys = {
    "grid.length",       "fluid.nu",           "time.dt",           "time.t_end",
    "init.amplitude",    "init.spectrum_slope", "forcing.amplitude", "audit.constant_C",
    "audit.moment_factor", "audit.balance_tol", "audit.duhamel_tol", "scatter.kmax",
    "potential.amplitude", "potential.width",  "reconstruct.spacing", "reconstruct.centre"};

const std::set<std::string> text_keys = {"init.kind",      "init.snapshot", "forcing.kind",
                                         "potential.kind", "reconstruct.energies",
                                         "paths.out",      "paths.potential", "paths.table"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& v, double& out) {
  std::istringstream is(v);
  is >> out;
  return is && is.eof() && std::isfinite(out);
}

bool parse_integer(const std::string& v, long& out) {
  std::size_t used = 0;
  try {
    out = std::stol(v, &used);
  } catch (...) {
    return false;
  }
  return used == v.size();
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k(integer_keys.begin(), integer_keys.end());
    k.insert(k.end(), real_keys.begin(), real_keys.end());
    k.insert(k.end(), text_keys.begin(), text_keys.end());
    std::sort(k.begin(), k.end());
    return k;
  }();
  return keys;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    if (value.empty()) fail("empty value for '" + key + "'");

    if (integer_keys.count(key)) {
      long v = 0;
      if (!parse_integer(value, v)) fail("'" + key + "' needs an integer, got '" + value + "'");
      if (key == "grid.n" && (v < 8 || v % 2 != 0))
        fail("grid.n must be even and >= 8, got " + value);
    } else if (real_keys.count(key)) {
      double v = 0.0;
      if (!parse_real(value, v)) fail("'" + key + "' needs a finite number, got '" + value + "'");
    } else if (!text_keys.count(key)) {
      fail("unknown key '" + key + "'");
    }
    auto it = std::find_if(c.entries.begin(), c.entries.end(),
                           [&](const auto& e) { return e.first == key; });
    if (it != c.entries.end()) fail("duplicate key '" + key + "'");
    c.entries.emplace_back(key, value);
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.string());
}

std::string format_config(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.entries) out += k + " = " + v + "\n";
  return out;
}

bool RunConfig::has(const std::string& key) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& RunConfig::text(const std::string& key) const {
  for (const auto& e : entries)
    if (e.first == key) return e.second;
  throw ConfigError("missing config key '" + key + "'");
}

std::string RunConfig::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double RunConfig::number(const std::string& key) const {
  double v = 0.0;
  if (!parse_real(text(key), v)) throw ConfigError("'" + key + "' is not a number");
  return v;
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long RunConfig::integer(const std::string& key) const {
  long v = 0;
  if (!parse_integer(text(key), v)) throw ConfigError("'" + key + "' is not an integer");
  return v;
}

long RunConfig::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

void require_keys(const RunConfig& c, Command cmd) {
  std::vector<std::string> need;
  switch (cmd) {
    case Command::simulate:
      need = {"grid.n",    "grid.length", "fluid.nu",       "time.dt",
              "time.t_end", "init.kind",  "init.amplitude"};
      break;
    case Command::scatter:
      need = {"scatter.nk", "scatter.kmax", "scatter.lebedev", "scatter.born_order"};
      break;
    case Command::reconstruct:
      need = {"reconstruct.energies"};
      break;
    default:
      break;
  }
  for (const auto& k : need)
    if (!c.has(k)) throw ConfigError("missing required key '" + k + "'");
}

Grid3 grid_of(const RunConfig& c) {
  try {
    return Grid3(static_cast<int>(c.integer("grid.n")), c.number("grid.length"));
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

flow::FluidParams fluid_of(const RunConfig& c) {
  flow::FluidParams p;
  p.nu = c.number("fluid.nu");
  p.dt = c.number("time.dt");
  p.t_end = c.number("time.t_end");
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("fluid/time: ") + e.what());
  }
  return p;
}

flow::InitOptions init_of(const RunConfig& c) {
  flow::InitOptions o;
  o.name = c.text("init.kind");
  o.amplitude = c.number("init.amplitude");
  o.seed = static_cast<unsigned long long>(c.integer_or("init.seed", 0));
  o.spectrum_slope = c.number_or("init.spectrum_slope", 2.0);
  if (o.name == "from-snapshot") {
    const auto snap = load_snapshot(c.text("init.snapshot"));
    if (snap.comps.size() != 3) throw ConfigError("init.snapshot must hold 3 components");
    const Grid3 g = snap.grid();
    spectral::VectorField v(g);
    for (int i = 0; i < 3; ++i) v.comp[i] = snap.comps[i];
    o.snapshot = std::move(v);
  } else if (o.name != "taylor-green" && o.name != "random-solenoidal") {
    throw ConfigError("unknown init.kind '" + o.name + "'");
  }
  return o;
}

flow::ForcingSpec forcing_of(const RunConfig& c) {
  const std::string kind = c.text_or("forcing.kind", "none");
  if (kind == "none") return flow::ForcingSpec::none();
  if (!c.has("forcing.amplitude")) throw ConfigError("forcing.kind needs forcing.amplitude");
  try {
    return flow::ForcingSpec::analytic(kind, c.number("forcing.amplitude"));
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("forcing: ") + e.what());
  }
}

audit::AuditOptions audit_options_of(const RunConfig& c, const Grid3& g) {
  audit::AuditOptions o;
  o.C = c.number_or("audit.constant_C", 1.0);
  o.moment_factor = c.number_or("audit.moment_factor", o.moment_factor);
  o.balance_tol = c.number_or("audit.balance_tol", o.balance_tol);
  o.duhamel_tol = c.number_or("audit.duhamel_tol", o.duhamel_tol);
  o.pairs = audit::default_pairs(g);
  const long np = c.integer_or("audit.lemma18_pairs", 0);
  if (np < 0) throw ConfigError("audit.lemma18_pairs must be >= 0");
  if (np > 0 && static_cast<std::size_t>(np) < o.pairs.size()) o.pairs.resize(np);
  return o;
}

audit::ScatterSettings scatter_settings_of(const RunConfig& c) {
  audit::ScatterSettings s;
  s.nk = static_cast<int>(c.integer_or("scatter.nk", s.nk));
  s.kmax = c.number_or("scatter.kmax", s.kmax);
  s.lebedev = static_cast<int>(c.integer_or("scatter.lebedev", s.lebedev));
  s.born_order = static_cast<int>(c.integer_or("scatter.born_order", s.born_order));
  return s;
}

}  // namespace nsaudit::harness
