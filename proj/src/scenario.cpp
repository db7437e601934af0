#include "hcflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hcf {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  std::ostringstream os;
  os << name << ":" << line << ": " << msg;
  throw ScenarioError(os.str());
}

double parse_double(const std::string& name, const RawEntry& e, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    fail(name, e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
  }
  if (pos != e.value.size())
    fail(name, e.line, "key '" + key + "' expects a number, got '" + e.value + "'");
  return v;
}

int parse_int(const std::string& name, const RawEntry& e, const std::string& key) {
  const double v = parse_double(name, e, key);
  if (v != std::floor(v))
    fail(name, e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
  return static_cast<int>(v);
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"domain", {"kind", "n", "extent", "nodes"}},
    {"curvature", {"family", "l"}},
    {"flow",
     {"sigma", "sigma_init", "epsilon", "cfl_safety", "t_max", "steady_tol", "diag_stride"}},
    {"continuation", {"levels"}},
    {"output", {"directory", "prefix"}},
};

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& name) {
  std::map<std::string, Section> doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(name, lineno, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!kKnownKeys.count(section)) fail(name, lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected key = value, got '" + line + "'");
    if (section.empty()) fail(name, lineno, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.at(section).count(key))
      fail(name, lineno, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) fail(name, lineno, "key '" + key + "' has no value");
    doc[section][key] = {value, lineno};
  }

  ScenarioConfig cfg;
  FlowConfig& f = cfg.flow;
  f.domain.kind = DomainKind::RadialBall;
  f.domain.n = 2;
  f.domain.extent = 1.0;
  f.domain.node_count = 400;
  f.fspec.family = CurvatureFamily::GaussRoot;
  f.fspec.l = 0;

  bool has_sigma_init = false, has_epsilon = false, has_n = false;

  if (doc.count("domain")) {
    const Section& s = doc["domain"];
    if (s.count("kind")) {
      const RawEntry& e = s.at("kind");
      if (e.value == "ball")
        f.domain.kind = DomainKind::RadialBall;
      else if (e.value == "interval")
        f.domain.kind = DomainKind::Interval1D;
      else
        fail(name, e.line, "kind must be 'ball' or 'interval', got '" + e.value + "'");
    }
    if (s.count("n")) {
      f.domain.n = parse_int(name, s.at("n"), "n");
      has_n = true;
    }
    if (s.count("extent")) f.domain.extent = parse_double(name, s.at("extent"), "extent");
    if (s.count("nodes")) f.domain.node_count = parse_int(name, s.at("nodes"), "nodes");
  }
  if (f.domain.kind == DomainKind::Interval1D && !has_n) f.domain.n = 1;
  f.fspec.n = f.domain.n;

  if (doc.count("curvature")) {
    const Section& s = doc["curvature"];
    if (s.count("family")) {
      const RawEntry& e = s.at("family");
      if (e.value == "mean")
        f.fspec.family = CurvatureFamily::MeanH1;
      else if (e.value == "gaussroot")
        f.fspec.family = CurvatureFamily::GaussRoot;
      else if (e.value == "quotient")
        f.fspec.family = CurvatureFamily::HessianQuotient;
      else
        fail(name, e.line, "family must be 'mean', 'gaussroot' or 'quotient', got '" + e.value +
                               "'");
    }
    if (s.count("l")) f.fspec.l = parse_int(name, s.at("l"), "l");
  }

  if (doc.count("flow")) {
    const Section& s = doc["flow"];
    if (s.count("sigma")) f.sigma = parse_double(name, s.at("sigma"), "sigma");
    if (s.count("sigma_init")) {
      f.sigma_init = parse_double(name, s.at("sigma_init"), "sigma_init");
      has_sigma_init = true;
    }
    if (s.count("epsilon")) {
      f.epsilon = parse_double(name, s.at("epsilon"), "epsilon");
      has_epsilon = true;
    }
    if (s.count("cfl_safety")) f.cfl_safety = parse_double(name, s.at("cfl_safety"), "cfl_safety");
    if (s.count("t_max")) f.t_max = parse_double(name, s.at("t_max"), "t_max");
    if (s.count("steady_tol")) f.steady_tol = parse_double(name, s.at("steady_tol"), "steady_tol");
    if (s.count("diag_stride")) f.diag_stride = parse_int(name, s.at("diag_stride"), "diag_stride");
  }
  if (!has_sigma_init) f.sigma_init = 0.5 * (f.sigma + 1.0);
  if (!has_epsilon) f.epsilon = 1e-3 * f.domain.extent;

  if (doc.count("continuation")) {
    const Section& s = doc["continuation"];
    if (s.count("levels")) cfg.levels = parse_int(name, s.at("levels"), "levels");
  }
  if (doc.count("output")) {
    const Section& s = doc["output"];
    if (s.count("directory")) cfg.output.directory = s.at("directory").value;
    if (s.count("prefix")) cfg.output.prefix = s.at("prefix").value;
  }

  if (cfg.levels < 1) throw ScenarioError(name + ": continuation levels must be >= 1");
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(name + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::string render_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  const FlowConfig& f = cfg.flow;
  os << "[domain]\n";
  os << "kind = " << (f.domain.kind == DomainKind::RadialBall ? "ball" : "interval") << "\n";
  os << "n = " << f.domain.n << "\n";
  os << "extent = " << f.domain.extent << "\n";
  os << "nodes = " << f.domain.node_count << "\n\n";
  os << "[curvature]\n";
  os << "family = " << f.fspec.name() << "\n";
  os << "l = " << f.fspec.l << "\n\n";
  os << "[flow]\n";
  os << "sigma = " << f.sigma << "\n";
  os << "sigma_init = " << f.sigma_init << "\n";
  os << "epsilon = " << f.epsilon << "\n";
  os << "cfl_safety = " << f.cfl_safety << "\n";
  os << "t_max = " << f.t_max << "\n";
  os << "steady_tol = " << f.steady_tol << "\n";
  os << "diag_stride = " << f.diag_stride << "\n\n";
  os << "[continuation]\n";
  os << "levels = " << cfg.levels << "\n\n";
  os << "[output]\n";
  os << "directory = " << cfg.output.directory << "\n";
  os << "prefix = " << cfg.output.prefix << "\n";
  return os.str();
}

}  // namespace hcf
