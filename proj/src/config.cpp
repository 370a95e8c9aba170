#include "ghostsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool scenario_equal(const Scenario& a, const Scenario& b) {
  const bool lens_eq = a.lens.has_value() == b.lens.has_value() &&
                       (!a.lens || a.lens->focal_length == b.lens->focal_length);
  return a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2 && a.L1 == b.L1 && a.L2 == b.L2 &&
         a.slit_separation == b.slit_separation && a.slit_width == b.slit_width &&
         a.source.ell_sigma == b.source.ell_sigma && a.source.omega == b.source.omega && lens_eq;
}

// Collects issues while walking the YAML tree.
class Reader {
 public:
  std::vector<std::string> issues;

  void unknown_keys(const YAML::Node& map, const std::string& path, std::set<std::string> allowed) {
    if (!map.IsMap()) return;
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) issues.push_back(join(path, key) + ": unknown key");
    }
  }

  bool is_map(const YAML::Node& n, const std::string& path) {
    if (n.IsMap()) return true;
    issues.push_back(path + ": expected a mapping");
    return false;
  }

  std::optional<double> length(const YAML::Node& n, const std::string& path, bool allow_auto = false) {
    if (!n.IsScalar()) {
      issues.push_back(path + ": expected a length");
      return std::nullopt;
    }
    const auto text = n.Scalar();
    if (allow_auto && trim(text) == "auto") return std::nullopt;
    try {
      return parse_length(text);
    } catch (const std::invalid_argument& e) {
      issues.push_back(path + ": " + e.what());
      return std::nullopt;
    }
  }

  std::optional<double> number(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
      const auto text = trim(n.Scalar());
      double v = 0.0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc() && p == text.data() + text.size() && std::isfinite(v)) return v;
    }
    issues.push_back(path + ": expected a number");
    return std::nullopt;
  }

  std::optional<std::size_t> count(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
      const auto text = trim(n.Scalar());
      std::size_t v = 0;
      const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc() && p == text.data() + text.size()) return v;
    }
    issues.push_back(path + ": expected a non-negative integer");
    return std::nullopt;
  }

  std::optional<bool> boolean(const YAML::Node& n, const std::string& path) {
    if (n.IsScalar()) {
      const auto text = trim(n.Scalar());
      if (text == "true") return true;
      if (text == "false") return false;
    }
    issues.push_back(path + ": expected true or false");
    return std::nullopt;
  }

  std::optional<std::vector<double>> lengths(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) {
      issues.push_back(path + ": expected a list of lengths");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (auto v = length(n[i], path + "[" + std::to_string(i) + "]"))
        out.push_back(*v);
      else
        ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

// Fields of the scenario block, before derived quantities are resolved.
struct ScenarioFields {
  std::optional<double> lambda1, lambda2, D, L1, L2, d, epsilon, gamma, ell_sigma, omega, f;
  bool lens_block = false;
};

ScenarioFields fields_of(const Scenario& s) {
  ScenarioFields f;
  f.lambda1 = s.lambda1;
  f.lambda2 = s.lambda2;
  f.L1 = s.L1;
  f.L2 = s.L2;
  f.d = s.slit_separation;
  f.epsilon = s.slit_width;
  f.ell_sigma = s.source.ell_sigma;  // Omega is left to be re-derived from d and gamma
  if (s.lens) {
    f.lens_block = true;
    f.f = s.lens->focal_length;
  }
  return f;
}

void read_scenario(Reader& r, const YAML::Node& n, ScenarioFields& f) {
  const std::string p = "scenario";
  if (!r.is_map(n, p)) return;
  r.unknown_keys(n, p, {"lambda1", "lambda2", "D", "L1", "L2", "d", "epsilon", "source", "lens"});
  auto take = [&](const char* key, std::optional<double>& slot) {
    if (n[key]) slot = r.length(n[key], p + "." + key);
  };
  take("lambda1", f.lambda1);
  take("lambda2", f.lambda2);
  take("D", f.D);
  take("L1", f.L1);
  take("L2", f.L2);
  take("d", f.d);
  take("epsilon", f.epsilon);
  if (const auto src = n["source"]) {
    const std::string sp = p + ".source";
    if (r.is_map(src, sp)) {
      r.unknown_keys(src, sp, {"gamma", "ell_sigma", "omega"});
      if (src["gamma"] && src["ell_sigma"]) r.issues.push_back(sp + ": give either gamma or ell_sigma, not both");
      if (src["gamma"]) {
        f.gamma = r.length(src["gamma"], sp + ".gamma");
        f.ell_sigma.reset();
      }
      if (src["ell_sigma"]) {
        f.ell_sigma = r.length(src["ell_sigma"], sp + ".ell_sigma");
        f.gamma.reset();
      }
      if (src["omega"]) f.omega = r.length(src["omega"], sp + ".omega", true);
    }
  }
  if (const auto lens = n["lens"]) {
    const std::string lp = p + ".lens";
    if (lens.IsNull()) {
      f.lens_block = false;
      f.f.reset();
    } else if (r.is_map(lens, lp)) {
      r.unknown_keys(lens, lp, {"f"});
      f.lens_block = true;
      if (lens["f"])
        f.f = r.length(lens["f"], lp + ".f");
      else
        r.issues.push_back(lp + ".f: missing");
    }
  }
}

// Resolves derived fields (legs from D, ell_sigma from gamma, default Omega).
Scenario resolve_scenario(Reader& r, ScenarioFields f) {
  const std::string p = "scenario";
  std::set<std::string> reported;
  for (const auto& i : r.issues) reported.insert(i.substr(0, i.find(':')));

  auto missing = [&](const std::optional<double>& v, const std::string& key) {
    if (!v && !reported.count(p + "." + key)) {
      r.issues.push_back(p + "." + key + ": missing");
      reported.insert(p + "." + key);
    }
  };
  if (f.D) {
    if (f.L1 && f.L2) {
      const double sum = *f.L1 + 2.0 * *f.L2;
      if (!(std::abs(*f.D - sum) <= 1e-9 * std::abs(*f.D)))
        r.issues.push_back(p + ".D: D = " + fmt17(*f.D) + " m disagrees with L1 + 2 L2 = " + fmt17(sum) + " m");
    } else if (f.L1) {
      f.L2 = (*f.D - *f.L1) / 2.0;
    } else if (f.L2) {
      f.L1 = *f.D - 2.0 * *f.L2;
    }
  }
  missing(f.lambda1, "lambda1");
  missing(f.lambda2, "lambda2");
  missing(f.L1, "L1");
  missing(f.L2, "L2");
  missing(f.d, "d");
  missing(f.epsilon, "epsilon");
  if (!f.gamma && !f.ell_sigma && !reported.count(p + ".source.gamma") && !reported.count(p + ".source.ell_sigma") &&
      !reported.count(p + ".source")) {
    r.issues.push_back(p + ".source.gamma: missing (or give source.ell_sigma)");
    reported.insert(p + ".source.gamma");
  }

  Scenario s{};
  const double nan = std::nan("");
  s.lambda1 = f.lambda1.value_or(nan);
  s.lambda2 = f.lambda2.value_or(nan);
  s.L1 = f.L1.value_or(nan);
  s.L2 = f.L2.value_or(nan);
  s.slit_separation = f.d.value_or(nan);
  s.slit_width = f.epsilon.value_or(nan);
  double gamma = nan;
  if (f.gamma) {
    gamma = *f.gamma;
    if (f.epsilon) {
      try {
        s.source.ell_sigma = ell_sigma_from_gamma(gamma, *f.epsilon);
      } catch (const ConfigError& e) {
        for (const auto& i : e.issues()) r.issues.push_back(i);
        reported.insert(p + ".source.gamma");
        reported.insert(p + ".source.ell_sigma");
        s.source.ell_sigma = nan;
      }
    } else {
      s.source.ell_sigma = nan;
    }
  } else if (f.ell_sigma) {
    s.source.ell_sigma = *f.ell_sigma;
    if (f.epsilon) gamma = std::sqrt(*f.epsilon * *f.epsilon + *f.ell_sigma * *f.ell_sigma);
  } else {
    s.source.ell_sigma = nan;
    reported.insert(p + ".source.ell_sigma");
  }
  // Omega defaults to 10 max(d, gamma) unless given explicitly.
  if (f.omega)
    s.source.omega = *f.omega;
  else if (f.d && std::isfinite(gamma))
    s.source.omega = default_omega(*f.d, gamma);
  else
    s.source.omega = nan;
  if (!std::isfinite(s.source.omega)) reported.insert(p + ".source.omega");
  if (f.lens_block) {
    if (f.f) s.lens = Lens{*f.f};
    else reported.insert(p + ".lens.f");
  }

  // Scenario-level checks for fields that were not already reported.
  for (const auto& i : s.issues(p)) {
    const auto path = i.substr(0, i.find(':'));
    if (!reported.count(path)) r.issues.push_back(i);
  }
  return s;
}

std::optional<RunMode> mode_from(const std::string& s) {
  if (s == "analytic") return RunMode::analytic;
  if (s == "oracle") return RunMode::oracle;
  if (s == "compare") return RunMode::compare;
  return std::nullopt;
}

std::optional<OutputFormat> format_from(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "binary") return OutputFormat::binary;
  return std::nullopt;
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::analytic:
      return "analytic";
    case RunMode::oracle:
      return "oracle";
    case RunMode::compare:
      return "compare";
  }
  return "unknown";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "binary"; }

bool operator==(const RunConfig& a, const RunConfig& b) {
  return scenario_equal(a.scenario, b.scenario) && a.mode == b.mode && a.outputs == b.outputs &&
         a.sampling == b.sampling && a.grid == b.grid && a.check == b.check && a.output_dir == b.output_dir &&
         a.format == b.format;
}

double parse_length(const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p == begin) throw std::invalid_argument("cannot parse length '" + raw + "'");
  const std::string unit = trim(std::string(p, end));
  // Divisors are exact in binary, so "1530nm" rounds to the same double as 1.53e-6.
  static const std::map<std::string, double> divisor{{"", 1.0},    {"m", 1.0},    {"cm", 1e2}, {"mm", 1e3},
                                                     {"um", 1e6},  {"µm", 1e6},   {"μm", 1e6}, {"nm", 1e9}};
  const auto it = divisor.find(unit);
  if (it == divisor.end()) throw std::invalid_argument("unknown length unit '" + unit + "' in '" + raw + "'");
  if (!std::isfinite(v)) throw std::invalid_argument("length '" + raw + "' is not finite");
  return v / it->second;
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({"YAML syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg});
  }
  Reader r;
  if (!root.IsMap()) throw ConfigError({"config: expected a mapping at the top level"});
  r.unknown_keys(root, "", {"preset", "scenario", "mode", "outputs", "sampling", "grid", "check", "output_dir", "format"});

  RunConfig c;
  ScenarioFields fields;
  if (const auto pn = root["preset"]) {
    try {
      c = preset(pn.as<std::string>());
      fields = fields_of(c.scenario);
    } catch (const ConfigError& e) {
      for (const auto& i : e.issues()) r.issues.push_back(i);
    }
  }

  if (const auto sn = root["scenario"]) {
    read_scenario(r, sn, fields);
  } else if (!root["preset"]) {
    r.issues.push_back("scenario: missing");
  }
  if (root["scenario"] || !root["preset"]) c.scenario = resolve_scenario(r, fields);

  if (const auto m = root["mode"]) {
    const auto v = m.IsScalar() ? mode_from(trim(m.Scalar())) : std::nullopt;
    if (v) c.mode = *v;
    else r.issues.push_back("mode: expected analytic, oracle or compare");
  }

  if (const auto o = root["outputs"]; o && r.is_map(o, "outputs")) {
    r.unknown_keys(o, "outputs", {"slices", "marginal1", "bucket_widths", "fringe_report", "density_2d"});
    if (o["slices"]) if (auto v = r.lengths(o["slices"], "outputs.slices")) c.outputs.slices = *v;
    if (o["marginal1"]) if (auto v = r.boolean(o["marginal1"], "outputs.marginal1")) c.outputs.marginal1 = *v;
    if (o["bucket_widths"])
      if (auto v = r.lengths(o["bucket_widths"], "outputs.bucket_widths")) c.outputs.bucket_widths = *v;
    if (o["fringe_report"])
      if (auto v = r.boolean(o["fringe_report"], "outputs.fringe_report")) c.outputs.fringe_report = *v;
    if (o["density_2d"]) if (auto v = r.boolean(o["density_2d"], "outputs.density_2d")) c.outputs.density_2d = *v;
  }

  if (const auto sm = root["sampling"]; sm && r.is_map(sm, "sampling")) {
    r.unknown_keys(sm, "sampling", {"y2_half_width", "y2_points", "y1_half_width", "y1_points", "joint_points"});
    if (sm["y2_half_width"]) c.sampling.y2_half_width = r.length(sm["y2_half_width"], "sampling.y2_half_width", true);
    if (sm["y1_half_width"]) c.sampling.y1_half_width = r.length(sm["y1_half_width"], "sampling.y1_half_width", true);
    if (sm["y2_points"]) if (auto v = r.count(sm["y2_points"], "sampling.y2_points")) c.sampling.y2_points = *v;
    if (sm["y1_points"]) if (auto v = r.count(sm["y1_points"], "sampling.y1_points")) c.sampling.y1_points = *v;
    if (sm["joint_points"])
      if (auto v = r.count(sm["joint_points"], "sampling.joint_points")) c.sampling.joint_points = *v;
  }

  if (const auto g = root["grid"]) {
    if (g.IsNull()) {
      c.grid.reset();
    } else if (r.is_map(g, "grid")) {
      r.unknown_keys(g, "grid", {"n1", "n2", "extent1", "extent2", "memory_cap"});
      GridConfig gc = c.grid.value_or(GridConfig{});
      if (g["n1"]) if (auto v = r.count(g["n1"], "grid.n1")) gc.n1 = *v;
      if (g["n2"]) if (auto v = r.count(g["n2"], "grid.n2")) gc.n2 = *v;
      if (g["extent1"]) gc.extent1 = r.length(g["extent1"], "grid.extent1", true);
      if (g["extent2"]) gc.extent2 = r.length(g["extent2"], "grid.extent2", true);
      if (g["memory_cap"]) if (auto v = r.count(g["memory_cap"], "grid.memory_cap")) gc.memory_cap = *v;
      c.grid = gc;
    }
  }

  if (const auto ch = root["check"]; ch && r.is_map(ch, "check")) {
    r.unknown_keys(ch, "check", {"max_deviation", "max_norm_drift"});
    if (ch["max_deviation"]) if (auto v = r.number(ch["max_deviation"], "check.max_deviation")) c.check.max_deviation = *v;
    if (ch["max_norm_drift"])
      if (auto v = r.number(ch["max_norm_drift"], "check.max_norm_drift")) c.check.max_norm_drift = *v;
  }

  if (const auto od = root["output_dir"]) {
    if (od.IsScalar() && !od.Scalar().empty()) c.output_dir = od.Scalar();
    else r.issues.push_back("output_dir: expected a path");
  }
  if (const auto fm = root["format"]) {
    const auto v = fm.IsScalar() ? format_from(trim(fm.Scalar())) : std::nullopt;
    if (v) c.format = *v;
    else r.issues.push_back("format: expected csv or binary");
  }

  if (r.issues.empty()) {
    for (auto& i : config_issues(c))
      if (i.rfind("scenario", 0) != 0) r.issues.push_back(i);  // scenario issues were already collected
  }
  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return c;
}

RunConfig validate_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> config_issues(const RunConfig& c) {
  auto out = c.scenario.issues("scenario");
  if ((c.mode == RunMode::oracle || c.mode == RunMode::compare) && !c.grid)
    out.push_back("grid: required for mode " + to_string(c.mode));
  for (std::size_t i = 0; i < c.outputs.slices.size(); ++i)
    if (!std::isfinite(c.outputs.slices[i]))
      out.push_back("outputs.slices[" + std::to_string(i) + "]: must be finite");
  for (std::size_t i = 0; i < c.outputs.bucket_widths.size(); ++i) {
    const double w = c.outputs.bucket_widths[i];
    const std::string path = "outputs.bucket_widths[" + std::to_string(i) + "]";
    if (!(w >= 0.0) || !std::isfinite(w)) out.push_back(path + ": must be a non-negative length");
    else if (i > 0 && w < c.outputs.bucket_widths[i - 1]) out.push_back(path + ": widths must be ascending");
  }
  auto positive_opt = [&](const std::optional<double>& v, const std::string& path) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) out.push_back(path + ": must be a positive length");
  };
  positive_opt(c.sampling.y2_half_width, "sampling.y2_half_width");
  positive_opt(c.sampling.y1_half_width, "sampling.y1_half_width");
  if (c.sampling.y2_points < 16) out.push_back("sampling.y2_points: need at least 16");
  if (c.sampling.y1_points < 16) out.push_back("sampling.y1_points: need at least 16");
  if (c.sampling.joint_points < 2) out.push_back("sampling.joint_points: need at least 2");
  if (c.grid) {
    auto pow2 = [](std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; };
    if (!pow2(c.grid->n1)) out.push_back("grid.n1: must be a power of two >= 8");
    if (!pow2(c.grid->n2)) out.push_back("grid.n2: must be a power of two >= 8");
    positive_opt(c.grid->extent1, "grid.extent1");
    positive_opt(c.grid->extent2, "grid.extent2");
    if (c.grid->memory_cap == 0) out.push_back("grid.memory_cap: must be positive");
  }
  if (!(c.check.max_deviation > 0.0)) out.push_back("check.max_deviation: must be positive");
  if (!(c.check.max_norm_drift > 0.0)) out.push_back("check.max_norm_drift: must be positive");
  if (c.output_dir.empty()) out.push_back("output_dir: must not be empty");
  return out;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string("auto"); };
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
    return s + "]";
  };
  auto quoted = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') q += '\\';
      q += ch;
    }
    return q + "\"";
  };
  const Scenario& s = c.scenario;
  o << "# Lengths in metres.\n";
  o << "scenario:\n";
  o << "  lambda1: " << fmt17(s.lambda1) << "\n";
  o << "  lambda2: " << fmt17(s.lambda2) << "\n";
  o << "  L1: " << fmt17(s.L1) << "\n";
  o << "  L2: " << fmt17(s.L2) << "\n";
  o << "  d: " << fmt17(s.slit_separation) << "\n";
  o << "  epsilon: " << fmt17(s.slit_width) << "\n";
  o << "  source:\n";
  o << "    ell_sigma: " << fmt17(s.source.ell_sigma) << "\n";
  o << "    omega: " << fmt17(s.source.omega) << "\n";
  if (s.lens) o << "  lens:\n    f: " << fmt17(s.lens->focal_length) << "\n";
  o << "mode: " << to_string(c.mode) << "\n";
  o << "outputs:\n";
  o << "  slices: " << list(c.outputs.slices) << "\n";
  o << "  marginal1: " << (c.outputs.marginal1 ? "true" : "false") << "\n";
  o << "  bucket_widths: " << list(c.outputs.bucket_widths) << "\n";
  o << "  fringe_report: " << (c.outputs.fringe_report ? "true" : "false") << "\n";
  o << "  density_2d: " << (c.outputs.density_2d ? "true" : "false") << "\n";
  o << "sampling:\n";
  o << "  y2_half_width: " << opt(c.sampling.y2_half_width) << "\n";
  o << "  y2_points: " << c.sampling.y2_points << "\n";
  o << "  y1_half_width: " << opt(c.sampling.y1_half_width) << "\n";
  o << "  y1_points: " << c.sampling.y1_points << "\n";
  o << "  joint_points: " << c.sampling.joint_points << "\n";
  if (c.grid) {
    o << "grid:\n";
    o << "  n1: " << c.grid->n1 << "\n";
    o << "  n2: " << c.grid->n2 << "\n";
    o << "  extent1: " << opt(c.grid->extent1) << "\n";
    o << "  extent2: " << opt(c.grid->extent2) << "\n";
    o << "  memory_cap: " << c.grid->memory_cap << "\n";
  }
  o << "check:\n";
  o << "  max_deviation: " << fmt17(c.check.max_deviation) << "\n";
  o << "  max_norm_drift: " << fmt17(c.check.max_norm_drift) << "\n";
  o << "output_dir: " << quoted(c.output_dir) << "\n";
  o << "format: " << to_string(c.format) << "\n";
  return o.str();
}

std::vector<std::string> preset_names() { return {"ding-fig3"}; }

RunConfig preset(const std::string& name) {
  if (name != "ding-fig3") throw ConfigError({"preset: unknown preset '" + name + "' (known: ding-fig3)"});
  RunConfig c;
  c.scenario = ding_fig3();
  c.outputs.slices = {0.0};
  c.outputs.bucket_widths = {0.2e-3, 1e-3};
  c.output_dir = "out";
  return c;
}

}  // namespace ghostsim
