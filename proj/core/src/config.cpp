#include "nbp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nbp/errors.hpp"

namespace nbp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double parse_double(const std::string& s, const ConfigEntry& e) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
    throw ConfigError(e.section + "." + e.key + ": '" + s + "' is not a finite number", e.line);
  return v;
}

double number(const ConfigEntry& e) { return parse_double(e.value, e); }

long long integer(const ConfigEntry& e) {
  long long v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError(e.section + "." + e.key + ": '" + e.value + "' is not an integer", e.line);
  return v;
}

std::uint64_t unsigned_integer(const ConfigEntry& e) {
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto r = std::from_chars(e.value.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError(e.section + "." + e.key + ": '" + e.value + "' is not a non-negative integer", e.line);
  return v;
}

bool boolean(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ConfigError(e.section + "." + e.key + ": expected true or false, got '" + e.value + "'", e.line);
}

std::vector<double> numbers(const ConfigEntry& e, std::size_t count) {
  const auto words = split_ws(e.value);
  if (words.size() != count)
    throw ConfigError(e.section + "." + e.key + ": expected " + std::to_string(count) + " numbers", e.line);
  std::vector<double> out;
  for (const auto& w : words) out.push_back(parse_double(w, e));
  return out;
}

Vec2 point(const ConfigEntry& e) {
  const auto v = numbers(e, 2);
  return {v[0], v[1]};
}

template <class F>
auto choice(const ConfigEntry& e, F&& parse) {
  try {
    return parse(e.value);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(e.section + "." + e.key + ": " + ex.what(), e.line);
  }
}

PhantomComponent component(const ConfigEntry& e) {
  const auto words = split_ws(e.value);
  if (words.empty()) throw ConfigError("phantom.component: empty value", e.line);
  std::vector<double> v;
  for (std::size_t i = 1; i < words.size(); ++i) v.push_back(parse_double(words[i], e));
  auto need = [&](std::size_t n, const char* form) {
    if (v.size() != n) throw ConfigError(std::string("phantom.component: expected '") + form + "'", e.line);
  };
  const std::string& name = words[0];
  if (name == "bump") {
    need(5, "bump cx cy radius amplitude exponent");
    return SmoothBump{{v[0], v[1]}, v[2], v[3], v[4]};
  }
  if (name == "gaussian") {
    need(4, "gaussian cx cy sigma amplitude");
    return GaussianBlob{{v[0], v[1]}, v[2], v[3]};
  }
  if (name == "ellipse") {
    need(7, "ellipse cx cy semi_x semi_y rotation amplitude edge");
    return SmoothedEllipseBlob{{v[0], v[1]}, v[2], v[3], v[4], v[5], v[6]};
  }
  if (name == "constant_ellipse") {
    need(6, "constant_ellipse cx cy semi_x semi_y rotation amplitude");
    return ConstantEllipse{{v[0], v[1]}, v[2], v[3], v[4], v[5]};
  }
  throw ConfigError("phantom.component: unknown component '" + name + "'", e.line);
}

ForwardPath forward_path_from_string(const std::string& s) {
  if (s == "oracle") return ForwardPath::kOracle;
  if (s == "spectral") return ForwardPath::kSpectral;
  throw std::invalid_argument("unknown forward path '" + s + "'");
}

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "linear") return Interpolation::kLinear;
  if (s == "cubic") return Interpolation::kCubic;
  throw std::invalid_argument("unknown interpolation '" + s + "'");
}

struct Lines {
  std::map<std::string, int> at;
  int operator()(const std::string& k) const {
    const auto it = at.find(k);
    return it == at.end() ? 0 : it->second;
  }
};

void check(bool ok, const std::string& message, int line) {
  if (!ok) throw ConfigError(message, line);
}

void validate_with_lines(const RunConfig& c, const Lines& line) {
  check(c.grid.n >= 51, "grid.n must be at least 51", line("grid.n"));
  check(c.grid.rho > 0.0, "grid.rho must be positive", line("grid.rho"));
  check(c.forward.t_factor >= 2.0, "forward.t_factor must be at least 2", line("forward.t_factor"));
  check(c.forward.pad_factor >= 1, "forward.pad_factor must be at least 1", line("forward.pad_factor"));
  check(c.forward.oracle.oversample >= 1, "forward.oversample must be at least 1", line("forward.oversample"));
  check(c.noise.percent >= 0.0, "noise.percent must be non-negative", line("noise.percent"));
  if (c.reconstruction.formula == Formula::kMixed) {
    check(c.reconstruction.b_value > 0.0, "reconstruction.b must be positive for the mixed formula",
          line("reconstruction.b"));
    check(c.reconstruction.a >= 0.0, "reconstruction.a must be non-negative", line("reconstruction.a"));
  }
  check(c.kernel.n_theta >= 4, "kernel.n_theta must be at least 4", line("kernel.n_theta"));
  check(c.kernel.ds > 0.0, "kernel.ds must be positive", line("kernel.ds"));
  check(c.kernel.probe_half_count >= 0, "kernel.probe_half_count must be non-negative",
        line("kernel.probe_half_count"));
  check(c.kernel.identity_t_factor >= 2.0, "kernel.identity_t_factor must be at least 2",
        line("kernel.identity_t_factor"));
  check(!c.output.directory.empty(), "output.directory must not be empty", line("output.directory"));
  try {
    (void)ConvexDomain::from_description(c.domain);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what(), line("domain.kind"));
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("entry before the first [section]", line);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    // Trailing comments after whitespace.
    for (const char* mark : {" #", " ;", "\t#", "\t;"})
      if (const auto p = value.find(mark); p != std::string::npos) value = trim(value.substr(0, p));
    if (key.empty()) throw ConfigError("empty key", line);
    doc.entries_.push_back({section, key, value, line});
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ConfigDocument::add_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  entries_.push_back({trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
                      trim(assignment.substr(eq + 1)), 0});
}

const char* to_string(ForwardPath p) { return p == ForwardPath::kOracle ? "oracle" : "spectral"; }

const char* to_string(Formula f) {
  switch (f) {
    case Formula::kNeumann:
      return "neumann";
    case Formula::kMixed:
      return "mixed";
    case Formula::kDirichletUbp:
      return "dirichlet_ubp";
  }
  return "?";
}

Formula formula_from_string(const std::string& s) {
  if (s == "neumann") return Formula::kNeumann;
  if (s == "mixed") return Formula::kMixed;
  if (s == "dirichlet_ubp") return Formula::kDirichletUbp;
  throw std::invalid_argument("unknown formula '" + s + "'");
}

TraceKind matching_kind(Formula f) {
  switch (f) {
    case Formula::kNeumann:
      return TraceKind::kNeumann;
    case Formula::kMixed:
      return TraceKind::kMixed;
    case Formula::kDirichletUbp:
      return TraceKind::kDirichlet;
  }
  return TraceKind::kNeumann;
}

std::uint64_t NoiseConfig::seed(TraceKind kind) const {
  switch (kind) {
    case TraceKind::kDirichlet:
      return seed_dirichlet;
    case TraceKind::kNeumann:
      return seed_neumann;
    case TraceKind::kMixed:
      return seed_mixed;
  }
  return seed_dirichlet;
}

RunConfig build_config(const ConfigDocument& doc) {
  RunConfig c;
  c.phantom.phantom.components = {SmoothBump{{0.1, -0.05}, 0.5, 1.0, 1.0}};
  bool domain_radius_set = false, domain_center_set = false, bump_touched = false, components_seen = false;
  SmoothBump bump{{0.1, -0.05}, 0.5, 1.0, 1.0};
  Lines lines;

  using Setter = std::function<void(const ConfigEntry&)>;
  const std::map<std::string, Setter> setters = {
      {"grid.n", [&](const ConfigEntry& e) { c.grid.n = static_cast<int>(integer(e)); }},
      {"grid.rho", [&](const ConfigEntry& e) { c.grid.rho = number(e); }},
      {"grid.center", [&](const ConfigEntry& e) { c.grid.center = point(e); }},

      {"domain.kind",
       [&](const ConfigEntry& e) {
         if (e.value != "circle" && e.value != "ellipse" && e.value != "superellipse")
           throw ConfigError("domain.kind must be circle, ellipse or superellipse", e.line);
         c.domain.kind = e.value;
       }},
      {"domain.center",
       [&](const ConfigEntry& e) {
         c.domain.center = point(e);
         domain_center_set = true;
       }},
      {"domain.radius",
       [&](const ConfigEntry& e) {
         c.domain.radius = number(e);
         domain_radius_set = true;
       }},
      {"domain.e1", [&](const ConfigEntry& e) { c.domain.e1 = number(e); }},
      {"domain.e2", [&](const ConfigEntry& e) { c.domain.e2 = number(e); }},
      {"domain.rotation", [&](const ConfigEntry& e) { c.domain.rotation = number(e); }},
      {"domain.scale", [&](const ConfigEntry& e) { c.domain.scale = number(e); }},
      {"domain.blend", [&](const ConfigEntry& e) { c.domain.blend = number(e); }},

      {"phantom.kind",
       [&](const ConfigEntry& e) {
         if (e.value != "bump" && e.value != "head" && e.value != "zero" && e.value != "components")
           throw ConfigError("phantom.kind must be bump, head, zero or components", e.line);
         c.phantom.kind = e.value;
       }},
      {"phantom.center",
       [&](const ConfigEntry& e) {
         bump.center = point(e);
         bump_touched = true;
       }},
      {"phantom.radius",
       [&](const ConfigEntry& e) {
         bump.radius = number(e);
         bump_touched = true;
       }},
      {"phantom.amplitude",
       [&](const ConfigEntry& e) {
         bump.amplitude = number(e);
         bump_touched = true;
       }},
      {"phantom.exponent",
       [&](const ConfigEntry& e) {
         bump.exponent = number(e);
         bump_touched = true;
       }},
      {"phantom.component",
       [&](const ConfigEntry& e) {
         if (!components_seen) c.phantom.phantom.components.clear();
         components_seen = true;
         c.phantom.phantom.components.push_back(component(e));
       }},
      {"phantom.allow_discontinuous",
       [&](const ConfigEntry& e) { c.phantom.phantom.allow_discontinuous = boolean(e); }},

      {"forward.path", [&](const ConfigEntry& e) { c.forward.path = choice(e, forward_path_from_string); }},
      {"forward.pad_factor", [&](const ConfigEntry& e) { c.forward.pad_factor = static_cast<int>(integer(e)); }},
      {"forward.t_factor", [&](const ConfigEntry& e) { c.forward.t_factor = number(e); }},
      {"forward.weight_rule", [&](const ConfigEntry& e) { c.forward.weight_rule = choice(e, weight_rule_from_string); }},
      {"forward.arc_factor", [&](const ConfigEntry& e) { c.forward.oracle.arc_factor = number(e); }},
      {"forward.oversample",
       [&](const ConfigEntry& e) { c.forward.oracle.oversample = static_cast<int>(integer(e)); }},

      {"noise.percent", [&](const ConfigEntry& e) { c.noise.percent = number(e); }},
      {"noise.seed",
       [&](const ConfigEntry& e) {
         const std::uint64_t s = unsigned_integer(e);
         c.noise.seed_dirichlet = s;
         c.noise.seed_neumann = s + 1;
         c.noise.seed_mixed = s + 2;
       }},
      {"noise.seed_dirichlet", [&](const ConfigEntry& e) { c.noise.seed_dirichlet = unsigned_integer(e); }},
      {"noise.seed_neumann", [&](const ConfigEntry& e) { c.noise.seed_neumann = unsigned_integer(e); }},
      {"noise.seed_mixed", [&](const ConfigEntry& e) { c.noise.seed_mixed = unsigned_integer(e); }},

      {"reconstruction.formula",
       [&](const ConfigEntry& e) { c.reconstruction.formula = choice(e, formula_from_string); }},
      {"reconstruction.a", [&](const ConfigEntry& e) { c.reconstruction.a = number(e); }},
      {"reconstruction.b",
       [&](const ConfigEntry& e) {
         std::string v = e.value;
         c.reconstruction.b_in_cells = v.size() > 2 && v.compare(v.size() - 2, 2, "dx") == 0;
         if (c.reconstruction.b_in_cells) v = trim(v.substr(0, v.size() - 2));
         c.reconstruction.b_value = parse_double(v, e);
       }},
      {"reconstruction.interpolation",
       [&](const ConfigEntry& e) { c.reconstruction.interpolation = choice(e, interpolation_from_string); }},
      {"reconstruction.abel_rule",
       [&](const ConfigEntry& e) { c.reconstruction.abel_rule = choice(e, abel_rule_from_string); }},
      {"reconstruction.ubp_scale", [&](const ConfigEntry& e) { c.reconstruction.ubp_scale = number(e); }},

      {"kernel.n_theta", [&](const ConfigEntry& e) { c.kernel.n_theta = static_cast<int>(integer(e)); }},
      {"kernel.ds", [&](const ConfigEntry& e) { c.kernel.ds = number(e); }},
      {"kernel.extent_factor", [&](const ConfigEntry& e) { c.kernel.extent_factor = number(e); }},
      {"kernel.hilbert_smoothing", [&](const ConfigEntry& e) { c.kernel.hilbert_smoothing = number(e); }},
      {"kernel.probe_half_count",
       [&](const ConfigEntry& e) { c.kernel.probe_half_count = static_cast<int>(integer(e)); }},
      {"kernel.probe_step", [&](const ConfigEntry& e) { c.kernel.probe_step = number(e); }},
      {"kernel.probe_center", [&](const ConfigEntry& e) { c.kernel.probe_center = point(e); }},
      {"kernel.partner_center", [&](const ConfigEntry& e) { c.kernel.partner_center = point(e); }},
      {"kernel.partner_radius", [&](const ConfigEntry& e) { c.kernel.partner_radius = number(e); }},
      {"kernel.identity_t_factor", [&](const ConfigEntry& e) { c.kernel.identity_t_factor = number(e); }},
      {"kernel.literal_constants", [&](const ConfigEntry& e) { c.kernel.literal_constants = boolean(e); }},

      {"output.directory", [&](const ConfigEntry& e) { c.output.directory = e.value; }},
      {"output.record_timings", [&](const ConfigEntry& e) { c.output.record_timings = boolean(e); }},
  };

  for (const ConfigEntry& e : doc.entries()) {
    const std::string name = e.section + "." + e.key;
    const auto it = setters.find(name);
    if (it == setters.end()) {
      bool known_section = false;
      for (const auto& [k, _] : setters)
        if (k.compare(0, e.section.size() + 1, e.section + ".") == 0) known_section = true;
      throw ConfigError(known_section ? "unknown key '" + e.key + "' in [" + e.section + "]"
                                      : "unknown section [" + e.section + "]",
                        e.line);
    }
    it->second(e);
    lines.at[name] = e.line;
  }

  if (c.phantom.kind == "bump") {
    c.phantom.phantom.components = {bump};
  } else if (c.phantom.kind == "components") {
    if (!components_seen) throw ConfigError("phantom.kind = components needs at least one component line",
                                            lines("phantom.kind"));
  } else {
    c.phantom.phantom.components.clear();
  }
  if (bump_touched && c.phantom.kind != "bump")
    throw ConfigError("phantom center/radius/amplitude/exponent only apply to kind = bump", lines("phantom.kind"));
  if (!domain_radius_set) c.domain.radius = c.grid.rho;
  if (!domain_center_set) c.domain.center = c.grid.center;

  validate_with_lines(c, lines);
  return c;
}

void validate(const RunConfig& c) { validate_with_lines(c, Lines{}); }

}  // namespace nbp
