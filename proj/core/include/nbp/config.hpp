#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nbp/field.hpp"
#include "nbp/forward.hpp"
#include "nbp/geometry.hpp"
#include "nbp/inversion.hpp"
#include "nbp/phantoms.hpp"

namespace nbp {

/// One `key = value` line of a config file.
struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

/// Sectioned key-value text:
///   # comment            ; comment
///   [section]
///   key = value
/// Keys before the first section header are rejected. Later entries override
/// earlier ones, except for keys that may repeat (phantom.component).
class ConfigDocument {
 public:
  /// Throws ConfigError with the line number on malformed lines.
  static ConfigDocument parse(const std::string& text);
  static ConfigDocument load(const std::filesystem::path& path);

  /// "section.key=value"; throws ConfigError when malformed.
  void add_override(const std::string& assignment);
  void add(ConfigEntry entry) { entries_.push_back(std::move(entry)); }

  const std::vector<ConfigEntry>& entries() const { return entries_; }

 private:
  std::vector<ConfigEntry> entries_;
};

enum class ForwardPath { kOracle, kSpectral };
enum class Formula { kNeumann, kMixed, kDirichletUbp };

const char* to_string(ForwardPath p);
const char* to_string(Formula f);
Formula formula_from_string(const std::string& s);
/// The trace kind a formula is meant for.
TraceKind matching_kind(Formula f);

struct GridConfig {
  int n = 201;
  double rho = 1.0;
  Vec2 center;
  GridSpec spec() const { return GridSpec::covering_square(n, rho, center); }
};

struct PhantomConfig {
  /// bump | head | zero | components
  std::string kind = "bump";
  Phantom phantom;  // components for bump and components
};

struct ForwardConfig {
  ForwardPath path = ForwardPath::kOracle;
  int pad_factor = 2;
  double t_factor = 16.0;  // T = t_factor * rho
  WeightRule weight_rule = WeightRule::kTrapezoid;
  OracleOptions oracle;
};

struct NoiseConfig {
  double percent = 0.0;
  std::uint64_t seed_dirichlet = 1001;
  std::uint64_t seed_neumann = 2002;
  std::uint64_t seed_mixed = 3003;
  std::uint64_t seed(TraceKind kind) const;
};

struct ReconstructionConfig {
  Formula formula = Formula::kNeumann;
  double a = 1.0;
  /// b = b_value, or b_value * dx when b_in_cells (written "2dx" in the file).
  double b_value = 2.0;
  bool b_in_cells = true;
  Interpolation interpolation = Interpolation::kLinear;
  AbelRule abel_rule = AbelRule::kLinear;
  double ubp_scale = 1.0;
  double b(double dx) const { return b_in_cells ? b_value * dx : b_value; }
};

struct KernelConfig {
  int n_theta = 360;
  double ds = 1e-3;
  double extent_factor = 3.0;
  double hilbert_smoothing = 5.0;
  /// Probes on a (2 k + 1)^2 lattice around probe_center with spacing probe_step.
  int probe_half_count = 1;
  double probe_step = 0.15;
  Vec2 probe_center;
  /// Second bump (partner of f) for the bilinear identities.
  Vec2 partner_center{-0.15, -0.05};
  double partner_radius = 0.4;
  double identity_t_factor = 32.0;
  /// Use the stated constants instead of the closing ones.
  bool literal_constants = false;
};

struct OutputConfig {
  std::string directory = "out";
  bool record_timings = false;
};

struct RunConfig {
  GridConfig grid;
  DomainDescription domain;
  PhantomConfig phantom;
  ForwardConfig forward;
  NoiseConfig noise;
  ReconstructionConfig reconstruction;
  KernelConfig kernel;
  OutputConfig output;

  double final_time() const { return forward.t_factor * grid.rho; }
};

/// Defaults, then the document's entries in order. Unknown sections or keys,
/// unparsable values and violated invariants throw ConfigError naming the line.
RunConfig build_config(const ConfigDocument& doc);
/// Invariants: N >= 51, t_factor >= 2, b > 0 for the mixed formula, percent >= 0, ...
void validate(const RunConfig& c);

}  // namespace nbp
