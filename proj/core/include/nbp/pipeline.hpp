#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nbp/config.hpp"
#include "nbp/forward.hpp"
#include "nbp/kernel.hpp"
#include "nbp/metrics.hpp"
#include "nbp/phantoms.hpp"

namespace nbp {

/// Phantom samples and analytic gradients on the run grid.
struct PhantomData {
  Phantom phantom;
  ScalarField2D f, d1, d2;
};

ConvexDomain make_domain(const RunConfig& c);
/// Head phantoms get their component amplitudes scaled so the samples peak at 1.
PhantomData make_phantom(const RunConfig& c);
DetectorArray make_detectors(const RunConfig& c, const ConvexDomain& domain);
TimeGrid make_time_grid(const RunConfig& c);

struct TraceSet {
  TraceMatrix dirichlet;
  TraceMatrix neumann;
  TraceMatrix mixed;  // a * u + b * d_nu u with the configured a, b
  const TraceMatrix& of(TraceKind kind) const;
};

/// Clean traces on the configured path. `timings` (optional) receives seconds per stage.
TraceSet simulate_traces(const RunConfig& c, const PhantomData& p, std::map<std::string, double>* timings = nullptr);
/// Noise at `percent` with the per-kind seeds of the config.
TraceSet with_noise(const TraceSet& clean, const NoiseConfig& noise, double percent);

/// The configured formula applied to `trace`. Throws std::invalid_argument on a
/// kind mismatch unless `cross`.
ScalarField2D reconstruct(const RunConfig& c, const TraceMatrix& trace, Formula formula, bool cross);

/// Probe lattice of the kernel section.
std::vector<Vec2> kernel_probes(const RunConfig& c);

// Command verbs. Each writes into c.output.directory (created when missing).
// Timings go to stderr, and to timings.json when output.record_timings is set.

/// phantom.f64/.json/.pgm
void cmd_phantom(const RunConfig& c);
/// trace_{dirichlet,neumann,mixed}.f64/.json (clean) plus phantom files.
void cmd_forward(const RunConfig& c);
/// Reads the clean traces and writes trace_<kind>_noise<P> for noise.percent.
void cmd_noise(const RunConfig& c);
/// Reconstructs <trace_stem> with the configured formula: recon_<name>.f64/.json/.pgm
/// and metrics_<name>.json against the configured phantom.
MetricsReport cmd_reconstruct(const RunConfig& c, const std::filesystem::path& trace_stem, bool cross);
/// kernel.csv, kernel_report.json (band maximum, Theorem-style residual, bilinear identities).
nlohmann::json cmd_kernel(const RunConfig& c);

struct MatrixCell {
  TraceKind kind;
  double noise_percent;
  Formula formula;
  bool matching;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
};

/// 3 kinds x {0, 10, 20} % x {matching, mismatched formula}. Writes summary.csv,
/// summary.json and one preview per cell. Cells fail independently.
std::vector<MatrixCell> cmd_matrix(const RunConfig& c);

/// Metrics of field <a> against reference field <b>.
MetricsReport cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b);

/// Formula used for the mismatched cell of a data kind.
Formula mismatched_formula(TraceKind kind);

}  // namespace nbp
