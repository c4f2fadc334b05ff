#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nbp/field.hpp"
#include "nbp/geometry.hpp"

namespace nbp {

enum class TraceKind { kDirichlet, kNeumann, kMixed };

const char* to_string(TraceKind kind);
TraceKind trace_kind_from_string(const std::string& s);

/// Times t_l = l * dt, l = 0 .. count - 1.
struct TimeGrid {
  double dt = 0.0;
  int count = 0;

  double at(int l) const { return l * dt; }
  double final_time() const { return (count - 1) * dt; }
  /// count = floor(T / dt) + 1 (with a 1e-9 guard against round-off).
  static TimeGrid covering(double dt, double T);
  bool operator==(const TimeGrid&) const = default;
};

/// M x L boundary data, row-major (detector-major).
class TraceMatrix {
 public:
  TraceMatrix(TraceKind kind, DetectorArray detectors, TimeGrid time);

  TraceKind kind() const { return kind_; }
  const DetectorArray& detectors() const { return detectors_; }
  const TimeGrid& time() const { return time_; }
  int detector_count() const { return detectors_.size(); }
  int sample_count() const { return time_.count; }
  double dt() const { return time_.dt; }

  double& operator()(int k, int l) { return values_[static_cast<std::size_t>(k) * time_.count + l]; }
  double operator()(int k, int l) const { return values_[static_cast<std::size_t>(k) * time_.count + l]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(int k) const {
    return {values_.data() + static_cast<std::size_t>(k) * time_.count, static_cast<std::size_t>(time_.count)};
  }

  /// Mixed-trace weights; (1, 0) for Dirichlet and (0, 1) for Neumann data.
  double a() const { return a_; }
  double b() const { return b_; }
  void set_mixed_weights(double a, double b);

  /// Provenance of added noise (0 percent when clean).
  double noise_percent() const { return noise_percent_; }
  std::uint64_t noise_seed() const { return noise_seed_; }
  void set_noise(double percent, std::uint64_t seed);

  double max_abs() const;
  bool all_finite() const;

 private:
  TraceKind kind_;
  DetectorArray detectors_;
  TimeGrid time_;
  std::vector<double> values_;
  double a_ = 1.0;
  double b_ = 0.0;
  double noise_percent_ = 0.0;
  std::uint64_t noise_seed_ = 0;
};

/// Tuning of the spherical-mean quadrature path.
struct OracleOptions {
  /// Circle nodes are spaced about arc_factor * grid spacing apart.
  double arc_factor = 0.5;
  int min_nodes = 16;
  /// The radius grid is dt / oversample.
  int oversample = 1;
};

/// Which Cauchy problem a point solution refers to.
enum class InitialData {
  kDisplacement,  // data (f, 0)
  kVelocity,      // data (0, f)
};

/// Wave solution at arbitrary points, row-major points x times. Displacement
/// data use u = f(x) + int_0^t t dM/dr / sqrt(t^2 - r^2) dr, velocity data
/// v = int_0^t r M / sqrt(t^2 - r^2) dr; both with piecewise-linear product
/// integration on a radius grid of spacing dt / oversample.
std::vector<double> wave_solution_at_points(const ScalarField2D& f, std::span<const Vec2> points, TimeGrid time,
                                            InitialData data, const OracleOptions& options = {});

/// Dirichlet trace by the spherical-mean quadrature. Throws PreconditionError
/// for T <= 0 or when a detector lies inside the support disk of f.
TraceMatrix solve_dirichlet_trace_oracle(const ScalarField2D& f, const DetectorArray& detectors, double dt, double T,
                                         const OracleOptions& options = {});
/// Neumann trace from the two gradient components of f.
TraceMatrix solve_neumann_trace_oracle(const ScalarField2D& f, const ScalarField2D& d1f, const ScalarField2D& d2f,
                                       const DetectorArray& detectors, double dt, double T,
                                       const OracleOptions& options = {});

/// Wave snapshots u(., t) on the grid of the initial data.
struct Snapshots {
  GridSpec grid;
  std::vector<double> times;
  std::vector<ScalarField2D> fields;
  /// Some requested time exceeded the wrap-free limit (only with allow_wrap).
  bool wrapped = false;
};

struct SpectralOptions {
  int pad_factor = 2;
  /// Accept times past the wrap-free limit and flag the result instead of throwing.
  bool allow_wrap = false;
};

/// Largest time for which no periodic image of supp f reaches the grid, for the
/// given padding.
double spectral_time_limit(const ScalarField2D& f, int pad_factor);

/// u(., t) = F^-1 cos(|xi| t) F f on the zero-padded periodic lattice.
Snapshots solve_wave_spectral(const ScalarField2D& f, std::span<const double> times,
                              const SpectralOptions& options = {});

/// Copy of f on a larger lattice with `cells` extra zero nodes per side.
ScalarField2D embed_with_margin(const ScalarField2D& f, int cells);

/// Dirichlet trace by bilinear interpolation of snapshots.
TraceMatrix dirichlet_trace_from_grid(const Snapshots& snapshots, const DetectorArray& detectors, double dt);
/// Centered-difference gradient, bilinear interpolation, projection on the
/// normals. Throws PreconditionError unless every detector has two cells of margin.
TraceMatrix neumann_trace_from_grid(const Snapshots& snapshots, const DetectorArray& detectors, double dt);

struct TracePair {
  TraceMatrix dirichlet;
  TraceMatrix neumann;
};

/// Both traces from the spectral solution, one time slice at a time without
/// storing snapshots. Same stencils as the *_from_grid functions.
TracePair spectral_traces(const ScalarField2D& f, const DetectorArray& detectors, TimeGrid time,
                          const SpectralOptions& options = {});

/// a * u + b * d. Throws std::invalid_argument on shape or time-grid mismatch.
TraceMatrix make_mixed_trace(const TraceMatrix& u_trace, const TraceMatrix& d_trace, double a, double b);

/// Adds i.i.d. N(0, s^2) with s = percent / 100 * max|values|. Sample (k, l)
/// depends only on (seed, k * L + l): SplitMix64 counter stream plus Box-Muller.
TraceMatrix add_gaussian_noise(const TraceMatrix& trace, double percent, std::uint64_t seed);

/// Standard normal number #index of the counter stream `seed`.
double counter_normal(std::uint64_t seed, std::uint64_t index);

}  // namespace nbp
