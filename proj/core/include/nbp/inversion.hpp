#pragma once

#include <span>
#include <string>
#include <vector>

#include "nbp/field.hpp"
#include "nbp/forward.hpp"
#include "nbp/geometry.hpp"

namespace nbp {

/// Product-integrated Abel transforms of trace rows:
/// A[k, l] ~ int_{t_l}^{t_L} d(y_k, t) / sqrt(t^2 - t_l^2) dt.
struct AbelAccumulator {
  DetectorArray detectors;
  TimeGrid time;
  std::vector<double> values;  // M x L, row-major

  double operator()(int k, int l) const { return values[static_cast<std::size_t>(k) * time.count + l]; }
  std::span<const double> row(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * time.count, static_cast<std::size_t>(time.count)};
  }
};

enum class AbelRule {
  /// A[k, l] = sum_{j >= l} d[k, j+1] / t_{j+1} * (sqrt(t_{j+1}^2 - t_l^2) - sqrt(t_j^2 - t_l^2)),
  /// zero-based: d / t frozen at the right end of each cell. First order in dt.
  kStep,
  /// d / t linear on each cell, integrated exactly against t / sqrt(t^2 - t_l^2).
  /// Second order; d / t at t = 0 is taken as 0.
  kLinear,
};

const char* to_string(AbelRule rule);
AbelRule abel_rule_from_string(const std::string& s);

AbelAccumulator accumulate_abel(const TraceMatrix& d, AbelRule rule = AbelRule::kStep);
/// Same rule on a raw M x L array.
AbelAccumulator accumulate_abel(std::span<const double> d, const DetectorArray& detectors, TimeGrid time,
                                AbelRule rule = AbelRule::kStep);

enum class Interpolation { kLinear, kCubic };

struct ReconstructionOptions {
  Interpolation interpolation = Interpolation::kLinear;
  AbelRule abel_rule = AbelRule::kStep;
  /// Accept a trace whose kind does not match the formula (mismatch experiments).
  bool allow_kind_mismatch = false;
};

/// prefactor * sum_k w_k * interp(A[k, .], |x - y_k|) at every lattice node inside
/// the detector domain; zero elsewhere and past the last time sample.
ScalarField2D backproject(const AbelAccumulator& A, const GridSpec& grid, double prefactor,
                          Interpolation interpolation = Interpolation::kLinear);
/// Same sum at arbitrary points (no domain mask).
std::vector<double> backproject_at(const AbelAccumulator& A, std::span<const Vec2> points, double prefactor,
                                   Interpolation interpolation = Interpolation::kLinear);

/// Neumann back-projection with prefactor 1/pi. Circle and ellipse domains only.
ScalarField2D reconstruct_neumann(const TraceMatrix& d, const GridSpec& grid, const ReconstructionOptions& options = {});
/// Mixed-trace formula with prefactor 1/(b pi), using the trace's (a, b). Circles only, b > 0.
ScalarField2D reconstruct_mixed(const TraceMatrix& m, const GridSpec& grid, const ReconstructionOptions& options = {});
/// Dirichlet back-projection c * sum_k w_k <nu_k, x - y_k> interp(B[k, .], |x - y_k|)
/// with B the Abel accumulation of d/dt (u / t). Circles only.
ScalarField2D reconstruct_dirichlet_ubp(const TraceMatrix& u, const GridSpec& grid, double scale = 1.0,
                                        const ReconstructionOptions& options = {});

/// Centered time derivative of u / t (u / t := 0 at t = 0), one-sided at the ends.
std::vector<double> time_derivative_of_ratio(const TraceMatrix& u);

}  // namespace nbp
