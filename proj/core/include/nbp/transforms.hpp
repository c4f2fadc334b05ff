#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbp/field.hpp"
#include "nbp/geometry.hpp"

namespace nbp {

/// Samples phi(theta_i, s_j) on a set of directions and a shared uniform s grid.
struct ProfileOnLines {
  std::vector<double> angles;  // theta_i = unit_vector(angles[i])
  UniformGrid1D s;
  std::vector<double> values;  // angles.size() x s.count, row-major

  ProfileOnLines() = default;
  ProfileOnLines(std::vector<double> angles_, UniformGrid1D s_);

  int directions() const { return static_cast<int>(angles.size()); }
  std::span<double> row(int i) { return {values.data() + static_cast<std::size_t>(i) * s.count, static_cast<std::size_t>(s.count)}; }
  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * s.count, static_cast<std::size_t>(s.count)};
  }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * s.count + j]; }
};

/// Mean of f over the circle x + r S^1: uniform n_angles-point trapezoid rule
/// with bilinear interpolation. Throws PreconditionError when the circle leaves
/// the lattice while f is nonzero on the lattice edge, or for r < 0, n_angles < 8.
double spherical_mean(const ScalarField2D& f, Vec2 x, double r, int n_angles);

struct RadialProfile {
  UniformGrid1D r;
  std::vector<double> mean;
  /// Centered differences of `mean` (one-sided second order at the ends).
  std::vector<double> derivative;
};

RadialProfile spherical_mean_profile(const ScalarField2D& f, Vec2 x, const UniformGrid1D& r, int n_angles);

/// Batched spherical means on radii r_j = j * dr for many centers.
/// The circle of radius r gets max(min_nodes, ceil(2 pi r / arc_step)) trapezoid
/// nodes, and only nodes landing in the support disk of f are evaluated, which
/// gives the same sum as the full rule.
class SphericalMeanProfiler {
 public:
  SphericalMeanProfiler(const ScalarField2D& f, double arc_step, int min_nodes = 16);

  /// Radius beyond which every circle around x misses the support.
  double max_radius(Vec2 x) const;
  /// out[j] = M f(x, j * dr).
  void profile(Vec2 x, double dr, std::span<double> out) const;
  const SupportDisk& support() const { return support_; }

 private:
  int nodes_for(double r) const;

  const ScalarField2D* field_;
  SupportDisk support_;
  double arc_step_;
  int min_nodes_;
};

/// R chi_Omega(theta, s_j), the chord lengths of the domain.
std::vector<double> radon_indicator_profile(const ConvexDomain& domain, Vec2 theta, const UniformGrid1D& s);
ProfileOnLines radon_indicator_lines(const ConvexDomain& domain, std::vector<double> angles, const UniformGrid1D& s);

struct HilbertOptions {
  /// Zero-padded length is at least pad_factor * n.
  int pad_factor = 4;
  /// Width, in samples, of a Gaussian low-pass exp(-(xi sigma)^2 / 2) applied
  /// with the multiplier. 0 disables it.
  double smoothing = 0.0;
};

struct HilbertResult {
  std::vector<double> values;
  /// The input did not decay to 1e-3 of its maximum at both ends.
  bool decay_warning = false;
};

/// (1/pi) p.v. int phi(t) / (s - t) dt on the sample grid, via the multiplier
/// -i sign(xi). Sample spacing does not enter.
HilbertResult hilbert_transform(std::span<const double> phi, const HilbertOptions& options = {});

/// Second derivative by central differences, one-sided second order at both ends.
std::vector<double> second_s_derivative(std::span<const double> phi, double ds);

/// Number of bilinear field evaluations made by the spherical-mean routines.
std::uint64_t interpolation_count();
void reset_interpolation_count();

}  // namespace nbp
