#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nbp/vec2.hpp"

namespace nbp {

/// Square N x N sampling lattice. Node (i, j), zero based, sits at
/// origin + (i * spacing, j * spacing); i runs along x1.
struct GridSpec {
  int n = 0;
  double spacing = 0.0;
  Vec2 origin;

  /// The lattice covering [z - rho, z + rho]^2 with n nodes per side, so
  /// spacing = 2 rho / (n - 1).
  static GridSpec covering_square(int n, double rho, Vec2 center);

  Vec2 node(int i, int j) const { return {origin.x + i * spacing, origin.y + j * spacing}; }
  double extent() const { return (n - 1) * spacing; }
  /// Same spacing, `cells` extra nodes on every side.
  GridSpec expanded(int cells) const;

  bool operator==(const GridSpec&) const = default;
};

/// Uniform 1D sample positions start + k * step, k = 0 .. count - 1.
struct UniformGrid1D {
  double start = 0.0;
  double step = 1.0;
  int count = 0;

  double at(int k) const { return start + k * step; }
  /// Grid with spacing `step` symmetric about 0 covering at least [-half_width, half_width].
  static UniformGrid1D symmetric(double half_width, double step);
};

/// Smallest disk found by the support scan that contains every point where the
/// bilinear interpolant of a field can be nonzero.
struct SupportDisk {
  bool empty = true;
  Vec2 center;
  double radius = 0.0;
  /// Nonzero samples on the outermost ring of grid nodes.
  bool touches_edge = false;
};

class ScalarField2D {
 public:
  ScalarField2D() = default;
  /// Zero field. Throws std::invalid_argument for n < 3 or spacing <= 0.
  explicit ScalarField2D(GridSpec grid);
  /// Throws std::invalid_argument on shape mismatch or non-finite values.
  ScalarField2D(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  int size() const { return grid_.n; }
  double spacing() const { return grid_.spacing; }
  Vec2 node(int i, int j) const { return grid_.node(i, j); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * grid_.n + j]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n + j]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Bilinear interpolation; zero outside the lattice.
  double interpolate(Vec2 p) const;
  double max_abs() const;
  /// Euclidean norm of the samples (no spacing factor).
  double l2_norm() const;
  SupportDisk support() const;
  bool all_finite() const;

  ScalarField2D& operator+=(const ScalarField2D& o);
  ScalarField2D& operator*=(double s);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b);
ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b);
ScalarField2D operator*(double s, ScalarField2D a);

/// Centered-difference gradient (one-sided at the lattice edge).
std::pair<ScalarField2D, ScalarField2D> centered_gradient(const ScalarField2D& f);

}  // namespace nbp
