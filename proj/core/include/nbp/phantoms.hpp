#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nbp/field.hpp"

namespace nbp {

/// amplitude * exp(exponent * (1 - 1 / (1 - q^2))) for q = |y - center| / radius < 1.
struct SmoothBump {
  Vec2 center;
  double radius = 0.5;
  double amplitude = 1.0;
  double exponent = 1.0;
};

/// amplitude * exp(-|y - center|^2 / sigma^2), cut to zero where it drops
/// below 1e-14 * amplitude.
struct GaussianBlob {
  Vec2 center;
  double sigma = 0.1;
  double amplitude = 1.0;
};

/// Ellipse plateau with a C-infinity edge. `edge` is the width of the
/// transition in units of the normalized elliptical radius, in (0, 1].
struct SmoothedEllipseBlob {
  Vec2 center;
  double semi_x = 0.5;
  double semi_y = 0.3;
  double rotation = 0.0;
  double amplitude = 1.0;
  double edge = 0.2;
};

/// Hard-edged ellipse. Only accepted by phantoms that allow discontinuities.
struct ConstantEllipse {
  Vec2 center;
  double semi_x = 0.5;
  double semi_y = 0.3;
  double rotation = 0.0;
  double amplitude = 1.0;
};

using PhantomComponent = std::variant<SmoothBump, GaussianBlob, SmoothedEllipseBlob, ConstantEllipse>;

struct Phantom {
  std::vector<PhantomComponent> components;
  /// Accept ConstantEllipse components (outside the smooth setting of the inversion formulas).
  bool allow_discontinuous = false;

  double value(Vec2 y) const;
  Vec2 gradient(Vec2 y) const;
  /// Radius of a disk around `center` containing every component's support.
  double support_radius(Vec2 center) const;
};

/// Point samples on the lattice. Throws PreconditionError unless every
/// component lies in the disk inscribed in the lattice shrunk by 4 cells.
ScalarField2D rasterize(const Phantom& phantom, const GridSpec& grid);
/// Analytic partial derivatives (d/dx1, d/dx2) on the lattice.
std::pair<ScalarField2D, ScalarField2D> rasterize_gradient(const Phantom& phantom, const GridSpec& grid);

/// Fixed stand-in for a head phantom on the unit disk: skull ellipse, two inner
/// ellipses, three small bumps. Amplitudes are relative; see head_phantom_like.
Phantom head_phantom_components();
/// head_phantom_components rasterized and scaled to max value 1. The same
/// scale factor is returned so gradients can be scaled consistently.
ScalarField2D head_phantom_like(const GridSpec& grid, double* scale = nullptr);

/// Textual component name, as used in config files.
std::string component_name(const PhantomComponent& c);

}  // namespace nbp
