#include "nbp/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nbp/errors.hpp"

namespace nbp {

namespace {

// sqrt(14 ln 10): exp(-c^2) = 1e-14.
const double kGaussCut = std::sqrt(14.0 * std::log(10.0));

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double dpsi(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

// C-infinity step, 1 for x <= 0 and 0 for x >= 1.
double smooth_step(double x) {
  const double a = psi(1.0 - x), b = psi(x);
  return a / (a + b);
}

double smooth_step_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = psi(1.0 - x), b = psi(x);
  const double da = -dpsi(1.0 - x), db = dpsi(x);
  return (da * b - a * db) / ((a + b) * (a + b));
}

struct EllipseFrame {
  Vec2 local;  // coordinates in the ellipse axes
  Mat2 rot;
};

EllipseFrame to_frame(Vec2 y, Vec2 center, double rotation) {
  const Mat2 rot = Mat2::rotation(rotation);
  return {rot.transposed() * (y - center), rot};
}

struct Evaluator {
  Vec2 y;
  double operator()(const SmoothBump& b) const {
    const Vec2 d = y - b.center;
    const double q2 = dot(d, d) / (b.radius * b.radius);
    if (q2 >= 1.0) return 0.0;
    return b.amplitude * std::exp(b.exponent * (1.0 - 1.0 / (1.0 - q2)));
  }
  double operator()(const GaussianBlob& g) const {
    const Vec2 d = y - g.center;
    const double e = dot(d, d) / (g.sigma * g.sigma);
    if (e >= kGaussCut * kGaussCut) return 0.0;
    return g.amplitude * std::exp(-e);
  }
  double operator()(const SmoothedEllipseBlob& e) const {
    const Vec2 p = to_frame(y, e.center, e.rotation).local;
    const double r = std::hypot(p.x / e.semi_x, p.y / e.semi_y);
    if (r >= 1.0) return 0.0;
    return e.amplitude * smooth_step((r - (1.0 - e.edge)) / e.edge);
  }
  double operator()(const ConstantEllipse& e) const {
    const Vec2 p = to_frame(y, e.center, e.rotation).local;
    const double a = p.x / e.semi_x, b = p.y / e.semi_y;
    return a * a + b * b < 1.0 ? e.amplitude : 0.0;
  }
};

struct Differentiator {
  Vec2 y;
  Vec2 operator()(const SmoothBump& b) const {
    const Vec2 d = y - b.center;
    const double r2 = b.radius * b.radius;
    const double q2 = dot(d, d) / r2;
    if (q2 >= 1.0) return {};
    const double v = b.amplitude * std::exp(b.exponent * (1.0 - 1.0 / (1.0 - q2)));
    const double w = 1.0 - q2;
    return (-2.0 * b.exponent * v / (w * w * r2)) * d;
  }
  Vec2 operator()(const GaussianBlob& g) const {
    const Vec2 d = y - g.center;
    const double e = dot(d, d) / (g.sigma * g.sigma);
    if (e >= kGaussCut * kGaussCut) return {};
    return (-2.0 * g.amplitude * std::exp(-e) / (g.sigma * g.sigma)) * d;
  }
  Vec2 operator()(const SmoothedEllipseBlob& e) const {
    const EllipseFrame f = to_frame(y, e.center, e.rotation);
    const Vec2 p = f.local;
    const double r = std::hypot(p.x / e.semi_x, p.y / e.semi_y);
    if (r >= 1.0 || r == 0.0) return {};
    const double ds = smooth_step_derivative((r - (1.0 - e.edge)) / e.edge) / e.edge;
    if (ds == 0.0) return {};
    const Vec2 dr_local{p.x / (e.semi_x * e.semi_x * r), p.y / (e.semi_y * e.semi_y * r)};
    return f.rot * ((e.amplitude * ds) * dr_local);
  }
  Vec2 operator()(const ConstantEllipse&) const { return {}; }
};

struct Reach {
  Vec2 c;
  double operator()(const SmoothBump& b) const { return distance(b.center, c) + b.radius; }
  double operator()(const GaussianBlob& g) const { return distance(g.center, c) + kGaussCut * g.sigma; }
  double operator()(const SmoothedEllipseBlob& e) const {
    return distance(e.center, c) + std::max(e.semi_x, e.semi_y);
  }
  double operator()(const ConstantEllipse& e) const { return distance(e.center, c) + std::max(e.semi_x, e.semi_y); }
};

void validate(const Phantom& phantom, const GridSpec& grid) {
  const double half = 0.5 * grid.extent();
  const Vec2 center = grid.origin + Vec2{half, half};
  for (const auto& c : phantom.components) {
    if (std::holds_alternative<ConstantEllipse>(c) && !phantom.allow_discontinuous)
      throw PreconditionError("discontinuous phantom components need allow_discontinuous");
    if (const auto* b = std::get_if<SmoothBump>(&c); b && !(b->radius > 0.0 && b->exponent > 0.0))
      throw PreconditionError("bump radius and exponent must be positive");
    if (const auto* g = std::get_if<GaussianBlob>(&c); g && !(g->sigma > 0.0))
      throw PreconditionError("gaussian sigma must be positive");
    if (const auto* e = std::get_if<SmoothedEllipseBlob>(&c);
        e && !(e->semi_x > 0.0 && e->semi_y > 0.0 && e->edge > 0.0 && e->edge <= 1.0))
      throw PreconditionError("ellipse blob needs positive semi-axes and edge in (0, 1]");
    const double reach = std::visit(Reach{center}, c);
    if (reach > half - 4.0 * grid.spacing)
      throw PreconditionError(component_name(c) + " reaches " + std::to_string(reach) +
                              " from the grid center; limit is " + std::to_string(half - 4.0 * grid.spacing));
  }
}

}  // namespace

double Phantom::value(Vec2 y) const {
  double v = 0.0;
  for (const auto& c : components) v += std::visit(Evaluator{y}, c);
  return v;
}

Vec2 Phantom::gradient(Vec2 y) const {
  Vec2 g;
  for (const auto& c : components) g += std::visit(Differentiator{y}, c);
  return g;
}

double Phantom::support_radius(Vec2 center) const {
  double r = 0.0;
  for (const auto& c : components) r = std::max(r, std::visit(Reach{center}, c));
  return r;
}

ScalarField2D rasterize(const Phantom& phantom, const GridSpec& grid) {
  validate(phantom, grid);
  ScalarField2D f(grid);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) f(i, j) = phantom.value(grid.node(i, j));
  return f;
}

std::pair<ScalarField2D, ScalarField2D> rasterize_gradient(const Phantom& phantom, const GridSpec& grid) {
  validate(phantom, grid);
  ScalarField2D gx(grid), gy(grid);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const Vec2 g = phantom.gradient(grid.node(i, j));
      gx(i, j) = g.x;
      gy(i, j) = g.y;
    }
  }
  return {std::move(gx), std::move(gy)};
}

Phantom head_phantom_components() {
  constexpr double deg = std::numbers::pi / 180.0;
  Phantom p;
  p.components = {
      SmoothedEllipseBlob{{0.0, 0.0}, 0.66, 0.86, 0.0, 0.6, 0.12},
      SmoothedEllipseBlob{{-0.22, 0.08}, 0.12, 0.28, 18.0 * deg, 0.35, 0.5},
      SmoothedEllipseBlob{{0.22, 0.08}, 0.12, 0.28, -18.0 * deg, 0.35, 0.5},
      SmoothBump{{0.0, 0.50}, 0.10, 0.4, 1.0},
      SmoothBump{{-0.16, -0.45}, 0.08, 0.4, 1.0},
      SmoothBump{{0.20, -0.40}, 0.06, 0.4, 1.0},
  };
  return p;
}

ScalarField2D head_phantom_like(const GridSpec& grid, double* scale) {
  ScalarField2D f = rasterize(head_phantom_components(), grid);
  const double peak = f.max_abs();
  const double s = peak > 0.0 ? 1.0 / peak : 1.0;
  f *= s;
  if (scale) *scale = s;
  return f;
}

std::string component_name(const PhantomComponent& c) {
  switch (c.index()) {
    case 0:
      return "bump";
    case 1:
      return "gaussian";
    case 2:
      return "ellipse";
    default:
      return "constant_ellipse";
  }
}

}  // namespace nbp
