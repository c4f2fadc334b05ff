#include "nbp/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nbp {

GridSpec GridSpec::covering_square(int n, double rho, Vec2 center) {
  if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes per side");
  if (!(rho > 0.0)) throw std::invalid_argument("grid half-width must be positive");
  return {n, 2.0 * rho / (n - 1), {center.x - rho, center.y - rho}};
}

GridSpec GridSpec::expanded(int cells) const {
  return {n + 2 * cells, spacing, {origin.x - cells * spacing, origin.y - cells * spacing}};
}

UniformGrid1D UniformGrid1D::symmetric(double half_width, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  const int half = static_cast<int>(std::ceil(half_width / step - 1e-9));
  return {-half * step, step, 2 * half + 1};
}

namespace {

void check_grid(const GridSpec& grid) {
  if (grid.n < 3) throw std::invalid_argument("ScalarField2D needs n >= 3");
  if (!(grid.spacing > 0.0)) throw std::invalid_argument("ScalarField2D needs spacing > 0");
}

}  // namespace

ScalarField2D::ScalarField2D(GridSpec grid)
    : grid_(grid) {
  check_grid(grid_);
  values_.assign(static_cast<std::size_t>(grid_.n) * grid_.n, 0.0);
}

ScalarField2D::ScalarField2D(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  check_grid(grid_);
  if (values_.size() != static_cast<std::size_t>(grid_.n) * grid_.n)
    throw std::invalid_argument("ScalarField2D value count does not match grid");
  if (!all_finite()) throw std::invalid_argument("ScalarField2D values must be finite");
}

double ScalarField2D::interpolate(Vec2 p) const {
  const int n = grid_.n;
  const double u = (p.x - grid_.origin.x) / grid_.spacing;
  const double v = (p.y - grid_.origin.y) / grid_.spacing;
  if (!(u >= 0.0 && v >= 0.0 && u <= n - 1 && v <= n - 1)) return 0.0;
  const int i = std::min(static_cast<int>(u), n - 2);
  const int j = std::min(static_cast<int>(v), n - 2);
  const double fu = u - i;
  const double fv = v - j;
  const double* r0 = values_.data() + static_cast<std::size_t>(i) * n + j;
  const double* r1 = r0 + n;
  return (1.0 - fu) * ((1.0 - fv) * r0[0] + fv * r0[1]) + fu * ((1.0 - fv) * r1[0] + fv * r1[1]);
}

double ScalarField2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField2D::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

bool ScalarField2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SupportDisk ScalarField2D::support() const {
  const int n = grid_.n;
  int imin = n, imax = -1, jmin = n, jmax = -1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((*this)(i, j) != 0.0) {
        imin = std::min(imin, i);
        imax = std::max(imax, i);
        jmin = std::min(jmin, j);
        jmax = std::max(jmax, j);
      }
    }
  }
  SupportDisk disk;
  if (imax < 0) return disk;
  disk.empty = false;
  disk.touches_edge = imin == 0 || jmin == 0 || imax == n - 1 || jmax == n - 1;
  disk.center = grid_.node(imin, jmin) + 0.5 * (grid_.node(imax, jmax) - grid_.node(imin, jmin));
  double r2 = 0.0;
  for (int i = imin; i <= imax; ++i) {
    for (int j = jmin; j <= jmax; ++j) {
      if ((*this)(i, j) != 0.0) {
        const Vec2 d = grid_.node(i, j) - disk.center;
        r2 = std::max(r2, dot(d, d));
      }
    }
  }
  // The interpolant of a nonzero node reaches one cell diagonal further.
  disk.radius = std::sqrt(r2) + std::sqrt(2.0) * grid_.spacing;
  return disk;
}

ScalarField2D& ScalarField2D::operator+=(const ScalarField2D& o) {
  if (!(o.grid_ == grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField2D& ScalarField2D::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b) {
  a += b;
  return a;
}

ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b) {
  ScalarField2D nb = b;
  nb *= -1.0;
  a += nb;
  return a;
}

ScalarField2D operator*(double s, ScalarField2D a) {
  a *= s;
  return a;
}

std::pair<ScalarField2D, ScalarField2D> centered_gradient(const ScalarField2D& f) {
  const int n = f.size();
  const double h = f.spacing();
  ScalarField2D gx(f.grid()), gy(f.grid());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == 0)
        gx(i, j) = (f(1, j) - f(0, j)) / h;
      else if (i == n - 1)
        gx(i, j) = (f(n - 1, j) - f(n - 2, j)) / h;
      else
        gx(i, j) = (f(i + 1, j) - f(i - 1, j)) / (2.0 * h);
      if (j == 0)
        gy(i, j) = (f(i, 1) - f(i, 0)) / h;
      else if (j == n - 1)
        gy(i, j) = (f(i, n - 1) - f(i, n - 2)) / h;
      else
        gy(i, j) = (f(i, j + 1) - f(i, j - 1)) / (2.0 * h);
    }
  }
  return {std::move(gx), std::move(gy)};
}

}  // namespace nbp
