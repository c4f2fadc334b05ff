#include "nbp/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "nbp/errors.hpp"

namespace nbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::atomic<std::uint64_t> g_interpolations{0};

bool circle_inside_lattice(const GridSpec& g, Vec2 x, double r) {
  const double lo_x = g.origin.x, lo_y = g.origin.y;
  const double hi_x = lo_x + g.extent(), hi_y = lo_y + g.extent();
  return x.x - r >= lo_x && x.x + r <= hi_x && x.y - r >= lo_y && x.y + r <= hi_y;
}

void check_circle(const ScalarField2D& f, const SupportDisk& support, Vec2 x, double r) {
  if (support.empty || !support.touches_edge) return;
  if (!circle_inside_lattice(f.grid(), x, r))
    throw PreconditionError("circle leaves the lattice while the field is nonzero on its edge");
}

}  // namespace

ProfileOnLines::ProfileOnLines(std::vector<double> angles_, UniformGrid1D s_)
    : angles(std::move(angles_)), s(s_), values(angles.size() * static_cast<std::size_t>(s.count), 0.0) {}

double spherical_mean(const ScalarField2D& f, Vec2 x, double r, int n_angles) {
  if (!(r >= 0.0)) throw PreconditionError("spherical_mean: negative radius");
  if (n_angles < 8) throw PreconditionError("spherical_mean: need at least 8 angles");
  check_circle(f, f.support(), x, r);
  if (r == 0.0) {
    g_interpolations.fetch_add(1, std::memory_order_relaxed);
    return f.interpolate(x);
  }
  double sum = 0.0;
  for (int m = 0; m < n_angles; ++m) sum += f.interpolate(x + r * unit_vector(m * kTwoPi / n_angles));
  g_interpolations.fetch_add(static_cast<std::uint64_t>(n_angles), std::memory_order_relaxed);
  return sum / n_angles;
}

RadialProfile spherical_mean_profile(const ScalarField2D& f, Vec2 x, const UniformGrid1D& r, int n_angles) {
  if (r.count < 1) throw std::invalid_argument("spherical_mean_profile: empty radius grid");
  if (n_angles < 8) throw PreconditionError("spherical_mean_profile: need at least 8 angles");
  const SupportDisk support = f.support();
  RadialProfile out{r, std::vector<double>(r.count), std::vector<double>(r.count, 0.0)};
  std::uint64_t evaluations = 0;
  for (int j = 0; j < r.count; ++j) {
    const double rj = r.at(j);
    if (!(rj >= 0.0)) throw PreconditionError("spherical_mean_profile: negative radius");
    check_circle(f, support, x, rj);
    if (rj == 0.0) {
      out.mean[j] = f.interpolate(x);
      ++evaluations;
      continue;
    }
    double sum = 0.0;
    for (int m = 0; m < n_angles; ++m) sum += f.interpolate(x + rj * unit_vector(m * kTwoPi / n_angles));
    evaluations += n_angles;
    out.mean[j] = sum / n_angles;
  }
  g_interpolations.fetch_add(evaluations, std::memory_order_relaxed);
  const int n = r.count;
  const double h = r.step;
  const auto& m = out.mean;
  if (n >= 3) {
    for (int j = 1; j + 1 < n; ++j) out.derivative[j] = (m[j + 1] - m[j - 1]) / (2.0 * h);
    out.derivative[0] = (-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * h);
    out.derivative[n - 1] = (3.0 * m[n - 1] - 4.0 * m[n - 2] + m[n - 3]) / (2.0 * h);
  } else if (n == 2) {
    out.derivative[0] = out.derivative[1] = (m[1] - m[0]) / h;
  }
  return out;
}

SphericalMeanProfiler::SphericalMeanProfiler(const ScalarField2D& f, double arc_step, int min_nodes)
    : field_(&f), support_(f.support()), arc_step_(arc_step), min_nodes_(std::max(8, min_nodes)) {
  if (!(arc_step > 0.0)) throw std::invalid_argument("arc_step must be positive");
}

int SphericalMeanProfiler::nodes_for(double r) const {
  return std::max(min_nodes_, static_cast<int>(std::ceil(kTwoPi * r / arc_step_)));
}

double SphericalMeanProfiler::max_radius(Vec2 x) const {
  if (support_.empty) return 0.0;
  return distance(x, support_.center) + support_.radius;
}

void SphericalMeanProfiler::profile(Vec2 x, double dr, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (support_.empty) return;
  const ScalarField2D& f = *field_;
  const Vec2 to_center = support_.center - x;
  const double d = norm(to_center);
  const double a = support_.radius;
  const double alpha = d > 0.0 ? std::atan2(to_center.y, to_center.x) : 0.0;
  const Mat2 rot = Mat2::rotation(alpha);
  std::uint64_t evaluations = 0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double r = j * dr;
    if (r < d - a || r > d + a) continue;
    check_circle(f, support_, x, r);
    if (r == 0.0) {
      out[j] = f.interpolate(x);
      ++evaluations;
      continue;
    }
    const int n = nodes_for(r);
    // Half-opening of the arc inside the support disk.
    double beta = std::numbers::pi;
    if (d > 0.0 && r + d > a) {
      const double c = (r * r + d * d - a * a) / (2.0 * r * d);
      beta = std::acos(std::clamp(c, -1.0, 1.0));
    }
    const double step = kTwoPi / n;
    const int m_max = std::min(n / 2, static_cast<int>(beta / step) + 1);
    double sum = f.interpolate(x + r * (rot * Vec2{1.0, 0.0}));
    ++evaluations;
    for (int m = 1; m <= m_max; ++m) {
      const double c = std::cos(m * step);
      const double s = std::sin(m * step);
      sum += f.interpolate(x + r * (rot * Vec2{c, s}));
      // For even n the node at pi is shared by both sides.
      if (!(2 * m == n)) sum += f.interpolate(x + r * (rot * Vec2{c, -s}));
      evaluations += 2;
    }
    out[j] = sum / n;
  }
  g_interpolations.fetch_add(evaluations, std::memory_order_relaxed);
}

std::vector<double> radon_indicator_profile(const ConvexDomain& domain, Vec2 theta, const UniformGrid1D& s) {
  std::vector<double> grid(s.count), out(s.count);
  for (int j = 0; j < s.count; ++j) grid[j] = s.at(j);
  domain.chord_lengths(theta, grid, out);
  return out;
}

ProfileOnLines radon_indicator_lines(const ConvexDomain& domain, std::vector<double> angles, const UniformGrid1D& s) {
  ProfileOnLines p(std::move(angles), s);
  std::vector<double> grid(s.count);
  for (int j = 0; j < s.count; ++j) grid[j] = s.at(j);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < p.directions(); ++i) domain.chord_lengths(unit_vector(p.angles[i]), grid, p.row(i));
  return p;
}

HilbertResult hilbert_transform(std::span<const double> phi, const HilbertOptions& options) {
  const int n = static_cast<int>(phi.size());
  HilbertResult result;
  result.values.assign(n, 0.0);
  if (n == 0) return result;
  if (options.pad_factor < 1) throw std::invalid_argument("hilbert_transform: pad_factor must be >= 1");
  double peak = 0.0;
  for (double v : phi) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return result;
  result.decay_warning = std::abs(phi.front()) >= 1e-3 * peak || std::abs(phi.back()) >= 1e-3 * peak;

  const int padded = detail::good_fft_size(std::max(2, options.pad_factor * n));
  detail::RealFft1D fft(padded);
  auto buf = fft.real();
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(phi.begin(), phi.end(), buf.begin());
  fft.forward();
  auto spec = fft.spectrum();
  const double sigma = options.smoothing;
  const double scale = 1.0 / padded;
  for (int k = 0; k < fft.spectrum_size(); ++k) {
    const double xi = kTwoPi * k / padded;
    double gain = scale;
    if (sigma > 0.0) gain *= std::exp(-0.5 * xi * sigma * xi * sigma);
    if (k == 0 || 2 * k == padded) {
      spec[k] = 0.0;
    } else {
      // Multiply by -i for the non-negative frequencies; c2r supplies the conjugate half.
      spec[k] = std::complex<double>(spec[k].imag(), -spec[k].real()) * gain;
    }
  }
  fft.inverse();
  std::copy(buf.begin(), buf.begin() + n, result.values.begin());
  return result;
}

std::vector<double> second_s_derivative(std::span<const double> phi, double ds) {
  const int n = static_cast<int>(phi.size());
  if (n < 5) throw std::invalid_argument("second_s_derivative needs at least 5 samples");
  if (!(ds > 0.0)) throw std::invalid_argument("second_s_derivative needs ds > 0");
  std::vector<double> out(n);
  const double inv = 1.0 / (ds * ds);
  for (int j = 1; j + 1 < n; ++j) out[j] = (phi[j - 1] - 2.0 * phi[j] + phi[j + 1]) * inv;
  out[0] = (2.0 * phi[0] - 5.0 * phi[1] + 4.0 * phi[2] - phi[3]) * inv;
  out[n - 1] = (2.0 * phi[n - 1] - 5.0 * phi[n - 2] + 4.0 * phi[n - 3] - phi[n - 4]) * inv;
  return out;
}

std::uint64_t interpolation_count() { return g_interpolations.load(std::memory_order_relaxed); }
void reset_interpolation_count() { g_interpolations.store(0, std::memory_order_relaxed); }

}  // namespace nbp
