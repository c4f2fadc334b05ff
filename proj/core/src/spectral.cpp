#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "nbp/errors.hpp"
#include "nbp/forward.hpp"

namespace nbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int padded_size(int n, int pad_factor) { return detail::good_fft_size(pad_factor * n); }

// Spectrum of f on the padded torus, kept for repeated propagation.
class Propagator {
 public:
  Propagator(const ScalarField2D& f, int pad_factor)
      : n_(f.size()), np_(padded_size(f.size(), pad_factor)), fft_(np_, np_), base_(fft_.spectrum().size()) {
    auto buf = fft_.real();
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) buf[static_cast<std::size_t>(i) * np_ + j] = f(i, j);
    fft_.forward();
    const auto spec = fft_.spectrum();
    std::copy(spec.begin(), spec.end(), base_.begin());
    const double h = f.spacing();
    const int nc = fft_.spectrum_cols();
    omega_.resize(base_.size());
    for (int a = 0; a < np_; ++a) {
      const int ka = a <= np_ / 2 ? a : a - np_;
      const double xa = kTwoPi * ka / (np_ * h);
      for (int b = 0; b < nc; ++b) {
        const double xb = kTwoPi * b / (np_ * h);
        omega_[static_cast<std::size_t>(a) * nc + b] = std::hypot(xa, xb);
      }
    }
  }

  /// Fills `out` (the original lattice) with u(., t).
  void evaluate(double t, ScalarField2D& out) {
    auto spec = fft_.spectrum();
    const double scale = 1.0 / (static_cast<double>(np_) * np_);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = base_[k] * (std::cos(omega_[k] * t) * scale);
    fft_.inverse();
    const auto buf = fft_.real();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out(i, j) = buf[static_cast<std::size_t>(i) * np_ + j];
  }

 private:
  int n_;
  int np_;
  detail::RealFft2D fft_;
  std::vector<std::complex<double>> base_;
  std::vector<double> omega_;
};

double time_limit(const ScalarField2D& f, int pad_factor) {
  const SupportDisk s = f.support();
  if (s.empty) return std::numeric_limits<double>::infinity();
  const GridSpec& g = f.grid();
  const double period = padded_size(g.n, pad_factor) * g.spacing;
  // Farthest axis offset from the support center to any lattice node.
  const double reach_x = std::max(s.center.x - g.origin.x, g.origin.x + g.extent() - s.center.x);
  const double reach_y = std::max(s.center.y - g.origin.y, g.origin.y + g.extent() - s.center.y);
  return period - s.radius - std::max(reach_x, reach_y) - 4.0 * g.spacing;
}

void check_times(const ScalarField2D& f, std::span<const double> times, const SpectralOptions& options,
                 bool& wrapped) {
  if (options.pad_factor < 1) throw std::invalid_argument("pad_factor must be >= 1");
  const double limit = time_limit(f, options.pad_factor);
  wrapped = false;
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("negative snapshot time");
    if (t > limit) wrapped = true;
  }
  if (wrapped && !options.allow_wrap)
    throw PreconditionError("requested time " + std::to_string(*std::max_element(times.begin(), times.end())) +
                            " exceeds the wrap-free limit " + std::to_string(limit) + "; raise pad_factor");
}

// Bilinear weights of a point on the lattice.
struct Stencil {
  int i, j;
  double fu, fv;
};

Stencil locate(const GridSpec& g, Vec2 p) {
  const double u = (p.x - g.origin.x) / g.spacing;
  const double v = (p.y - g.origin.y) / g.spacing;
  const int i = std::clamp(static_cast<int>(std::floor(u)), 0, g.n - 2);
  const int j = std::clamp(static_cast<int>(std::floor(v)), 0, g.n - 2);
  return {i, j, u - i, v - j};
}

double sample(const ScalarField2D& f, const Stencil& s) {
  return (1.0 - s.fu) * ((1.0 - s.fv) * f(s.i, s.j) + s.fv * f(s.i, s.j + 1)) +
         s.fu * ((1.0 - s.fv) * f(s.i + 1, s.j) + s.fv * f(s.i + 1, s.j + 1));
}

// Centered-difference gradient at the four stencil nodes, interpolated.
Vec2 sample_gradient(const ScalarField2D& f, const Stencil& s) {
  const double h2 = 2.0 * f.spacing();
  auto grad = [&](int i, int j) {
    return Vec2{(f(i + 1, j) - f(i - 1, j)) / h2, (f(i, j + 1) - f(i, j - 1)) / h2};
  };
  return (1.0 - s.fu) * ((1.0 - s.fv) * grad(s.i, s.j) + s.fv * grad(s.i, s.j + 1)) +
         s.fu * ((1.0 - s.fv) * grad(s.i + 1, s.j) + s.fv * grad(s.i + 1, s.j + 1));
}

std::vector<Stencil> detector_stencils(const GridSpec& g, const DetectorArray& detectors, int margin) {
  std::vector<Stencil> out;
  out.reserve(detectors.size());
  for (const Vec2& y : detectors.points()) {
    const double u = (y.x - g.origin.x) / g.spacing;
    const double v = (y.y - g.origin.y) / g.spacing;
    if (!(u >= margin && v >= margin && u <= g.n - 1 - margin && v <= g.n - 1 - margin))
      throw PreconditionError("detector closer than " + std::to_string(margin) + " cells to the lattice edge");
    out.push_back(locate(g, y));
  }
  return out;
}

}  // namespace

double spectral_time_limit(const ScalarField2D& f, int pad_factor) { return time_limit(f, pad_factor); }

Snapshots solve_wave_spectral(const ScalarField2D& f, std::span<const double> times, const SpectralOptions& options) {
  Snapshots out;
  check_times(f, times, options, out.wrapped);
  out.grid = f.grid();
  out.times.assign(times.begin(), times.end());
  Propagator prop(f, options.pad_factor);
  out.fields.reserve(times.size());
  for (double t : times) {
    ScalarField2D u(f.grid());
    if (t == 0.0)
      u = f;
    else
      prop.evaluate(t, u);
    out.fields.push_back(std::move(u));
  }
  return out;
}

ScalarField2D embed_with_margin(const ScalarField2D& f, int cells) {
  if (cells < 0) throw std::invalid_argument("margin must be non-negative");
  ScalarField2D out(f.grid().expanded(cells));
  for (int i = 0; i < f.size(); ++i)
    for (int j = 0; j < f.size(); ++j) out(i + cells, j + cells) = f(i, j);
  return out;
}

TraceMatrix dirichlet_trace_from_grid(const Snapshots& snapshots, const DetectorArray& detectors, double dt) {
  TraceMatrix trace(TraceKind::kDirichlet, detectors, {dt, static_cast<int>(snapshots.fields.size())});
  const auto stencils = detector_stencils(snapshots.grid, detectors, 0);
  for (int l = 0; l < trace.sample_count(); ++l)
    for (int k = 0; k < detectors.size(); ++k) trace(k, l) = sample(snapshots.fields[l], stencils[k]);
  return trace;
}

TraceMatrix neumann_trace_from_grid(const Snapshots& snapshots, const DetectorArray& detectors, double dt) {
  TraceMatrix trace(TraceKind::kNeumann, detectors, {dt, static_cast<int>(snapshots.fields.size())});
  const auto stencils = detector_stencils(snapshots.grid, detectors, 2);
  const auto normals = detectors.normals();
  for (int l = 0; l < trace.sample_count(); ++l)
    for (int k = 0; k < detectors.size(); ++k)
      trace(k, l) = dot(normals[k], sample_gradient(snapshots.fields[l], stencils[k]));
  return trace;
}

TracePair spectral_traces(const ScalarField2D& f, const DetectorArray& detectors, TimeGrid time,
                          const SpectralOptions& options) {
  std::vector<double> times(time.count);
  for (int l = 0; l < time.count; ++l) times[l] = time.at(l);
  bool wrapped = false;
  check_times(f, times, options, wrapped);
  const auto stencils = detector_stencils(f.grid(), detectors, 2);
  TracePair out{TraceMatrix(TraceKind::kDirichlet, detectors, time), TraceMatrix(TraceKind::kNeumann, detectors, time)};
  Propagator prop(f, options.pad_factor);
  ScalarField2D u(f.grid());
  const auto normals = detectors.normals();
  for (int l = 0; l < time.count; ++l) {
    if (l == 0)
      u = f;
    else
      prop.evaluate(time.at(l), u);
    for (int k = 0; k < detectors.size(); ++k) {
      out.dirichlet(k, l) = sample(u, stencils[k]);
      out.neumann(k, l) = dot(normals[k], sample_gradient(u, stencils[k]));
    }
  }
  return out;
}

}  // namespace nbp
