#include "nbp/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "nbp/errors.hpp"

namespace nbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// 1 on [0, 1/2], 0 on [1, inf), C-infinity in between.
double near_weight(double q) {
  if (q <= 0.5) return 1.0;
  if (q >= 1.0) return 0.0;
  const double x = 2.0 * q - 1.0;
  const double a = psi(1.0 - x), b = psi(x);
  return a / (a + b);
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

double KernelField::lookup(Vec2 theta, double s) const {
  const int n = table.directions();
  const UniformGrid1D& sg = table.s;
  double a = std::atan2(theta.y, theta.x);
  if (a < 0.0) a += kTwoPi;
  const double u = a / (kTwoPi / n);
  int i0 = static_cast<int>(std::floor(u));
  const double fu = u - i0;
  i0 %= n;
  const int i1 = (i0 + 1) % n;
  const double v = (s - sg.start) / sg.step;
  if (!(v >= 0.0) || v > sg.count - 1) return 0.0;
  const int j = std::min(static_cast<int>(v), sg.count - 2);
  const double fv = v - j;
  const double* r0 = table.values.data() + static_cast<std::size_t>(i0) * sg.count + j;
  const double* r1 = table.values.data() + static_cast<std::size_t>(i1) * sg.count + j;
  return (1.0 - fu) * ((1.0 - fv) * r0[0] + fv * r0[1]) + fu * ((1.0 - fv) * r1[0] + fv * r1[1]);
}

double KernelField::band_max_abs(double fraction) const {
  double m = 0.0;
  for (int i = 0; i < table.directions(); ++i) {
    const auto row = table.row(i);
    for (int j = 0; j < table.s.count; ++j)
      if (std::abs(table.s.at(j) - band_center[i]) <= fraction * band_half_width[i])
        m = std::max(m, std::abs(row[j]));
  }
  return m;
}

void KernelField::write_csv(std::ostream& out, int s_stride) const {
  if (s_stride < 1) throw std::invalid_argument("write_csv: stride must be positive");
  out << "theta,s,value\n" << std::setprecision(17);
  for (int i = 0; i < table.directions(); ++i)
    for (int j = 0; j < table.s.count; j += s_stride) out << table.angles[i] << ',' << table.s.at(j) << ',' << table.at(i, j) << '\n';
}

KernelField kernel_field(const ConvexDomain& domain, const KernelOptions& options) {
  if (options.n_theta < 4) throw std::invalid_argument("kernel_field needs at least 4 directions");
  if (!(options.ds > 0.0) || !(options.extent_factor >= 1.0))
    throw std::invalid_argument("kernel_field needs ds > 0 and extent_factor >= 1");
  KernelField k;
  k.stage = options.stage;
  const int n = options.n_theta;
  std::vector<double> angles(n);
  k.band_center.resize(n);
  k.band_half_width.resize(n);
  double reach = 0.0;
  for (int i = 0; i < n; ++i) {
    angles[i] = i * kTwoPi / n;
    const auto [lo, hi] = domain.support_interval(unit_vector(angles[i]));
    k.band_center[i] = 0.5 * (lo + hi);
    k.band_half_width[i] = 0.5 * (hi - lo);
    reach = std::max({reach, std::abs(lo), std::abs(hi)});
  }
  const UniformGrid1D s = UniformGrid1D::symmetric(options.extent_factor * reach, options.ds);
  k.table = radon_indicator_lines(domain, std::move(angles), s);
  bool warn = false;
#pragma omp parallel for schedule(dynamic) reduction(|| : warn)
  for (int i = 0; i < n; ++i) {
    auto row = k.table.row(i);
    HilbertResult h = hilbert_transform(row, options.hilbert);
    warn = warn || h.decay_warning;
    if (options.stage == KernelField::Stage::kHilbert) {
      std::copy(h.values.begin(), h.values.end(), row.begin());
    } else {
      const auto d2 = second_s_derivative(h.values, s.step);
      std::copy(d2.begin(), d2.end(), row.begin());
    }
  }
  k.decay_warning = warn;
  return k;
}

GeometryPair GeometryPair::of(Vec2 x, Vec2 y) {
  const Vec2 d = y - x;
  const double r = norm(d);
  if (r == 0.0) throw std::invalid_argument("GeometryPair undefined for x == y");
  return {d / r, (dot(y, y) - dot(x, x)) / (2.0 * r)};
}

namespace {

struct NearRule {
  std::vector<double> r_nodes, r_weights;
  std::vector<Vec2> directions;
};

NearRule make_near_rule(const ApplyKOptions& o) {
  NearRule rule;
  gauss_legendre(o.near_radial_nodes, rule.r_nodes, rule.r_weights);
  rule.directions.resize(o.near_angular_nodes);
  for (int m = 0; m < o.near_angular_nodes; ++m)
    rule.directions[m] = unit_vector((m + 0.5) * kTwoPi / o.near_angular_nodes);
  return rule;
}

}  // namespace

namespace detail {

// int f(y) k(n, s) / |x - y| dy without prefactor; with `absolute`, |f| and |k|.
double raw_kernel_integral(const ScalarField2D& f, const KernelField& kernel, Vec2 x, const ApplyKOptions& o,
                           bool absolute) {
  const NearRule rule = make_near_rule(o);
  auto val = [absolute](double v) { return absolute ? std::abs(v) : v; };
  const GridSpec& g = f.grid();
  const double h = g.spacing;
  const double rho = o.near_cells * h;
  double far = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double fy = val(f(i, j));
      if (fy == 0.0) continue;
      const Vec2 y = g.node(i, j);
      const Vec2 d = y - x;
      const double r = norm(d);
      const double w = 1.0 - near_weight(r / rho);
      if (w == 0.0) continue;
      const Vec2 n = d / r;
      far += w * fy * val(kernel.lookup(n, dot(n, x + 0.5 * d))) / r;
    }
  }
  far *= h * h;
  // dy = r dr dphi cancels the 1 / r.
  double near = 0.0;
  const double dphi = kTwoPi / static_cast<double>(rule.directions.size());
  for (std::size_t a = 0; a < rule.r_nodes.size(); ++a) {
    const double r = rule.r_nodes[a] * rho;
    const double w = rule.r_weights[a] * rho * near_weight(r / rho) * dphi;
    for (const Vec2& n : rule.directions) {
      const Vec2 y = x + r * n;
      const double fy = val(f.interpolate(y));
      if (fy == 0.0) continue;
      near += w * fy * val(kernel.lookup(n, dot(n, x + 0.5 * r * n)));
    }
  }
  return far + near;
}

}  // namespace detail

double apply_K(const ScalarField2D& f, const ConvexDomain& domain, const KernelField& kernel, Vec2 x,
               const ApplyKOptions& options) {
  if (!domain.contains(x)) throw PreconditionError("apply_K: point outside the domain");
  if (kernel.stage != KernelField::Stage::kSecondDerivative)
    throw std::invalid_argument("apply_K needs the second-derivative kernel");
  return options.prefactor * detail::raw_kernel_integral(f, kernel, x, options, false);
}

std::vector<double> apply_K(const ScalarField2D& f, const ConvexDomain& domain, const KernelField& kernel,
                            std::span<const Vec2> points, const ApplyKOptions& options) {
  if (kernel.stage != KernelField::Stage::kSecondDerivative)
    throw std::invalid_argument("apply_K needs the second-derivative kernel");
  for (const Vec2& x : points)
    if (!domain.contains(x)) throw PreconditionError("apply_K: point outside the domain");
  std::vector<double> out(points.size());
  const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < n; ++p) out[p] = options.prefactor * detail::raw_kernel_integral(f, kernel, points[p], options, false);
  return out;
}

Theorem31Report check_theorem31(const ScalarField2D& f, const ConvexDomain& domain, const TraceMatrix& trace,
                                const KernelField& kernel, std::span<const Vec2> probes, AbelRule rule,
                                const ApplyKOptions& options) {
  if (trace.kind() != TraceKind::kNeumann) throw std::invalid_argument("check_theorem31 needs a Neumann trace");
  Theorem31Report report;
  report.f_max = f.max_abs();
  const AbelAccumulator A = accumulate_abel(trace, rule);
  const auto bp = backproject_at(A, probes, 1.0 / std::numbers::pi);
  const auto kf = apply_K(f, domain, kernel, probes, options);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    ProbeResidual r;
    r.point = probes[p];
    r.f = f.interpolate(probes[p]);
    r.backprojection = bp[p];
    r.correction = kf[p];
    r.residual = r.f - r.backprojection - r.correction;
    report.max_residual = std::max(report.max_residual, std::abs(r.residual));
    report.max_uncorrected = std::max(report.max_uncorrected, std::abs(r.f - r.backprojection));
    report.max_correction = std::max(report.max_correction, std::abs(r.correction));
    report.probes.push_back(r);
  }
  return report;
}

}  // namespace nbp
