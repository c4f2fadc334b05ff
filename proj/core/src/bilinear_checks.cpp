#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nbp/errors.hpp"
#include "nbp/kernel.hpp"

namespace nbp {

namespace detail {
double raw_kernel_integral(const ScalarField2D& f, const KernelField& kernel, Vec2 x, const ApplyKOptions& o,
                           bool absolute);
}

namespace {

struct WeightedPoints {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

// Lattice nodes (every stride-th) whose cells meet the domain, weighted by the
// covered cell area from a 4 x 4 sub-sample.
WeightedPoints domain_quadrature(const GridSpec& grid, const ConvexDomain& domain, int stride) {
  constexpr int kSub = 4;
  WeightedPoints q;
  const double h = grid.spacing * stride;
  for (int i = 0; i < grid.n; i += stride) {
    for (int j = 0; j < grid.n; j += stride) {
      const Vec2 c = grid.node(i, j);
      int inside = 0;
      for (int a = 0; a < kSub; ++a)
        for (int b = 0; b < kSub; ++b)
          inside += domain.contains(c + Vec2{((a + 0.5) / kSub - 0.5) * h, ((b + 0.5) / kSub - 0.5) * h});
      if (inside == 0) continue;
      q.points.push_back(c);
      q.weights.push_back(h * h * inside / (kSub * kSub));
    }
  }
  return q;
}

double lattice_mass(const ScalarField2D& f) {
  double m = 0.0;
  for (double v : f.values()) m += v;
  return m * f.spacing() * f.spacing();
}

void check_same_grid(const ScalarField2D& f, const ScalarField2D& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("bilinear check: f and g live on different grids");
}

void finish(IdentityReport& r) {
  const double gap = std::abs(r.lhs - r.rhs);
  r.relative_gap = r.lhs != 0.0 ? gap / std::abs(r.lhs) : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.normalized_gap = r.scale > 0.0 ? gap / r.scale : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
}

// sum_x w(x) c(x) int f(y) k / |x - y| dy over the nodes where c != 0, and the
// same with absolute values.
std::pair<double, double> kernel_pairing(const ScalarField2D& c, const ScalarField2D& f, const KernelField& kernel,
                                         const ApplyKOptions& o) {
  const GridSpec& g = c.grid();
  std::vector<Vec2> pts;
  std::vector<double> cv;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (c(i, j) != 0.0) {
        pts.push_back(g.node(i, j));
        cv.push_back(c(i, j));
      }
  const int n = static_cast<int>(pts.size());
  std::vector<double> val(n), mag(n);
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < n; ++p) {
    val[p] = cv[p] * detail::raw_kernel_integral(f, kernel, pts[p], o, false);
    mag[p] = std::abs(cv[p]) * detail::raw_kernel_integral(f, kernel, pts[p], o, true);
  }
  double s = 0.0, a = 0.0;
  for (int p = 0; p < n; ++p) {
    s += val[p];
    a += mag[p];
  }
  const double h2 = g.spacing * g.spacing;
  return {s * h2, a * h2};
}

double trapezoid_product(const double* a, const double* b, int count, double dt) {
  if (count < 2) return 0.0;
  double s = 0.5 * (a[0] * b[0] + a[count - 1] * b[count - 1]);
  for (int l = 1; l < count - 1; ++l) s += a[l] * b[l];
  return s * dt;
}

}  // namespace

IdentityReport check_lemma22(const ScalarField2D& f, const ScalarField2D& g, const ConvexDomain& domain,
                             const KernelField& hilbert_kernel, const IdentityOptions& options) {
  check_same_grid(f, g);
  if (hilbert_kernel.stage != KernelField::Stage::kHilbert)
    throw std::invalid_argument("check_lemma22 needs the Hilbert-stage kernel");
  if (options.stride < 1 || !(options.final_time > 0.0))
    throw std::invalid_argument("check_lemma22: stride >= 1 and final_time > 0 required");
  IdentityReport r;
  r.grid_n = f.size();
  r.dt = f.spacing();
  const TimeGrid time = TimeGrid::covering(r.dt, options.final_time);
  r.final_time = time.final_time();

  const WeightedPoints q = domain_quadrature(f.grid(), domain, options.stride);
  constexpr std::size_t kChunk = 256;
  double lhs = 0.0;
  double area = 0.0;
  for (std::size_t start = 0; start < q.points.size(); start += kChunk) {
    const std::size_t stop = std::min(q.points.size(), start + kChunk);
    const std::span<const Vec2> pts(q.points.data() + start, stop - start);
    const auto u = wave_solution_at_points(f, pts, time, InitialData::kDisplacement, options.oracle);
    const auto v = wave_solution_at_points(g, pts, time, InitialData::kVelocity, options.oracle);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const std::size_t off = p * time.count;
      lhs += q.weights[start + p] * trapezoid_product(u.data() + off, v.data() + off, time.count, time.dt);
      area += q.weights[start + p];
    }
  }
  // u ~ -m_f / (2 pi t^2), v ~ m_g / (2 pi t) for large t.
  if (options.tail_correction) {
    const double T = time.final_time();
    lhs -= area * lattice_mass(f) * lattice_mass(g) / (8.0 * std::numbers::pi * std::numbers::pi * T * T);
  }
  r.lhs = lhs;

  const auto [pair, mag] = kernel_pairing(f, g, hilbert_kernel, options.apply_k);
  r.rhs = options.pairing_prefactor * pair;
  r.rhs_kernel = r.rhs;
  r.scale = std::abs(options.pairing_prefactor) * mag;
  finish(r);
  return r;
}

IdentityReport check_prop32(const ScalarField2D& f, const ScalarField2D& g, const ConvexDomain& domain,
                            const TraceMatrix& neumann_trace, const KernelField& kernel,
                            const IdentityOptions& options) {
  check_same_grid(f, g);
  if (neumann_trace.kind() != TraceKind::kNeumann) throw std::invalid_argument("check_prop32 needs a Neumann trace");
  if (kernel.stage != KernelField::Stage::kSecondDerivative)
    throw std::invalid_argument("check_prop32 needs the second-derivative kernel");
  IdentityReport r;
  r.grid_n = f.size();
  r.dt = neumann_trace.dt();
  r.final_time = neumann_trace.time().final_time();

  double fg = 0.0, ff = 0.0, gg = 0.0;
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    fg += fv[i] * gv[i];
    ff += fv[i] * fv[i];
    gg += gv[i] * gv[i];
  }
  const double h2 = f.spacing() * f.spacing();
  r.lhs = fg * h2;
  r.scale = std::sqrt(ff * h2) * std::sqrt(gg * h2);

  const DetectorArray& det = neumann_trace.detectors();
  const TimeGrid time = neumann_trace.time();
  const auto v = wave_solution_at_points(g, det.points(), time, InitialData::kVelocity, options.oracle);
  const auto w = det.weights();
  double boundary = 0.0;
  for (int k = 0; k < det.size(); ++k)
    boundary += w[k] * trapezoid_product(v.data() + static_cast<std::size_t>(k) * time.count,
                                         neumann_trace.row(k).data(), time.count, time.dt);
  r.rhs_boundary = 2.0 * boundary;

  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (g(i, j) != 0.0 && !domain.contains(g.node(i, j)))
        throw PreconditionError("check_prop32: g is not supported in the domain");
  r.rhs_kernel = options.apply_k.prefactor * kernel_pairing(g, f, kernel, options.apply_k).first;
  r.rhs = r.rhs_boundary + r.rhs_kernel;
  finish(r);
  return r;
}

}  // namespace nbp
