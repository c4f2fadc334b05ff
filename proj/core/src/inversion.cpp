#include "nbp/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "abel.hpp"
#include "nbp/errors.hpp"

namespace nbp {

namespace {

using detail::RowMatrix;

constexpr int kAbelBlock = 256;

double interp_linear(std::span<const double> a, double pos) {
  const int n = static_cast<int>(a.size());
  if (!(pos >= 0.0) || pos > n - 1) return 0.0;
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double f = pos - i;
  return (1.0 - f) * a[i] + f * a[i + 1];
}

// Keys cubic convolution (a = -1/2), linear in the first and last cell.
double interp_cubic(std::span<const double> a, double pos) {
  const int n = static_cast<int>(a.size());
  if (!(pos >= 0.0) || pos > n - 1) return 0.0;
  const int i = std::min(static_cast<int>(pos), n - 2);
  if (i == 0 || i + 2 >= n) return interp_linear(a, pos);
  const double t = pos - i;
  const double p0 = a[i - 1], p1 = a[i], p2 = a[i + 1], p3 = a[i + 2];
  return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

double interp(std::span<const double> a, double pos, Interpolation mode) {
  return mode == Interpolation::kLinear ? interp_linear(a, pos) : interp_cubic(a, pos);
}

void check_circle(const DetectorArray& det, const char* what) {
  if (det.domain().kind() != ConvexDomain::Kind::kCircle)
    throw PreconditionError(std::string(what) + " is only valid on circular domains");
}

void check_kind(const TraceMatrix& t, TraceKind expected, const ReconstructionOptions& o, const char* what) {
  if (t.kind() != expected && !o.allow_kind_mismatch)
    throw std::invalid_argument(std::string(what) + " expects " + to_string(expected) + " data, got " +
                                to_string(t.kind()) + " (mismatch experiments must be requested explicitly)");
}

// Sum over detectors at one point; `ubp` adds the factor <nu_k, x - y_k>.
double detector_sum(const AbelAccumulator& A, Vec2 x, Interpolation mode, bool ubp) {
  const auto pts = A.detectors.points();
  const auto nrm = A.detectors.normals();
  const auto w = A.detectors.weights();
  const double inv_dt = 1.0 / A.time.dt;
  double sum = 0.0;
  for (int k = 0; k < A.detectors.size(); ++k) {
    const Vec2 d = x - pts[k];
    double v = w[k] * interp(A.row(k), norm(d) * inv_dt, mode);
    if (ubp) v *= dot(nrm[k], d);
    sum += v;
  }
  return sum;
}

ScalarField2D backproject_impl(const AbelAccumulator& A, const GridSpec& grid, double prefactor, Interpolation mode,
                               bool ubp) {
  ScalarField2D out(grid);
  const ConvexDomain& domain = A.detectors.domain();
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const Vec2 x = grid.node(i, j);
      if (!domain.contains(x)) continue;
      out(i, j) = prefactor * detector_sum(A, x, mode, ubp);
    }
  }
  return out;
}

}  // namespace

const char* to_string(AbelRule rule) { return rule == AbelRule::kStep ? "step" : "linear"; }

AbelRule abel_rule_from_string(const std::string& s) {
  if (s == "step") return AbelRule::kStep;
  if (s == "linear") return AbelRule::kLinear;
  throw std::invalid_argument("unknown Abel rule '" + s + "'");
}

AbelAccumulator accumulate_abel(std::span<const double> d, const DetectorArray& detectors, TimeGrid time,
                                AbelRule rule) {
  const int m = detectors.size();
  const int L = time.count;
  if (d.size() != static_cast<std::size_t>(m) * L) throw std::invalid_argument("accumulate_abel: shape mismatch");
  AbelAccumulator A{detectors, time, std::vector<double>(d.size(), 0.0)};
  Eigen::Map<const RowMatrix> D(d.data(), m, L);
  Eigen::Map<RowMatrix> out(A.values.data(), m, L);
  // Block over output columns l; block [l0, l1) only touches samples s >= l0.
  RowMatrix weights;
  for (int l0 = 0; l0 < L - 1; l0 += kAbelBlock) {
    const int l1 = std::min(L - 1, l0 + kAbelBlock);
    const int first = l0;
    const int width = L - first;
    weights.setZero(l1 - l0, width);
    for (int l = l0; l < l1; ++l) {
      auto w = weights.row(l - l0);
      if (rule == AbelRule::kStep) {
        for (int s = l + 1; s < L; ++s) w(s - first) = detail::step_abel_weight(l, s - 1);
      } else {
        for (int j = l; j + 1 < L; ++j) {
          double left, right;
          detail::linear_abel_cell(l, j, left, right);
          // Sample s carries d / t_s; the 1 / t factor is folded in here (unit grid).
          // At t = 0 the ratio is extrapolated linearly from the next two samples.
          if (j > 0) {
            w(j - first) += left / j;
          } else if (L > 2) {
            w(1 - first) += 2.0 * left;
            w(2 - first) -= 0.5 * left;
          }
          w(j + 1 - first) += right / (j + 1);
        }
      }
    }
    out.middleCols(l0, l1 - l0).noalias() = D.rightCols(width) * weights.transpose();
  }
  return A;
}

AbelAccumulator accumulate_abel(const TraceMatrix& d, AbelRule rule) {
  return accumulate_abel(d.values(), d.detectors(), d.time(), rule);
}

ScalarField2D backproject(const AbelAccumulator& A, const GridSpec& grid, double prefactor,
                          Interpolation interpolation) {
  return backproject_impl(A, grid, prefactor, interpolation, false);
}

std::vector<double> backproject_at(const AbelAccumulator& A, std::span<const Vec2> points, double prefactor,
                                   Interpolation interpolation) {
  std::vector<double> out(points.size());
  const int n = static_cast<int>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (int p = 0; p < n; ++p) out[p] = prefactor * detector_sum(A, points[p], interpolation, false);
  return out;
}

ScalarField2D reconstruct_neumann(const TraceMatrix& d, const GridSpec& grid, const ReconstructionOptions& options) {
  check_kind(d, TraceKind::kNeumann, options, "reconstruct_neumann");
  if (d.detectors().domain().kind() == ConvexDomain::Kind::kGeneral)
    throw PreconditionError("the exact Neumann formula holds on circles and ellipses only");
  return backproject(accumulate_abel(d, options.abel_rule), grid, 1.0 / std::numbers::pi, options.interpolation);
}

ScalarField2D reconstruct_mixed(const TraceMatrix& m, const GridSpec& grid, const ReconstructionOptions& options) {
  check_kind(m, TraceKind::kMixed, options, "reconstruct_mixed");
  check_circle(m.detectors(), "the mixed-trace formula");
  if (!(m.b() > 0.0)) throw PreconditionError("the mixed-trace formula needs b > 0");
  if (m.a() < 0.0) throw PreconditionError("the mixed-trace formula needs a >= 0");
  return backproject(accumulate_abel(m, options.abel_rule), grid, 1.0 / (m.b() * std::numbers::pi), options.interpolation);
}

std::vector<double> time_derivative_of_ratio(const TraceMatrix& u) {
  const int m = u.detector_count();
  const int L = u.sample_count();
  const double dt = u.dt();
  std::vector<double> q(static_cast<std::size_t>(m) * L, 0.0);
  if (L < 2) return q;
  std::vector<double> ratio(L);
  for (int k = 0; k < m; ++k) {
    ratio[0] = 0.0;
    for (int l = 1; l < L; ++l) ratio[l] = u(k, l) / u.time().at(l);
    double* row = q.data() + static_cast<std::size_t>(k) * L;
    row[0] = (ratio[1] - ratio[0]) / dt;
    for (int l = 1; l + 1 < L; ++l) row[l] = (ratio[l + 1] - ratio[l - 1]) / (2.0 * dt);
    row[L - 1] = (ratio[L - 1] - ratio[L - 2]) / dt;
  }
  return q;
}

ScalarField2D reconstruct_dirichlet_ubp(const TraceMatrix& u, const GridSpec& grid, double scale,
                                        const ReconstructionOptions& options) {
  check_kind(u, TraceKind::kDirichlet, options, "reconstruct_dirichlet_ubp");
  check_circle(u.detectors(), "the Dirichlet back-projection");
  const auto q = time_derivative_of_ratio(u);
  const AbelAccumulator B = accumulate_abel(q, u.detectors(), u.time(), options.abel_rule);
  return backproject_impl(B, grid, scale, options.interpolation, true);
}

}  // namespace nbp
