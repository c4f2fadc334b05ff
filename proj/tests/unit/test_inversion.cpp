#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "nbp/errors.hpp"
#include "nbp/inversion.hpp"
#include "nbp/phantoms.hpp"

using namespace nbp;
using std::numbers::pi;

namespace {

double rel_error(const ScalarField2D& a, const ScalarField2D& truth) { return (a - truth).l2_norm() / truth.l2_norm(); }

// Cached clean traces of the bump phantom at a given grid size.
struct Case {
  GridSpec grid;
  ScalarField2D f;
  TraceMatrix u, d;
};

const Case& bump_case(int n) {
  static std::vector<std::pair<int, Case>> cache;
  for (const auto& [k, c] : cache)
    if (k == n) return c;
  const auto g = GridSpec::covering_square(n, 1.0, {});
  Phantom p;
  p.components = {SmoothBump{{0.1, -0.05}, 0.5, 1.0, 1.0}};
  const auto f = rasterize(p, g);
  auto [d1, d2] = rasterize_gradient(p, g);
  const auto det = build_circle_detectors(1.0, {}, g.spacing);
  auto u = solve_dirichlet_trace_oracle(f, det, g.spacing, 16.0);
  auto d = solve_neumann_trace_oracle(f, d1, d2, det, g.spacing, 16.0);
  cache.emplace_back(n, Case{g, f, std::move(u), std::move(d)});
  return cache.back().second;
}

TraceMatrix synthetic(double (*fn)(double), int m, double dt, double T) {
  TraceMatrix t(TraceKind::kNeumann, build_boundary_detectors(ConvexDomain::circle({}, 1.0), m),
                TimeGrid::covering(dt, T));
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < t.sample_count(); ++l) t(k, l) = fn(t.time().at(l));
  return t;
}

// int_l^T t^2 / sqrt(t^2 - l^2) dt
double quadratic_oracle(double l, double T) {
  auto prim = [l](double t) {
    const double r = std::sqrt(std::max(t * t - l * l, 0.0));
    return 0.5 * t * r + (l > 0 ? 0.5 * l * l * std::log(t + r) : 0.0);
  };
  return prim(T) - prim(l);
}

}  // namespace

TEST(Abel, ZeroData) {
  const auto t = synthetic([](double) { return 0.0; }, 8, 0.1, 3.0);
  for (auto rule : {AbelRule::kStep, AbelRule::kLinear})
    for (double v : accumulate_abel(t, rule).values) EXPECT_EQ(v, 0.0);
}

TEST(Abel, ImpulseAtFirstCell) {
  auto t = synthetic([](double) { return 0.0; }, 4, 0.1, 3.0);
  for (int k = 0; k < 4; ++k) t(k, 1) = 1.0;
  const auto A = accumulate_abel(t, AbelRule::kStep);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(A(k, 0), 1.0, 1e-14);
}

TEST(Abel, LastSampleHasEmptySum) {
  const auto t = synthetic([](double x) { return std::cos(x); }, 4, 0.05, 2.0);
  const int L = t.sample_count();
  for (auto rule : {AbelRule::kStep, AbelRule::kLinear}) {
    const auto A = accumulate_abel(t, rule);
    for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(A(k, L - 1)), t.dt() * t.max_abs());
  }
}

TEST(Abel, ExactForConstantRatio) {
  // d = t: integral is sqrt(T^2 - t_l^2) for both rules
  const auto t = synthetic([](double x) { return x; }, 3, 0.01, 2.0);
  const double T = t.time().final_time();
  for (auto rule : {AbelRule::kStep, AbelRule::kLinear}) {
    const auto A = accumulate_abel(t, rule);
    // the linear rule uses Gauss moments away from the singular cell
    const bool linear = rule == AbelRule::kLinear;
    for (int l = 0; l < t.sample_count(); l += 17)
      EXPECT_NEAR(A(1, l), std::sqrt(T * T - std::pow(l * 0.01, 2)), linear ? 1e-10 : 1e-12) << l;
  }
}

TEST(Abel, LinearRuleExactForLinearRatio) {
  const auto t = synthetic([](double x) { return x * x; }, 3, 0.01, 2.0);
  const double T = t.time().final_time();
  const auto A = accumulate_abel(t, AbelRule::kLinear);
  for (int l = 0; l < t.sample_count(); l += 13) EXPECT_NEAR(A(2, l), quadratic_oracle(l * 0.01, T), 1e-10) << l;
}

TEST(Abel, SmoothDataAgainstClosedForm) {
  // int_{t_l}^inf t e^{-t^2} / sqrt(t^2 - t_l^2) dt = (sqrt(pi) / 2) e^{-t_l^2}
  const auto t = synthetic([](double x) { return x * std::exp(-x * x); }, 3, 0.002, 8.0);
  const int L = t.sample_count();
  for (auto rule : {AbelRule::kStep, AbelRule::kLinear}) {
    const auto A = accumulate_abel(t, rule);
    for (int l : {0, L / 16, L / 8, L / 4}) {
      const double tl = t.time().at(l);
      const double exact = 0.5 * std::sqrt(pi) * std::exp(-tl * tl);
      // the step rule is first order in dt
      EXPECT_NEAR(A(0, l) / exact, 1.0, rule == AbelRule::kStep ? 3 * t.dt() : 1e-5) << to_string(rule) << " l=" << l;
    }
  }
}

TEST(Abel, RawArrayMatchesTrace) {
  const auto t = synthetic([](double x) { return std::sin(3 * x); }, 5, 0.02, 2.0);
  const auto a = accumulate_abel(t, AbelRule::kLinear);
  const auto b = accumulate_abel(t.values(), t.detectors(), t.time(), AbelRule::kLinear);
  EXPECT_EQ(a.values, b.values);
  const std::vector<double> wrong(7, 0.0);
  EXPECT_THROW(accumulate_abel(wrong, t.detectors(), t.time()), std::invalid_argument);
}

TEST(Backproject, ZeroAndConstantAccumulators) {
  const auto det = build_circle_detectors(1.0, {}, 0.05);
  const TimeGrid time = TimeGrid::covering(0.05, 3.0);
  AbelAccumulator A{det, time, std::vector<double>(static_cast<std::size_t>(det.size()) * time.count, 0.0)};
  const auto g = GridSpec::covering_square(41, 1.0, {});
  EXPECT_EQ(backproject(A, g, 1.0 / pi).max_abs(), 0.0);

  std::fill(A.values.begin(), A.values.end(), 1.0);
  double perimeter = 0.0;
  for (double w : det.weights()) perimeter += w;
  const auto img = backproject(A, g, 1.0 / pi);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const Vec2 x = g.node(i, j);
      if (norm(x) < 0.98) {
        EXPECT_NEAR(img(i, j), perimeter / pi, 1e-12);
      }
      if (norm(x) > 1.0 + 1e-9) {
        EXPECT_EQ(img(i, j), 0.0);
      }
    }
}

TEST(Backproject, PointEvaluationMatchesGrid) {
  const auto& c = bump_case(101);
  const auto A = accumulate_abel(c.d, AbelRule::kLinear);
  const auto img = backproject(A, c.grid, 1.0 / pi);
  const std::vector<Vec2> pts{c.grid.node(50, 50), c.grid.node(30, 61), c.grid.node(70, 20)};
  const auto v = backproject_at(A, pts, 1.0 / pi);
  EXPECT_NEAR(v[0], img(50, 50), 1e-13);
  EXPECT_NEAR(v[1], img(30, 61), 1e-13);
  EXPECT_NEAR(v[2], img(70, 20), 1e-13);
}

TEST(Neumann, ZeroTraceGivesZero) {
  const auto& c = bump_case(101);
  TraceMatrix zero(TraceKind::kNeumann, c.d.detectors(), c.d.time());
  EXPECT_EQ(reconstruct_neumann(zero, c.grid).max_abs(), 0.0);
}

TEST(Neumann, CoarseReconstruction) {
  const auto& c = bump_case(101);
  ReconstructionOptions o;
  o.abel_rule = AbelRule::kLinear;
  EXPECT_LE(rel_error(reconstruct_neumann(c.d, c.grid, o), c.f), 0.10);
}

TEST(Neumann, RangeConditionOnDirichletData) {
  const auto& c = bump_case(101);
  ReconstructionOptions o;
  o.allow_kind_mismatch = true;
  EXPECT_LE(reconstruct_neumann(c.u, c.grid, o).max_abs(), 0.05 * c.f.max_abs());
  EXPECT_THROW(reconstruct_neumann(c.u, c.grid), std::invalid_argument);
}

TEST(Neumann, RejectsGeneralDomain) {
  const auto se = ConvexDomain::smoothed_superellipse(1.0, 0.9);
  TraceMatrix t(TraceKind::kNeumann, build_detectors(se, 0.05), TimeGrid::covering(0.05, 2.0));
  EXPECT_THROW(reconstruct_neumann(t, GridSpec::covering_square(41, 1.2, {})), PreconditionError);
}

TEST(Neumann, Linearity) {
  const auto& c = bump_case(101);
  TraceMatrix sum(TraceKind::kNeumann, c.d.detectors(), c.d.time());
  TraceMatrix other(TraceKind::kNeumann, c.d.detectors(), c.d.time());
  for (std::size_t i = 0; i < sum.values().size(); ++i) {
    other.values()[i] = std::sin(0.001 * static_cast<double>(i));
    sum.values()[i] = 2.0 * c.d.values()[i] - 0.5 * other.values()[i];
  }
  const auto a = reconstruct_neumann(c.d, c.grid);
  const auto b = reconstruct_neumann(other, c.grid);
  const auto s = reconstruct_neumann(sum, c.grid);
  for (std::size_t i = 0; i < s.values().size(); ++i)
    ASSERT_NEAR(s.values()[i], 2.0 * a.values()[i] - 0.5 * b.values()[i], 1e-10);
}

TEST(Mixed, DegeneratesToNeumannBitwise) {
  const auto& c = bump_case(101);
  const auto m = make_mixed_trace(c.u, c.d, 0.0, 1.0);
  for (auto rule : {AbelRule::kStep, AbelRule::kLinear}) {
    ReconstructionOptions o;
    o.abel_rule = rule;
    const auto a = reconstruct_mixed(m, c.grid, o);
    const auto b = reconstruct_neumann(c.d, c.grid, o);
    for (std::size_t i = 0; i < a.values().size(); ++i) ASSERT_EQ(a.values()[i], b.values()[i]);
  }
}

TEST(Mixed, ScaleInvariance) {
  const auto& c = bump_case(101);
  const double b = 2 * c.grid.spacing;
  const auto m1 = make_mixed_trace(c.u, c.d, 1.0, b);
  const auto m2 = make_mixed_trace(c.u, c.d, 3.0, 3.0 * b);
  const auto r1 = reconstruct_mixed(m1, c.grid);
  const auto r2 = reconstruct_mixed(m2, c.grid);
  for (std::size_t i = 0; i < r1.values().size(); ++i) ASSERT_NEAR(r1.values()[i], r2.values()[i], 1e-12);
}

TEST(Mixed, CoarseReconstruction) {
  const auto& c = bump_case(101);
  ReconstructionOptions o;
  o.abel_rule = AbelRule::kLinear;
  const auto m = make_mixed_trace(c.u, c.d, 1.0, 2 * c.grid.spacing);
  EXPECT_LE(rel_error(reconstruct_mixed(m, c.grid, o), c.f), 0.15);
  TraceMatrix zero(TraceKind::kMixed, m.detectors(), m.time());
  zero.set_mixed_weights(1.0, 0.1);
  EXPECT_EQ(reconstruct_mixed(zero, c.grid).max_abs(), 0.0);
}

TEST(Mixed, Preconditions) {
  const auto& c = bump_case(101);
  EXPECT_THROW(reconstruct_mixed(make_mixed_trace(c.u, c.d, 1.0, 0.0), c.grid), PreconditionError);
  EXPECT_THROW(reconstruct_mixed(make_mixed_trace(c.u, c.d, -1.0, 1.0), c.grid), PreconditionError);
  const auto det = build_ellipse_detectors(1.2, 0.8, Mat2::identity(), {}, 200);
  TraceMatrix t(TraceKind::kMixed, det, TimeGrid::covering(0.05, 2.0));
  t.set_mixed_weights(1.0, 0.1);
  EXPECT_THROW(reconstruct_mixed(t, GridSpec::covering_square(41, 1.2, {})), PreconditionError);
}

TEST(DirichletUbp, RatioDerivative) {
  // u = t^2 gives u / t = t, derivative 1 everywhere
  auto t = synthetic([](double x) { return x * x; }, 3, 0.01, 1.0);
  TraceMatrix u(TraceKind::kDirichlet, t.detectors(), t.time());
  std::copy(t.values().begin(), t.values().end(), u.values().begin());
  for (double q : time_derivative_of_ratio(u)) EXPECT_NEAR(q, 1.0, 1e-10);
}

TEST(DirichletUbp, ShapeAndSymmetry) {
  const auto& c = bump_case(101);
  const auto zero_u = TraceMatrix(TraceKind::kDirichlet, c.u.detectors(), c.u.time());
  EXPECT_EQ(reconstruct_dirichlet_ubp(zero_u, c.grid).max_abs(), 0.0);

  const auto g = c.grid;
  Phantom p;
  p.components = {SmoothBump{{0.0, 0.0}, 0.5, 1.0, 1.0}};
  const auto f = rasterize(p, g);
  const auto u = solve_dirichlet_trace_oracle(f, c.u.detectors(), g.spacing, 16.0);
  ReconstructionOptions o;
  o.abel_rule = AbelRule::kLinear;
  const auto rec = reconstruct_dirichlet_ubp(u, g, 1.0, o);
  const double peak = rec.max_abs();
  const int mid = g.n / 2;
  for (int a = 0; a <= 30; a += 3)
    for (int b = 0; b <= a; b += 5) {
      const double vals[] = {rec(mid + a, mid + b), rec(mid - a, mid + b), rec(mid + b, mid + a),
                             rec(mid - b, mid - a), rec(mid + a, mid - b)};
      const auto [lo, hi] = std::minmax_element(std::begin(vals), std::end(vals));
      EXPECT_LE(*hi - *lo, 1e-3 * peak) << a << " " << b;
    }
}
