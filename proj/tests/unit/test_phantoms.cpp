#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nbp/errors.hpp"
#include "nbp/phantoms.hpp"

using namespace nbp;

namespace {

Phantom single(PhantomComponent c) {
  Phantom p;
  p.components = {c};
  return p;
}

double max_fd_gradient_error(const Phantom& p, const GridSpec& g) {
  const auto f = rasterize(p, g);
  const auto [gx, gy] = rasterize_gradient(p, g);
  const double h2 = 2 * g.spacing;
  double worst = 0.0;
  for (int i = 1; i < g.n - 1; ++i)
    for (int j = 1; j < g.n - 1; ++j) {
      worst = std::max(worst, std::abs((f(i + 1, j) - f(i - 1, j)) / h2 - gx(i, j)));
      worst = std::max(worst, std::abs((f(i, j + 1) - f(i, j - 1)) / h2 - gy(i, j)));
    }
  return worst;
}

}  // namespace

TEST(Bump, ZeroAmplitude) {
  const auto f = rasterize(single(SmoothBump{{0, 0}, 0.5, 0.0, 1.0}), GridSpec::covering_square(51, 1.0, {}));
  EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(Bump, CenterValueAndGradient) {
  const SmoothBump b{{0.1, -0.2}, 0.5, 1.7, 1.0};
  const Phantom p = single(b);
  EXPECT_DOUBLE_EQ(p.value(b.center), 1.7);
  EXPECT_EQ(p.gradient(b.center).x, 0.0);
  EXPECT_EQ(p.gradient(b.center).y, 0.0);
  EXPECT_EQ(p.value(b.center + Vec2{0.5, 0.0}), 0.0);
}

TEST(Bump, Integral) {
  // adaptive 2D quadrature of exp(1 - 1 / (1 - (r / 0.5)^2)): 0.317028040281899
  const auto g = GridSpec::covering_square(401, 1.0, {});
  const auto f = rasterize(single(SmoothBump{{0, 0}, 0.5, 1.0, 1.0}), g);
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  EXPECT_NEAR(sum * g.spacing * g.spacing, 0.317028040281899, 1e-6);
}

TEST(Bump, GradientMatchesFiniteDifferences) {
  // centered differences converge at second order; the error at N = 401 is
  // 0.0164 (independent numpy check), well above 1e-3 near the bump flank
  const Phantom p = single(SmoothBump{{0.1, -0.05}, 0.5, 1.0, 1.0});
  const double e401 = max_fd_gradient_error(p, GridSpec::covering_square(401, 1.0, {}));
  const double e801 = max_fd_gradient_error(p, GridSpec::covering_square(801, 1.0, {}));
  EXPECT_NEAR(e401, 0.0163708, 1e-5);
  EXPECT_NEAR(e401 / e801, 4.0, 0.3);
}

TEST(Components, AnalyticGradients) {
  const PhantomComponent parts[] = {SmoothBump{{0.1, -0.05}, 0.5, 1.3, 2.0}, GaussianBlob{{0.1, 0.0}, 0.12, 0.8},
                                    SmoothedEllipseBlob{{0.0, 0.1}, 0.5, 0.3, 0.4, 1.0, 0.4}};
  const double h = 1e-6;
  for (const auto& c : parts) {
    const Phantom p = single(c);
    double worst = 0.0, scale = 0.0;
    for (double a = 0.05; a < 6.2; a += 0.3)
      for (double r : {0.02, 0.1, 0.2, 0.3, 0.42}) {
        const Vec2 y = Vec2{0.05, 0.0} + unit_vector(a) * r;
        const Vec2 g = p.gradient(y);
        const double fx = (p.value(y + Vec2{h, 0}) - p.value(y - Vec2{h, 0})) / (2 * h);
        const double fy = (p.value(y + Vec2{0, h}) - p.value(y - Vec2{0, h})) / (2 * h);
        worst = std::max({worst, std::abs(fx - g.x), std::abs(fy - g.y)});
        scale = std::max(scale, norm(g));
      }
    EXPECT_LE(worst, 1e-6 * scale) << component_name(c);
  }
}

TEST(Gaussian, WideBlobRejected) {
  const auto g = GridSpec::covering_square(201, 1.0, {});
  EXPECT_THROW(rasterize(single(GaussianBlob{{0, 0}, 0.2, 1.0}), g), PreconditionError);
  const auto f = rasterize(single(GaussianBlob{{0, 0}, 0.15, 1.0}), g);
  EXPECT_DOUBLE_EQ(f.max_abs(), 1.0);
}

TEST(SupportMargin, ZeroNearTheRim) {
  const auto g = GridSpec::covering_square(101, 1.0, {});
  Phantom p;
  p.components = {SmoothBump{{0.3, 0.2}, 0.5, 1.0, 1.0}, GaussianBlob{{-0.2, 0.1}, 0.1, 0.5},
                  SmoothedEllipseBlob{{0.0, -0.3}, 0.4, 0.2, 0.3, 0.7, 0.3}};
  const auto f = rasterize(p, g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (norm(g.node(i, j)) >= 1.0 - 4 * g.spacing) {
        EXPECT_EQ(f(i, j), 0.0);
      }
  EXPECT_THROW(rasterize(single(SmoothBump{{0.6, 0.0}, 0.4, 1.0, 1.0}), g), PreconditionError);
}

TEST(Rasterize, LinearInAmplitudes) {
  const auto g = GridSpec::covering_square(81, 1.0, {});
  const auto a = rasterize(single(SmoothBump{{0.2, 0.1}, 0.4, 1.0, 1.0}), g);
  const auto b = rasterize(single(SmoothedEllipseBlob{{-0.2, 0.0}, 0.3, 0.2, 0.0, 1.0, 0.3}), g);
  Phantom both;
  both.components = {SmoothBump{{0.2, 0.1}, 0.4, 2.5, 1.0}, SmoothedEllipseBlob{{-0.2, 0.0}, 0.3, 0.2, 0.0, -0.5, 0.3}};
  const auto c = rasterize(both, g);
  for (std::size_t i = 0; i < c.values().size(); ++i)
    EXPECT_NEAR(c.values()[i], 2.5 * a.values()[i] - 0.5 * b.values()[i], 1e-14);
}

TEST(ConstantEllipse, GatedBehindFlag) {
  const auto g = GridSpec::covering_square(51, 1.0, {});
  Phantom p = single(ConstantEllipse{{0, 0}, 0.4, 0.2, 0.0, 1.0});
  EXPECT_THROW(rasterize(p, g), PreconditionError);
  p.allow_discontinuous = true;
  EXPECT_DOUBLE_EQ(rasterize(p, g).max_abs(), 1.0);
}

TEST(HeadPhantom, NormalizedInsideWithMargin) {
  const auto g = GridSpec::covering_square(301, 1.0, {});
  double scale = 0.0;
  const auto f = head_phantom_like(g, &scale);
  EXPECT_DOUBLE_EQ(f.max_abs(), 1.0);
  EXPECT_GT(scale, 0.0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (norm(g.node(i, j)) >= 1.0 - 4 * g.spacing) {
        ASSERT_EQ(f(i, j), 0.0);
      }
  const auto again = head_phantom_like(g);
  for (std::size_t i = 0; i < f.values().size(); ++i) ASSERT_EQ(f.values()[i], again.values()[i]);
  EXPECT_EQ(head_phantom_components().components.size(), 6u);
}
