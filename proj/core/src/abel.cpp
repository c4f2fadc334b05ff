#include "abel.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nbp::detail {

namespace {

// Six-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 6> kGaussNodes = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                               0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kGaussWeights = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                                 0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// sqrt(t^2 - b^2) - sqrt(t^2 - a^2) without cancellation, a <= b <= t.
double root_gap(double t, double a, double b) {
  const double ra = std::sqrt((t - a) * (t + a));
  const double rb = std::sqrt(std::max(0.0, (t - b) * (t + b)));
  return (b - a) * (b + a) / (ra + rb);
}

// Antiderivative of r^2 / sqrt(t^2 - r^2).
double second_moment_primitive(double t, double r) {
  const double q = std::sqrt(std::max(0.0, (t - r) * (t + r)));
  return 0.5 * t * t * std::asin(std::min(1.0, r / t)) - 0.5 * r * q;
}

}  // namespace

RowMatrix hat_abel_weights(int rows, int cols, int ratio) {
  if (rows < 1 || cols < 1 || ratio < 1) throw std::invalid_argument("hat_abel_weights: bad shape");
  RowMatrix p = RowMatrix::Zero(rows, cols);
  for (int l = 1; l < rows; ++l) {
    const double t = static_cast<double>(l) * ratio;
    const int cells = std::min(l * ratio, cols - 1);
    for (int j = 0; j < cells; ++j) {
      const double a = j, b = j + 1.0;
      double m0, m1;
      if (b <= 0.5 * t) {
        m0 = m1 = 0.0;
        for (int g = 0; g < 6; ++g) {
          const double r = a + 0.5 * (1.0 + kGaussNodes[g]);
          const double w = 0.5 * kGaussWeights[g] * r / std::sqrt(t * t - r * r);
          m0 += w;
          m1 += w * r;
        }
      } else {
        m0 = root_gap(t, a, b);
        m1 = second_moment_primitive(t, b) - second_moment_primitive(t, a);
      }
      p(l, j) += b * m0 - m1;
      p(l, j + 1) += m1 - a * m0;
    }
  }
  return p;
}

double step_abel_weight(int l, int j) {
  if (j < l) return 0.0;
  const double a = j, b = j + 1.0, t = l;
  // sqrt(b^2 - t^2) - sqrt(a^2 - t^2) in rationalized form.
  const double ra = std::sqrt((a - t) * (a + t));
  const double rb = std::sqrt((b - t) * (b + t));
  return (2.0 * j + 1.0) / (b * (ra + rb));
}

void linear_abel_cell(int l, int j, double& left, double& right) {
  const double c = l, a = j, b = j + 1.0;
  double m0, m1;  // int w dt, int (t - a) w dt
  if (l == 0) {
    m0 = 1.0;
    m1 = 0.5;
  } else if (j == l) {
    const double q = std::sqrt((b - c) * (b + c));
    m0 = q;
    // int t^2 / sqrt(t^2 - c^2) from c to b, then shift the first moment to a = c.
    const double second = 0.5 * b * q + 0.5 * c * c * std::log((b + q) / c);
    m1 = second - a * m0;
  } else {
    m0 = m1 = 0.0;
    for (int g = 0; g < 6; ++g) {
      const double x = 0.5 * (1.0 + kGaussNodes[g]);
      const double t = a + x;
      const double w = 0.5 * kGaussWeights[g] * t / std::sqrt((t - c) * (t + c));
      m0 += w;
      m1 += w * x;
    }
  }
  left = m0 - m1;
  right = m1;
}

}  // namespace nbp::detail
