#include "nbp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nbp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPolygonVertices = 4096;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

}  // namespace

struct ConvexDomain::Impl {
  Kind kind = Kind::kCircle;
  Circle circle;
  Ellipse ellipse;
  BoundaryCurve curve;
  DomainDescription description;

  // Tabulated boundary at phi_i = i * 2pi / kPolygonVertices.
  std::vector<Vec2> polygon;
  // Polygon re-ordered by polar angle around `center`, for containment queries.
  std::vector<Vec2> sorted_vertices;
  std::vector<double> sorted_angles;
  Vec2 center;
  double area = 0.0;
  double perimeter = 0.0;
  double diameter = 0.0;
  double half_width = 0.0;

  Vec2 point(double phi) const {
    switch (kind) {
      case Kind::kCircle:
        return circle.center + circle.radius * unit_vector(phi);
      case Kind::kEllipse:
        return ellipse.center + ellipse.rotation * Vec2{ellipse.e1 * std::cos(phi), ellipse.e2 * std::sin(phi)};
      case Kind::kGeneral:
        return curve.point(phi);
    }
    return {};
  }

  Vec2 tangent(double phi) const {
    switch (kind) {
      case Kind::kCircle:
        return circle.radius * perp(unit_vector(phi));
      case Kind::kEllipse:
        return ellipse.rotation * Vec2{-ellipse.e1 * std::sin(phi), ellipse.e2 * std::cos(phi)};
      case Kind::kGeneral:
        return curve.tangent(phi);
    }
    return {};
  }

  // Largest <gamma(phi), theta>, refined from the tabulated polygon.
  double argmax_phi(Vec2 theta) const {
    int best = 0;
    double best_val = dot(polygon[0], theta);
    for (int i = 1; i < kPolygonVertices; ++i) {
      const double v = dot(polygon[i], theta);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    const double dphi = kTwoPi / kPolygonVertices;
    double lo = (best - 1) * dphi;
    double hi = (best + 1) * dphi;
    // d/dphi <gamma, theta> goes from positive to negative through the maximum.
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (dot(tangent(mid), theta) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Root of <gamma(phi), theta> = s on [a, b] where the left side is monotone
  // and changes sign. Safeguarded Newton, started from `guess` when it lies inside.
  double solve_on_arc(Vec2 theta, double s, double a, double b, double guess = NAN) const {
    double ga = dot(point(a), theta) - s;
    double lo = a, hi = b;
    const bool increasing = ga < 0.0;
    double phi = guess > lo && guess < hi ? guess : 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      const double g = dot(point(phi), theta) - s;
      if ((g < 0.0) == increasing)
        lo = phi;
      else
        hi = phi;
      if (g == 0.0 || hi - lo < 1e-14) break;
      const double dg = dot(tangent(phi), theta);
      double next = dg != 0.0 ? phi - g / dg : 0.5 * (lo + hi);
      if (std::abs(next - phi) < 1e-14) {
        phi = next;
        break;
      }
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      phi = next;
    }
    return phi;
  }

  std::pair<double, double> support(Vec2 theta) const {
    switch (kind) {
      case Kind::kCircle: {
        const double c = dot(circle.center, theta);
        return {c - circle.radius, c + circle.radius};
      }
      case Kind::kEllipse: {
        const Vec2 t = ellipse.rotation.transposed() * theta;
        const double e = std::sqrt(ellipse.e1 * ellipse.e1 * t.x * t.x + ellipse.e2 * ellipse.e2 * t.y * t.y);
        const double c = dot(ellipse.center, theta);
        return {c - e, c + e};
      }
      case Kind::kGeneral: {
        const double phi_max = argmax_phi(theta);
        const double phi_min = argmax_phi(-theta);
        return {dot(point(phi_min), theta), dot(point(phi_max), theta)};
      }
    }
    return {0.0, 0.0};
  }

  void chords(Vec2 theta, std::span<const double> s, std::span<double> out) const {
    switch (kind) {
      case Kind::kCircle: {
        const double c = dot(circle.center, theta);
        for (std::size_t k = 0; k < s.size(); ++k) {
          const double d = s[k] - c;
          const double q = circle.radius * circle.radius - d * d;
          out[k] = q > 0.0 ? 2.0 * std::sqrt(q) : 0.0;
        }
        return;
      }
      case Kind::kEllipse: {
        const Vec2 t = ellipse.rotation.transposed() * theta;
        const double e2 = ellipse.e1 * ellipse.e1 * t.x * t.x + ellipse.e2 * ellipse.e2 * t.y * t.y;
        const double c = dot(ellipse.center, theta);
        const double scale = 2.0 * ellipse.e1 * ellipse.e2 / e2;
        for (std::size_t k = 0; k < s.size(); ++k) {
          const double d = s[k] - c;
          const double q = e2 - d * d;
          out[k] = q > 0.0 ? scale * std::sqrt(q) : 0.0;
        }
        return;
      }
      case Kind::kGeneral: {
        double phi_max = argmax_phi(theta);
        double phi_min = argmax_phi(-theta);
        const double s_max = dot(point(phi_max), theta);
        const double s_min = dot(point(phi_min), theta);
        // Arc 1: phi_min -> phi_max (increasing), arc 2: phi_max -> phi_min + 2pi.
        phi_min = wrap_angle(phi_min);
        phi_max = wrap_angle(phi_max);
        if (phi_max < phi_min) phi_max += kTwoPi;
        double p1 = NAN, p2 = NAN;
        for (std::size_t k = 0; k < s.size(); ++k) {
          if (!(s[k] > s_min && s[k] < s_max)) {
            out[k] = 0.0;
            p1 = p2 = NAN;
            continue;
          }
          p1 = solve_on_arc(theta, s[k], phi_min, phi_max, p1);
          p2 = solve_on_arc(theta, s[k], phi_max, phi_min + kTwoPi, p2);
          out[k] = distance(point(p1), point(p2));
        }
        return;
      }
    }
  }

  void tabulate() {
    polygon.resize(kPolygonVertices);
    const double dphi = kTwoPi / kPolygonVertices;
    double twice_area = 0.0;
    double length = 0.0;
    for (int i = 0; i < kPolygonVertices; ++i) {
      const double phi = i * dphi;
      polygon[i] = point(phi);
      const Vec2 t = tangent(phi);
      twice_area += cross(polygon[i], t) * dphi;
      length += norm(t) * dphi;
    }
    area = 0.5 * twice_area;
    perimeter = length;
    Vec2 c;
    for (const Vec2& p : polygon) c += p;
    center = c / static_cast<double>(kPolygonVertices);

    std::vector<std::pair<double, Vec2>> by_angle(kPolygonVertices);
    for (int i = 0; i < kPolygonVertices; ++i) {
      const Vec2 d = polygon[i] - center;
      by_angle[i] = {std::atan2(d.y, d.x), polygon[i]};
    }
    std::sort(by_angle.begin(), by_angle.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    sorted_angles.resize(kPolygonVertices);
    sorted_vertices.resize(kPolygonVertices);
    for (int i = 0; i < kPolygonVertices; ++i) {
      sorted_angles[i] = by_angle[i].first;
      sorted_vertices[i] = by_angle[i].second;
    }

    diameter = 0.0;
    half_width = 0.0;
    for (int i = 0; i < 720; ++i) {
      const Vec2 theta = unit_vector(i * std::numbers::pi / 720.0);
      const auto [lo, hi] = support(theta);
      diameter = std::max(diameter, hi - lo);
    }
    for (const Vec2& axis : {Vec2{1, 0}, Vec2{0, 1}}) {
      const auto [lo, hi] = support(axis);
      half_width = std::max({half_width, std::abs(lo), std::abs(hi)});
    }
  }

  bool contains(Vec2 p) const {
    switch (kind) {
      case Kind::kCircle:
        return distance(p, circle.center) < circle.radius;
      case Kind::kEllipse: {
        const Vec2 q = ellipse.rotation.transposed() * (p - ellipse.center);
        const double a = q.x / ellipse.e1;
        const double b = q.y / ellipse.e2;
        return a * a + b * b < 1.0;
      }
      case Kind::kGeneral: {
        const Vec2 d = p - center;
        const double a = std::atan2(d.y, d.x);
        const int n = static_cast<int>(sorted_angles.size());
        auto it = std::upper_bound(sorted_angles.begin(), sorted_angles.end(), a);
        const int hi = static_cast<int>(it - sorted_angles.begin()) % n;
        const int lo = (hi + n - 1) % n;
        const Vec2 e = sorted_vertices[hi] - sorted_vertices[lo];
        return cross(e, p - sorted_vertices[lo]) > 0.0;
      }
    }
    return false;
  }
};

ConvexDomain ConvexDomain::circle(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kCircle;
  impl->circle = {center, radius};
  impl->description.kind = "circle";
  impl->description.center = center;
  impl->description.radius = radius;
  impl->tabulate();
  impl->area = std::numbers::pi * radius * radius;
  impl->perimeter = kTwoPi * radius;
  impl->diameter = 2.0 * radius;
  return ConvexDomain(std::move(impl));
}

ConvexDomain ConvexDomain::ellipse(double e1, double e2, Mat2 rotation, Vec2 center) {
  if (!(e1 > 0.0 && e2 > 0.0)) throw std::invalid_argument("ellipse semi-axes must be positive");
  const Mat2 g = rotation.transposed() * rotation;
  const double dev = std::max({std::abs(g.a11 - 1.0), std::abs(g.a12), std::abs(g.a21), std::abs(g.a22 - 1.0)});
  if (dev > 1e-12) throw std::invalid_argument("ellipse rotation must be orthogonal");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kEllipse;
  impl->ellipse = {e1, e2, rotation, center};
  impl->description.kind = "ellipse";
  impl->description.center = center;
  impl->description.e1 = e1;
  impl->description.e2 = e2;
  impl->description.rotation = std::atan2(rotation.a21, rotation.a11);
  impl->tabulate();
  impl->area = std::numbers::pi * e1 * e2;
  return ConvexDomain(std::move(impl));
}

ConvexDomain ConvexDomain::general(BoundaryCurve curve, DomainDescription description) {
  if (!curve.point || !curve.tangent) throw std::invalid_argument("boundary curve needs point and tangent callbacks");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kGeneral;
  impl->curve = std::move(curve);
  impl->description = std::move(description);
  // Consecutive tangents must turn one way (counter-clockwise).
  constexpr int kChecks = 2048;
  Vec2 prev = impl->curve.tangent(0.0);
  double turning = 0.0;
  for (int i = 1; i <= kChecks; ++i) {
    const Vec2 t = impl->curve.tangent(i * kTwoPi / kChecks);
    const double c = cross(prev, t);
    if (c < -1e-12 * dot(t, t)) throw std::invalid_argument("boundary curve is not convex and positively oriented");
    turning += std::atan2(c, dot(prev, t));
    prev = t;
  }
  if (std::abs(turning - kTwoPi) > 1e-6) throw std::invalid_argument("boundary curve must wind once counter-clockwise");
  impl->tabulate();
  return ConvexDomain(std::move(impl));
}

ConvexDomain ConvexDomain::smoothed_superellipse(double scale, double blend, double rotation, Vec2 center) {
  if (!(scale > 0.0)) throw std::invalid_argument("superellipse scale must be positive");
  if (!(blend >= 0.0 && blend <= 1.0)) throw std::invalid_argument("superellipse blend must lie in [0, 1]");
  const Mat2 q = Mat2::rotation(rotation);
  BoundaryCurve curve;
  curve.point = [=](double phi) {
    const double r = scale * std::pow((3.0 + blend * std::cos(4.0 * phi)) / 4.0, -0.25);
    return center + q * (r * unit_vector(phi));
  };
  curve.tangent = [=](double phi) {
    const double m = (3.0 + blend * std::cos(4.0 * phi)) / 4.0;
    const double r = scale * std::pow(m, -0.25);
    const double dr = scale * 0.25 * blend * std::sin(4.0 * phi) * std::pow(m, -1.25);
    return q * (dr * unit_vector(phi) + r * perp(unit_vector(phi)));
  };
  DomainDescription d;
  d.kind = "superellipse";
  d.center = center;
  d.scale = scale;
  d.blend = blend;
  d.rotation = rotation;
  return general(std::move(curve), d);
}

ConvexDomain ConvexDomain::from_description(const DomainDescription& d) {
  if (d.kind == "circle") return circle(d.center, d.radius);
  if (d.kind == "ellipse") return ellipse(d.e1, d.e2, Mat2::rotation(d.rotation), d.center);
  if (d.kind == "superellipse") return smoothed_superellipse(d.scale, d.blend, d.rotation, d.center);
  throw std::invalid_argument("cannot rebuild domain of kind '" + d.kind + "'");
}

ConvexDomain::Kind ConvexDomain::kind() const { return impl_->kind; }
const Circle* ConvexDomain::circle_shape() const { return impl_->kind == Kind::kCircle ? &impl_->circle : nullptr; }
const Ellipse* ConvexDomain::ellipse_shape() const {
  return impl_->kind == Kind::kEllipse ? &impl_->ellipse : nullptr;
}
const DomainDescription& ConvexDomain::description() const { return impl_->description; }
Vec2 ConvexDomain::boundary_point(double phi) const { return impl_->point(phi); }
Vec2 ConvexDomain::boundary_tangent(double phi) const { return impl_->tangent(phi); }

Vec2 ConvexDomain::outward_normal(double phi) const {
  if (impl_->kind == Kind::kCircle) return unit_vector(phi);
  if (impl_->kind == Kind::kEllipse) {
    const Ellipse& e = impl_->ellipse;
    return normalized(e.rotation * Vec2{e.e2 * std::cos(phi), e.e1 * std::sin(phi)});
  }
  // Positive orientation: the outward normal is the tangent turned clockwise.
  const Vec2 t = impl_->tangent(phi);
  return normalized(Vec2{t.y, -t.x});
}

bool ConvexDomain::contains(Vec2 p) const { return impl_->contains(p); }

double ConvexDomain::distance_to_boundary(Vec2 p) const {
  if (impl_->kind == Kind::kCircle) return std::abs(impl_->circle.radius - distance(p, impl_->circle.center));
  double best = std::numeric_limits<double>::infinity();
  const auto& poly = impl_->polygon;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const Vec2 e = b - a;
    const double t = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
    best = std::min(best, distance(p, a + t * e));
  }
  return best;
}

Vec2 ConvexDomain::center() const {
  if (impl_->kind == Kind::kCircle) return impl_->circle.center;
  if (impl_->kind == Kind::kEllipse) return impl_->ellipse.center;
  return impl_->center;
}

double ConvexDomain::area() const { return impl_->area; }
double ConvexDomain::perimeter() const { return impl_->perimeter; }
double ConvexDomain::diameter() const { return impl_->diameter; }
double ConvexDomain::bounding_half_width() const { return impl_->half_width; }

std::pair<double, double> ConvexDomain::support_interval(Vec2 theta) const { return impl_->support(theta); }

double ConvexDomain::chord_length(Vec2 theta, double s) const {
  double out = 0.0;
  impl_->chords(theta, std::span<const double>(&s, 1), std::span<double>(&out, 1));
  return out;
}

void ConvexDomain::chord_lengths(Vec2 theta, std::span<const double> s, std::span<double> out) const {
  if (out.size() != s.size()) throw std::invalid_argument("chord_lengths: output size mismatch");
  impl_->chords(theta, s, out);
}

DetectorArray::DetectorArray(ConvexDomain domain, std::vector<Vec2> points, std::vector<Vec2> normals,
                             std::vector<double> weights, WeightRule rule)
    : domain_(std::move(domain)),
      points_(std::move(points)),
      normals_(std::move(normals)),
      weights_(std::move(weights)),
      rule_(rule) {
  if (points_.size() != normals_.size() || points_.size() != weights_.size())
    throw std::invalid_argument("detector arrays must have equal length");
  if (points_.size() < 2) throw std::invalid_argument("need at least two detectors");
}

DetectorArray build_boundary_detectors(const ConvexDomain& domain, int m, WeightRule rule) {
  if (m < 3) throw std::invalid_argument("need at least three detectors");
  const double dphi = kTwoPi / (m - 1);
  std::vector<Vec2> points(m), normals(m);
  std::vector<double> weights(m);
  for (int k = 0; k < m; ++k) {
    const double phi = k * dphi;
    points[k] = domain.boundary_point(phi);
    normals[k] = domain.outward_normal(phi);
    weights[k] = norm(domain.boundary_tangent(phi)) * dphi;
  }
  if (rule == WeightRule::kTrapezoid) {
    weights.front() *= 0.5;
    weights.back() *= 0.5;
  }
  return DetectorArray(domain, std::move(points), std::move(normals), std::move(weights), rule);
}

DetectorArray build_circle_detectors(double rho, Vec2 center, double dx, WeightRule rule) {
  if (!(rho > 0.0) || !(dx > 0.0)) throw std::invalid_argument("circle detectors need rho > 0 and dx > 0");
  if (dx >= kTwoPi * rho) throw std::invalid_argument("dx >= 2 pi rho leaves fewer than two detectors");
  // Guard against ratios that are integers up to rounding.
  const int m = static_cast<int>(std::ceil(kTwoPi * rho / dx - 1e-9));
  if (m < 3) throw std::invalid_argument("circle needs at least three detectors");
  return build_boundary_detectors(ConvexDomain::circle(center, rho), m, rule);
}

DetectorArray build_ellipse_detectors(double e1, double e2, Mat2 rotation, Vec2 center, int m, WeightRule rule) {
  return build_boundary_detectors(ConvexDomain::ellipse(e1, e2, rotation, center), m, rule);
}

DetectorArray build_detectors(const ConvexDomain& domain, double dx, WeightRule rule) {
  if (const Circle* c = domain.circle_shape()) return build_circle_detectors(c->radius, c->center, dx, rule);
  if (!(dx > 0.0)) throw std::invalid_argument("dx must be positive");
  const int m = std::max(3, static_cast<int>(std::ceil(domain.perimeter() / dx - 1e-9)));
  return build_boundary_detectors(domain, m, rule);
}

const char* to_string(WeightRule rule) { return rule == WeightRule::kTrapezoid ? "trapezoid" : "paper"; }

WeightRule weight_rule_from_string(const std::string& s) {
  if (s == "trapezoid") return WeightRule::kTrapezoid;
  if (s == "paper") return WeightRule::kPaperEqual;
  throw std::invalid_argument("unknown detector weight rule '" + s + "'");
}

}  // namespace nbp
