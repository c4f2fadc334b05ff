#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nbp/vec2.hpp"

namespace nbp {

struct Circle {
  Vec2 center;
  double radius = 1.0;
};

/// Q * {x1^2/e1^2 + x2^2/e2^2 <= 1} + center.
struct Ellipse {
  double e1 = 1.0;
  double e2 = 1.0;
  Mat2 rotation;
  Vec2 center;
};

/// Smooth, positively oriented closed curve parametrized over [0, 2pi).
struct BoundaryCurve {
  std::function<Vec2(double)> point;
  std::function<Vec2(double)> tangent;
};

/// Flat description of a domain, enough to rebuild it (config files, sidecars).
struct DomainDescription {
  std::string kind = "circle";  // circle | ellipse | superellipse | general
  Vec2 center;
  double radius = 1.0;     // circle
  double e1 = 1.0;         // ellipse semi-axes
  double e2 = 1.0;
  double rotation = 0.0;   // radians, ellipse and superellipse
  double scale = 1.0;      // superellipse
  double blend = 0.9;      // superellipse: 0 = circle, 1 = x^4 + y^4 = 1
};

inline DomainDescription described_as(std::string kind) {
  DomainDescription d;
  d.kind = std::move(kind);
  return d;
}

/// Bounded convex domain with smooth boundary. Immutable; copies share state.
class ConvexDomain {
 public:
  enum class Kind { kCircle, kEllipse, kGeneral };

  static ConvexDomain circle(Vec2 center, double radius);
  /// Throws std::invalid_argument unless e1, e2 > 0 and Q is orthogonal.
  static ConvexDomain ellipse(double e1, double e2, Mat2 rotation = Mat2::identity(), Vec2 center = {});
  /// Validates convexity and positive orientation on a fine sample of the curve.
  static ConvexDomain general(BoundaryCurve curve, DomainDescription description = described_as("general"));
  /// Radial function scale * ((3 + blend cos 4phi) / 4)^(-1/4), rotated and shifted.
  /// blend = 1 is the superellipse x^4 + y^4 = scale^4; smaller values round it off.
  static ConvexDomain smoothed_superellipse(double scale, double blend, double rotation = 0.0, Vec2 center = {});
  static ConvexDomain from_description(const DomainDescription& d);

  Kind kind() const;
  const Circle* circle_shape() const;
  const Ellipse* ellipse_shape() const;
  const DomainDescription& description() const;

  Vec2 boundary_point(double phi) const;
  /// Derivative of boundary_point with respect to phi.
  Vec2 boundary_tangent(double phi) const;
  Vec2 outward_normal(double phi) const;

  bool contains(Vec2 p) const;
  /// Distance from p to the boundary curve.
  double distance_to_boundary(Vec2 p) const;
  Vec2 center() const;
  double area() const;
  double perimeter() const;
  double diameter() const;
  /// Half-width of the smallest origin-centred square around the domain.
  double bounding_half_width() const;

  /// [min, max] of <p, theta> over the closed domain.
  std::pair<double, double> support_interval(Vec2 theta) const;
  /// Length of {s theta + a theta_perp} intersected with the domain; 0 if the line misses.
  double chord_length(Vec2 theta, double s) const;
  /// chord_length for a batch of offsets sharing one direction.
  void chord_lengths(Vec2 theta, std::span<const double> s, std::span<double> out) const;

  struct Impl;

 private:
  explicit ConvexDomain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// How the boundary arc-length measure is split over detectors. The angular
/// grid phi_k = k * 2pi / (M - 1) repeats the angle 0 at both ends.
enum class WeightRule {
  kTrapezoid,   // half weights on the duplicated end points; weights sum to the perimeter
  kPaperEqual,  // every detector gets |gamma'(phi_k)| * dphi
};

/// Boundary sample points with unit outward normals and arc-length weights.
class DetectorArray {
 public:
  DetectorArray(ConvexDomain domain, std::vector<Vec2> points, std::vector<Vec2> normals,
                std::vector<double> weights, WeightRule rule);

  int size() const { return static_cast<int>(points_.size()); }
  std::span<const Vec2> points() const { return points_; }
  std::span<const Vec2> normals() const { return normals_; }
  std::span<const double> weights() const { return weights_; }
  const ConvexDomain& domain() const { return domain_; }
  WeightRule weight_rule() const { return rule_; }

 private:
  ConvexDomain domain_;
  std::vector<Vec2> points_;
  std::vector<Vec2> normals_;
  std::vector<double> weights_;
  WeightRule rule_;
};

/// M = ceil(2 pi rho / dx) detectors on the circle. Throws std::invalid_argument
/// when dx >= 2 pi rho.
DetectorArray build_circle_detectors(double rho, Vec2 center, double dx, WeightRule rule = WeightRule::kTrapezoid);
DetectorArray build_ellipse_detectors(double e1, double e2, Mat2 rotation, Vec2 center, int m,
                                      WeightRule rule = WeightRule::kTrapezoid);
/// m detectors on any domain's boundary, using its own parametrization.
DetectorArray build_boundary_detectors(const ConvexDomain& domain, int m, WeightRule rule = WeightRule::kTrapezoid);
/// Circle: the ceil(2 pi rho / dx) rule. Otherwise M = ceil(perimeter / dx).
DetectorArray build_detectors(const ConvexDomain& domain, double dx, WeightRule rule = WeightRule::kTrapezoid);

const char* to_string(WeightRule rule);
WeightRule weight_rule_from_string(const std::string& s);

}  // namespace nbp
