#pragma once

#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nbp/field.hpp"
#include "nbp/forward.hpp"
#include "nbp/geometry.hpp"
#include "nbp/inversion.hpp"
#include "nbp/transforms.hpp"

namespace nbp {

/// Samples of (d_s^2 H_s R chi)(theta, s), or of H_s R chi alone, on a periodic
/// angle grid theta_i = i * 2pi / n and a uniform s grid.
struct KernelField {
  enum class Stage { kHilbert, kSecondDerivative };

  Stage stage = Stage::kSecondDerivative;
  ProfileOnLines table;
  /// Per direction: midpoint and half-width of the support interval of R chi.
  std::vector<double> band_center;
  std::vector<double> band_half_width;
  /// Some direction's chord profile did not decay on the s grid.
  bool decay_warning = false;

  /// Bilinear lookup, periodic in the angle of `theta` (need not be unit length).
  double lookup(Vec2 theta, double s) const;
  /// Largest |value| over |s - center| <= fraction * half_width, all directions.
  double band_max_abs(double fraction = 0.9) const;
  /// theta, s, value rows with a header line; every s_stride-th s sample.
  void write_csv(std::ostream& out, int s_stride = 1) const;
};

struct KernelOptions {
  int n_theta = 360;
  double ds = 1e-3;
  /// The s grid spans +-(extent_factor * max support offset).
  double extent_factor = 3.0;
  HilbertOptions hilbert{4, 5.0};
  KernelField::Stage stage = KernelField::Stage::kSecondDerivative;
};

/// Per direction: chord profile, Hilbert transform, then (for the default stage)
/// the second s-derivative.
KernelField kernel_field(const ConvexDomain& domain, const KernelOptions& options = {});

/// (n, s) arguments of the kernel for the pair (x, y), x != y.
struct GeometryPair {
  Vec2 direction;  // (y - x) / |y - x|
  double offset;   // (|y|^2 - |x|^2) / (2 |x - y|)
  static GeometryPair of(Vec2 x, Vec2 y);
};

/// 1 / (8 pi^2): the error-operator constant as usually stated.
inline constexpr double kLiteralKernelPrefactor = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
/// -1 / (8 pi^2): the stated constant of the u-v pairing identity.
inline constexpr double kLiteralPairingPrefactor = -1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
/// -1 / (8 pi): the constant that closes both the pairing identity and the
/// reconstruction identity numerically (see README).
inline constexpr double kClosingPrefactor = -1.0 / (8.0 * std::numbers::pi);

struct ApplyKOptions {
  /// Multiplies the raw kernel integral.
  double prefactor = kClosingPrefactor;
  /// Radius of the near-field blend, in grid cells.
  double near_cells = 6.0;
  int near_radial_nodes = 16;
  int near_angular_nodes = 32;
};

/// K f(x) = prefactor * int f(y) k(n(x,y), s(x,y)) / |x - y| dy. Far field by the
/// node sum over the lattice, near field in polar coordinates around x, joined
/// by a smooth partition of unity. Throws PreconditionError for x outside the domain.
double apply_K(const ScalarField2D& f, const ConvexDomain& domain, const KernelField& kernel, Vec2 x,
               const ApplyKOptions& options = {});
std::vector<double> apply_K(const ScalarField2D& f, const ConvexDomain& domain, const KernelField& kernel,
                            std::span<const Vec2> points, const ApplyKOptions& options = {});

struct ProbeResidual {
  Vec2 point;
  double f = 0.0;
  double backprojection = 0.0;
  double correction = 0.0;  // K f
  double residual = 0.0;    // f - BP - K f
};

struct Theorem31Report {
  std::vector<ProbeResidual> probes;
  double f_max = 0.0;
  double max_residual = 0.0;     // max |f - BP - K f|
  double max_uncorrected = 0.0;  // max |f - BP|
  double max_correction = 0.0;   // max |K f|
};

/// Residual of f = BP(Neumann trace) + K f at probe points, with BP the
/// 1/pi back-projection of the trace (its detectors must lie on `domain`).
Theorem31Report check_theorem31(const ScalarField2D& f, const ConvexDomain& domain, const TraceMatrix& trace,
                                const KernelField& kernel, std::span<const Vec2> probes,
                                AbelRule rule = AbelRule::kStep, const ApplyKOptions& options = {});

/// Both sides of an integral identity and their discrepancy.
struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / |lhs| (infinite when lhs = 0).
  double relative_gap = 0.0;
  /// |lhs - rhs| / scale, with a scale that does not vanish by cancellation.
  double normalized_gap = 0.0;
  double scale = 0.0;
  /// Parts of the right side (Prop. form: boundary term, K term).
  double rhs_boundary = 0.0;
  double rhs_kernel = 0.0;
  int grid_n = 0;
  double dt = 0.0;
  double final_time = 0.0;
};

struct IdentityOptions {
  double final_time = 32.0;
  /// Use every `stride`-th lattice node for the space-time integral.
  int stride = 1;
  /// Add the t^-3 tail of u v beyond the final time.
  bool tail_correction = true;
  OracleOptions oracle;
  ApplyKOptions apply_k;
  /// Constant in front of the Hilbert-stage double integral.
  double pairing_prefactor = kClosingPrefactor;
};

/// int_Omega int_0^inf u v dt dx against
/// pairing_prefactor * int int f(x) g(y) (H_s R chi)(n, s) / |x - y| dx dy.
/// `hilbert_kernel` must be a Hilbert-stage field. scale is the same double
/// integral with absolute values.
IdentityReport check_lemma22(const ScalarField2D& f, const ScalarField2D& g, const ConvexDomain& domain,
                             const KernelField& hilbert_kernel, const IdentityOptions& options = {});

/// int f g against 2 int_{dOmega} int v d_nu u dt dsigma + int (K f) g, with the
/// Neumann trace of f on the detectors and v computed at the detectors.
/// scale is ||f||_2 ||g||_2.
IdentityReport check_prop32(const ScalarField2D& f, const ScalarField2D& g, const ConvexDomain& domain,
                            const TraceMatrix& neumann_trace, const KernelField& kernel,
                            const IdentityOptions& options = {});

}  // namespace nbp
