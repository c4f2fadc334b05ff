#include "nbp/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abel.hpp"
#include "nbp/errors.hpp"
#include "nbp/transforms.hpp"

namespace nbp {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kDirichlet:
      return "dirichlet";
    case TraceKind::kNeumann:
      return "neumann";
    case TraceKind::kMixed:
      return "mixed";
  }
  return "?";
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return TraceKind::kDirichlet;
  if (s == "neumann") return TraceKind::kNeumann;
  if (s == "mixed") return TraceKind::kMixed;
  throw std::invalid_argument("unknown trace kind '" + s + "'");
}

TimeGrid TimeGrid::covering(double dt, double T) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(T > 0.0)) throw PreconditionError("final time must be positive");
  return {dt, static_cast<int>(std::floor(T / dt + 1e-9)) + 1};
}

TraceMatrix::TraceMatrix(TraceKind kind, DetectorArray detectors, TimeGrid time)
    : kind_(kind), detectors_(std::move(detectors)), time_(time) {
  if (time_.count < 1 || !(time_.dt > 0.0)) throw std::invalid_argument("trace needs a non-empty time grid");
  values_.assign(static_cast<std::size_t>(detectors_.size()) * time_.count, 0.0);
  if (kind_ == TraceKind::kNeumann) {
    a_ = 0.0;
    b_ = 1.0;
  }
}

void TraceMatrix::set_mixed_weights(double a, double b) {
  a_ = a;
  b_ = b;
}

void TraceMatrix::set_noise(double percent, std::uint64_t seed) {
  noise_percent_ = percent;
  noise_seed_ = seed;
}

double TraceMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool TraceMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

using detail::RowMatrix;

// Spherical means of f around every point on r_j = j * dr, j < cols.
RowMatrix mean_profiles(const ScalarField2D& f, std::span<const Vec2> points, double dr, int cols,
                        const OracleOptions& options) {
  const SphericalMeanProfiler profiler(f, options.arc_factor * f.spacing(), options.min_nodes);
  const int count = static_cast<int>(points.size());
  RowMatrix means = RowMatrix::Zero(count, cols);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (int p = 0; p < count; ++p) {
    try {
      profiler.profile(points[p], dr, std::span<double>(means.row(p).data(), static_cast<std::size_t>(cols)));
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return means;
}

int radius_columns(const ScalarField2D& f, std::span<const Vec2> points, double dr, int max_cols) {
  const SphericalMeanProfiler profiler(f, f.spacing());
  double reach = 0.0;
  for (const Vec2& p : points) reach = std::max(reach, profiler.max_radius(p));
  const int needed = static_cast<int>(std::ceil(reach / dr)) + 3;
  return std::max(3, std::min(needed, max_cols));
}

void check_options(const OracleOptions& o) {
  if (o.oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  if (!(o.arc_factor > 0.0)) throw std::invalid_argument("arc_factor must be positive");
}

}  // namespace

std::vector<double> wave_solution_at_points(const ScalarField2D& f, std::span<const Vec2> points, TimeGrid time,
                                            InitialData data, const OracleOptions& options) {
  check_options(options);
  const int count = static_cast<int>(points.size());
  std::vector<double> out(static_cast<std::size_t>(count) * time.count, 0.0);
  if (count == 0 || f.support().empty) return out;
  const int q = options.oversample;
  const double dr = time.dt / q;
  const int cols = radius_columns(f, points, dr, (time.count - 1) * q + 2);
  const RowMatrix means = mean_profiles(f, points, dr, cols, options);
  const RowMatrix weights = detail::hat_abel_weights(time.count, cols, q);
  Eigen::Map<RowMatrix> result(out.data(), count, time.count);

  if (data == InitialData::kVelocity) {
    result.noalias() = dr * (means * weights.transpose());
    return out;
  }
  // dM/dr divided by r, which stays smooth at r = 0 because M is even in r.
  RowMatrix h = RowMatrix::Zero(count, cols);
  for (int p = 0; p < count; ++p) {
    for (int j = 1; j < cols; ++j) {
      const double next = j + 1 < cols ? means(p, j + 1) : 0.0;
      h(p, j) = (next - means(p, j - 1)) / (2.0 * dr) / (j * dr);
    }
    h(p, 0) = cols > 2 ? (4.0 * h(p, 1) - h(p, 2)) / 3.0 : h(p, 1);
  }
  result.noalias() = dr * (h * weights.transpose());
  for (int l = 0; l < time.count; ++l) result.col(l) *= time.at(l);
  result.colwise() += means.col(0);
  return out;
}

namespace {

void check_detectors_outside(const ScalarField2D& f, const DetectorArray& detectors) {
  const SupportDisk s = f.support();
  if (s.empty) return;
  for (const Vec2& y : detectors.points())
    if (distance(y, s.center) < s.radius)
      throw PreconditionError("detector lies inside the support disk of the initial data");
}

}  // namespace

TraceMatrix solve_dirichlet_trace_oracle(const ScalarField2D& f, const DetectorArray& detectors, double dt, double T,
                                         const OracleOptions& options) {
  const TimeGrid time = TimeGrid::covering(dt, T);
  check_detectors_outside(f, detectors);
  TraceMatrix trace(TraceKind::kDirichlet, detectors, time);
  const auto u = wave_solution_at_points(f, detectors.points(), time, InitialData::kDisplacement, options);
  std::copy(u.begin(), u.end(), trace.values().begin());
  return trace;
}

TraceMatrix solve_neumann_trace_oracle(const ScalarField2D& f, const ScalarField2D& d1f, const ScalarField2D& d2f,
                                       const DetectorArray& detectors, double dt, double T,
                                       const OracleOptions& options) {
  const TimeGrid time = TimeGrid::covering(dt, T);
  check_detectors_outside(f, detectors);
  check_detectors_outside(d1f, detectors);
  check_detectors_outside(d2f, detectors);
  TraceMatrix trace(TraceKind::kNeumann, detectors, time);
  const auto u1 = wave_solution_at_points(d1f, detectors.points(), time, InitialData::kDisplacement, options);
  const auto u2 = wave_solution_at_points(d2f, detectors.points(), time, InitialData::kDisplacement, options);
  const auto normals = detectors.normals();
  for (int k = 0; k < detectors.size(); ++k) {
    for (int l = 0; l < time.count; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k) * time.count + l;
      trace(k, l) = normals[k].x * u1[idx] + normals[k].y * u2[idx];
    }
  }
  return trace;
}

TraceMatrix make_mixed_trace(const TraceMatrix& u_trace, const TraceMatrix& d_trace, double a, double b) {
  if (u_trace.detector_count() != d_trace.detector_count() || !(u_trace.time() == d_trace.time()))
    throw std::invalid_argument("make_mixed_trace: traces have different shapes or time grids");
  const auto pu = u_trace.detectors().points();
  const auto pd = d_trace.detectors().points();
  if (!std::equal(pu.begin(), pu.end(), pd.begin()))
    throw std::invalid_argument("make_mixed_trace: traces use different detectors");
  TraceMatrix out(TraceKind::kMixed, u_trace.detectors(), u_trace.time());
  out.set_mixed_weights(a, b);
  auto v = out.values();
  const auto u = u_trace.values();
  const auto d = d_trace.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * u[i] + b * d[i];
  return out;
}

}  // namespace nbp
