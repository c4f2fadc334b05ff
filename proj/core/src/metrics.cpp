#include "nbp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nbp {

MetricsReport compute_metrics(const ScalarField2D& reconstruction, const ScalarField2D& truth) {
  if (!(reconstruction.grid() == truth.grid())) throw std::invalid_argument("metrics: grids differ");
  const auto r = reconstruction.values();
  const auto t = truth.values();
  const double n = static_cast<double>(r.size());
  double rr = 0.0, tt = 0.0, rt = 0.0, ee = 0.0, emax = 0.0, rs = 0.0, ts = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = r[i] - t[i];
    rr += r[i] * r[i];
    tt += t[i] * t[i];
    rt += r[i] * t[i];
    ee += e * e;
    emax = std::max(emax, std::abs(e));
    rs += r[i];
    ts += t[i];
  }
  MetricsReport m;
  m.relative_l2 = tt > 0.0 ? std::sqrt(ee / tt) : std::sqrt(ee);
  m.max_abs_error = emax;
  const double cov = rt - rs * ts / n;
  const double vr = rr - rs * rs / n;
  const double vt = tt - ts * ts / n;
  m.correlation = vr > 0.0 && vt > 0.0 ? std::clamp(cov / std::sqrt(vr * vt), -1.0, 1.0) : 0.0;
  m.alpha_star = rr > 0.0 ? rt / rr : 0.0;
  const double tmax = truth.max_abs();
  m.sup_ratio = tmax > 0.0 ? reconstruction.max_abs() / tmax : reconstruction.max_abs();
  return m;
}

nlohmann::json to_json(const MetricsReport& m, bool with_timings) {
  nlohmann::json j{{"relative_l2", m.relative_l2},
                   {"max_abs_error", m.max_abs_error},
                   {"correlation", m.correlation},
                   {"alpha_star", m.alpha_star},
                   {"sup_ratio", m.sup_ratio}};
  if (with_timings) j["timings"] = m.timings;
  return j;
}

}  // namespace nbp
