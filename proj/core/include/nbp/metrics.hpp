#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "nbp/field.hpp"

namespace nbp {

struct MetricsReport {
  double relative_l2 = 0.0;    // ||rec - truth|| / ||truth||
  double max_abs_error = 0.0;
  double correlation = 0.0;    // Pearson, over all lattice nodes
  double alpha_star = 0.0;     // argmin ||alpha rec - truth||
  double sup_ratio = 0.0;      // ||rec||_inf / ||truth||_inf
  /// Wall-clock seconds per stage.
  std::map<std::string, double> timings;
};

/// Throws std::invalid_argument when the grids differ. A zero truth gives
/// relative_l2 = ||rec|| and sup_ratio = ||rec||_inf (absolute values instead).
MetricsReport compute_metrics(const ScalarField2D& reconstruction, const ScalarField2D& truth);

/// Timings are left out unless `with_timings`, so reports stay byte-stable.
nlohmann::json to_json(const MetricsReport& m, bool with_timings);

}  // namespace nbp
