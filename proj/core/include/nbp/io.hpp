#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "nbp/field.hpp"
#include "nbp/forward.hpp"
#include "nbp/geometry.hpp"
#include "nbp/kernel.hpp"

namespace nbp {

// Every data file is raw little-endian float64 next to a JSON sidecar with the
// same stem: <stem>.f64 and <stem>.json.

nlohmann::json to_json(const DomainDescription& d);
DomainDescription domain_description_from_json(const nlohmann::json& j);

/// Writes <stem>.f64 and <stem>.json. `extra` keys are merged into the sidecar.
void write_field(const std::filesystem::path& stem, const ScalarField2D& f, const nlohmann::json& extra = {});
ScalarField2D read_field(const std::filesystem::path& stem);

/// Sidecar keys: M, L, dt, T, kind, a, b, domain, weight_rule, seed, noise_percent.
void write_trace(const std::filesystem::path& stem, const TraceMatrix& trace);
/// Rebuilds the detectors from the domain description, M and the weight rule.
TraceMatrix read_trace(const std::filesystem::path& stem);
nlohmann::json read_sidecar(const std::filesystem::path& stem);

/// Preview window actually used for a PGM.
struct PgmWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// 8-bit binary PGM, row 0 at the top (largest x2), lo -> 0 and hi -> 255.
/// An empty window (lo == hi) uses the field's min and max.
PgmWindow write_pgm(const std::filesystem::path& path, const ScalarField2D& f, PgmWindow window = {});

nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const Theorem31Report& r);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace nbp
