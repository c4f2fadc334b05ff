#include "nbp/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nbp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path with_suffix(const fs::path& stem, const char* suffix) { return fs::path(stem.string() + suffix); }

std::uint64_t to_little(std::uint64_t w) {
  if constexpr (std::endian::native == std::endian::little) return w;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((w >> (8 * i)) & 0xFFu) << (8 * (7 - i));
  return r;
}

void write_raw(const fs::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::vector<std::uint64_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) words[i] = to_little(std::bit_cast<std::uint64_t>(values[i]));
  out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 8));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_raw(const fs::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != count * 8)
    throw std::runtime_error(path.string() + ": expected " + std::to_string(count * 8) + " bytes, found " +
                             std::to_string(size));
  in.seekg(0);
  std::vector<std::uint64_t> words(count);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(size));
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(to_little(words[i]));
  return values;
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

json to_json(const DomainDescription& d) {
  json j{{"kind", d.kind}, {"center", vec(d.center)}};
  if (d.kind == "circle") j["radius"] = d.radius;
  if (d.kind == "ellipse") {
    j["e1"] = d.e1;
    j["e2"] = d.e2;
    j["rotation"] = d.rotation;
  }
  if (d.kind == "superellipse") {
    j["scale"] = d.scale;
    j["blend"] = d.blend;
    j["rotation"] = d.rotation;
  }
  return j;
}

DomainDescription domain_description_from_json(const json& j) {
  DomainDescription d;
  d.kind = j.at("kind").get<std::string>();
  d.center = vec(j.at("center"));
  d.radius = j.value("radius", d.radius);
  d.e1 = j.value("e1", d.e1);
  d.e2 = j.value("e2", d.e2);
  d.rotation = j.value("rotation", d.rotation);
  d.scale = j.value("scale", d.scale);
  d.blend = j.value("blend", d.blend);
  return d;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_sidecar(const fs::path& stem) {
  std::ifstream in(with_suffix(stem, ".json"));
  if (!in) throw std::runtime_error("cannot open " + with_suffix(stem, ".json").string());
  return json::parse(in);
}

void write_field(const fs::path& stem, const ScalarField2D& f, const json& extra) {
  const auto v = f.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  json side{{"format", "f64le"},
            {"n", f.size()},
            {"spacing", f.spacing()},
            {"origin", vec(f.grid().origin)},
            {"layout", "row i along x1, column j along x2"},
            {"min", *lo},
            {"max", *hi}};
  if (extra.is_object()) side.update(extra);
  write_raw(with_suffix(stem, ".f64"), v);
  write_json(with_suffix(stem, ".json"), side);
}

ScalarField2D read_field(const fs::path& stem) {
  const json side = read_sidecar(stem);
  GridSpec g;
  g.n = side.at("n").get<int>();
  g.spacing = side.at("spacing").get<double>();
  g.origin = vec(side.at("origin"));
  return ScalarField2D(g, read_raw(with_suffix(stem, ".f64"), static_cast<std::size_t>(g.n) * g.n));
}

void write_trace(const fs::path& stem, const TraceMatrix& trace) {
  const json side{{"format", "f64le"},
                  {"M", trace.detector_count()},
                  {"L", trace.sample_count()},
                  {"dt", trace.dt()},
                  {"T", trace.time().final_time()},
                  {"kind", to_string(trace.kind())},
                  {"a", trace.a()},
                  {"b", trace.b()},
                  {"domain", to_json(trace.detectors().domain().description())},
                  {"weight_rule", to_string(trace.detectors().weight_rule())},
                  {"seed", trace.noise_seed()},
                  {"noise_percent", trace.noise_percent()}};
  write_raw(with_suffix(stem, ".f64"), trace.values());
  write_json(with_suffix(stem, ".json"), side);
}

TraceMatrix read_trace(const fs::path& stem) {
  const json side = read_sidecar(stem);
  const int m = side.at("M").get<int>();
  const TimeGrid time{side.at("dt").get<double>(), side.at("L").get<int>()};
  const ConvexDomain domain = ConvexDomain::from_description(domain_description_from_json(side.at("domain")));
  DetectorArray det = build_boundary_detectors(domain, m, weight_rule_from_string(side.at("weight_rule")));
  TraceMatrix trace(trace_kind_from_string(side.at("kind")), std::move(det), time);
  trace.set_mixed_weights(side.at("a").get<double>(), side.at("b").get<double>());
  trace.set_noise(side.at("noise_percent").get<double>(), side.at("seed").get<std::uint64_t>());
  const auto v = read_raw(with_suffix(stem, ".f64"), static_cast<std::size_t>(m) * time.count);
  std::copy(v.begin(), v.end(), trace.values().begin());
  return trace;
}

PgmWindow write_pgm(const fs::path& path, const ScalarField2D& f, PgmWindow window) {
  if (window.lo == window.hi) {
    const auto v = f.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    window = {*lo, *hi};
  }
  const int n = f.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << n << ' ' << n << "\n255\n";
  const double span = window.hi - window.lo;
  std::vector<unsigned char> row(n);
  for (int j = n - 1; j >= 0; --j) {
    for (int i = 0; i < n; ++i) {
      const double t = span > 0.0 ? (f(i, j) - window.lo) / span : 0.0;
      row[i] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), n);
  }
  return window;
}

json to_json(const IdentityReport& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"gap", r.relative_gap},
          {"normalized_gap", r.normalized_gap},
          {"scale", r.scale},
          {"rhs_boundary", r.rhs_boundary},
          {"rhs_kernel", r.rhs_kernel},
          {"grid", {{"n", r.grid_n}, {"dt", r.dt}, {"final_time", r.final_time}}}};
}

json to_json(const Theorem31Report& r) {
  json probes = json::array();
  for (const ProbeResidual& p : r.probes)
    probes.push_back({{"x", vec(p.point)},
                      {"f", p.f},
                      {"backprojection", p.backprojection},
                      {"correction", p.correction},
                      {"residual", p.residual}});
  return {{"f_max", r.f_max},
          {"max_residual", r.max_residual},
          {"max_uncorrected", r.max_uncorrected},
          {"max_correction", r.max_correction},
          {"relative_residual", r.f_max > 0.0 ? r.max_residual / r.f_max : 0.0},
          {"probes", probes}};
}

}  // namespace nbp
