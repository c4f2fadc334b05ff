#include "nbp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nbp/errors.hpp"
#include "nbp/inversion.hpp"
#include "nbp/io.hpp"

namespace nbp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>* sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(stage, t0);
    } else {
      auto r = f();
      record(stage, t0);
      return r;
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
    if (sink_) (*sink_)[stage] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::map<std::string, double>* sink_;
};

fs::path out_dir(const RunConfig& c) {
  fs::path d(c.output.directory);
  fs::create_directories(d);
  return d;
}

void report_timings(const RunConfig& c, const std::string& verb, const std::map<std::string, double>& t) {
  for (const auto& [stage, sec] : t)
    std::cerr << verb << ": " << stage << " " << std::fixed << std::setprecision(3) << sec << " s\n";
  if (c.output.record_timings) {
    const fs::path p = out_dir(c) / "timings.json";
    json j = json::object();
    if (fs::exists(p)) {
      std::ifstream in(p);
      j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.is_object()) j = json::object();
    }
    j[verb] = t;
    write_json(p, j);
  }
}

std::string percent_tag(double p) {
  std::ostringstream s;
  s << std::lround(p);
  return s.str();
}

json config_summary(const RunConfig& c) {
  return {{"grid", {{"n", c.grid.n}, {"rho", c.grid.rho}, {"center", {c.grid.center.x, c.grid.center.y}}}},
          {"domain", to_json(c.domain)},
          {"phantom", c.phantom.kind},
          {"forward",
           {{"path", to_string(c.forward.path)},
            {"t_factor", c.forward.t_factor},
            {"weight_rule", to_string(c.forward.weight_rule)}}}};
}

// Extra zero cells around the phantom lattice so boundary detectors get full stencils.
constexpr int kSpectralMargin = 8;

Formula matching_formula(TraceKind kind) {
  switch (kind) {
    case TraceKind::kDirichlet:
      return Formula::kDirichletUbp;
    case TraceKind::kNeumann:
      return Formula::kNeumann;
    case TraceKind::kMixed:
      return Formula::kMixed;
  }
  return Formula::kNeumann;
}

}  // namespace

ConvexDomain make_domain(const RunConfig& c) { return ConvexDomain::from_description(c.domain); }

PhantomData make_phantom(const RunConfig& c) {
  const GridSpec g = c.grid.spec();
  PhantomData p;
  if (c.phantom.kind == "head") {
    double scale = 1.0;
    (void)head_phantom_like(g, &scale);
    p.phantom = head_phantom_components();
    auto scale_amp = [scale](auto& comp) { comp.amplitude *= scale; };
    for (auto& comp : p.phantom.components) std::visit(scale_amp, comp);
  } else {
    p.phantom = c.phantom.phantom;
  }
  p.f = rasterize(p.phantom, g);
  auto [d1, d2] = rasterize_gradient(p.phantom, g);
  p.d1 = std::move(d1);
  p.d2 = std::move(d2);
  return p;
}

DetectorArray make_detectors(const RunConfig& c, const ConvexDomain& domain) {
  return build_detectors(domain, c.grid.spec().spacing, c.forward.weight_rule);
}

TimeGrid make_time_grid(const RunConfig& c) { return TimeGrid::covering(c.grid.spec().spacing, c.final_time()); }

const TraceMatrix& TraceSet::of(TraceKind kind) const {
  switch (kind) {
    case TraceKind::kDirichlet:
      return dirichlet;
    case TraceKind::kNeumann:
      return neumann;
    case TraceKind::kMixed:
      return mixed;
  }
  return neumann;
}

TraceSet simulate_traces(const RunConfig& c, const PhantomData& p, std::map<std::string, double>* timings) {
  Stopwatch sw(timings);
  const ConvexDomain domain = make_domain(c);
  const DetectorArray det = make_detectors(c, domain);
  const TimeGrid time = make_time_grid(c);
  const double dx = c.grid.spec().spacing;
  if (c.forward.path == ForwardPath::kSpectral) {
    SpectralOptions so;
    so.pad_factor = c.forward.pad_factor;
    TracePair pair = sw.time("forward_spectral", [&] { return spectral_traces(embed_with_margin(p.f, kSpectralMargin), det, time, so); });
    TraceMatrix mixed = make_mixed_trace(pair.dirichlet, pair.neumann, c.reconstruction.a, c.reconstruction.b(dx));
    return {std::move(pair.dirichlet), std::move(pair.neumann), std::move(mixed)};
  }
  TraceMatrix u = sw.time("forward_dirichlet", [&] {
    return solve_dirichlet_trace_oracle(p.f, det, time.dt, time.final_time(), c.forward.oracle);
  });
  TraceMatrix d = sw.time("forward_neumann", [&] {
    return solve_neumann_trace_oracle(p.f, p.d1, p.d2, det, time.dt, time.final_time(), c.forward.oracle);
  });
  TraceMatrix mixed = make_mixed_trace(u, d, c.reconstruction.a, c.reconstruction.b(dx));
  return {std::move(u), std::move(d), std::move(mixed)};
}

TraceSet with_noise(const TraceSet& clean, const NoiseConfig& noise, double percent) {
  return {add_gaussian_noise(clean.dirichlet, percent, noise.seed(TraceKind::kDirichlet)),
          add_gaussian_noise(clean.neumann, percent, noise.seed(TraceKind::kNeumann)),
          add_gaussian_noise(clean.mixed, percent, noise.seed(TraceKind::kMixed))};
}

Formula mismatched_formula(TraceKind kind) {
  return kind == TraceKind::kNeumann ? Formula::kDirichletUbp : Formula::kNeumann;
}

ScalarField2D reconstruct(const RunConfig& c, const TraceMatrix& trace, Formula formula, bool cross) {
  if (!cross && trace.kind() != matching_kind(formula))
    throw std::invalid_argument(std::string("formula '") + to_string(formula) + "' does not match " +
                                to_string(trace.kind()) + " data (pass --cross for mismatch experiments)");
  ReconstructionOptions o;
  o.interpolation = c.reconstruction.interpolation;
  o.abel_rule = c.reconstruction.abel_rule;
  o.allow_kind_mismatch = cross;
  const GridSpec g = c.grid.spec();
  switch (formula) {
    case Formula::kNeumann:
      return reconstruct_neumann(trace, g, o);
    case Formula::kMixed:
      return reconstruct_mixed(trace, g, o);
    case Formula::kDirichletUbp:
      return reconstruct_dirichlet_ubp(trace, g, c.reconstruction.ubp_scale, o);
  }
  return ScalarField2D(g);
}

std::vector<Vec2> kernel_probes(const RunConfig& c) {
  std::vector<Vec2> probes;
  const int k = c.kernel.probe_half_count;
  for (int a = -k; a <= k; ++a)
    for (int b = -k; b <= k; ++b)
      probes.push_back(c.kernel.probe_center + Vec2{a * c.kernel.probe_step, b * c.kernel.probe_step});
  return probes;
}

void cmd_phantom(const RunConfig& c) {
  std::map<std::string, double> t;
  Stopwatch sw(&t);
  const PhantomData p = sw.time("rasterize", [&] { return make_phantom(c); });
  const fs::path dir = out_dir(c);
  const PgmWindow w = write_pgm(dir / "phantom.pgm", p.f);
  write_field(dir / "phantom", p.f, {{"role", "phantom"}, {"preview_window", {w.lo, w.hi}}, {"config", config_summary(c)}});
  report_timings(c, "phantom", t);
}

void cmd_forward(const RunConfig& c) {
  std::map<std::string, double> t;
  const PhantomData p = make_phantom(c);
  const TraceSet traces = simulate_traces(c, p, &t);
  const fs::path dir = out_dir(c);
  write_field(dir / "phantom", p.f, {{"role", "phantom"}, {"config", config_summary(c)}});
  write_trace(dir / "trace_dirichlet", traces.dirichlet);
  write_trace(dir / "trace_neumann", traces.neumann);
  write_trace(dir / "trace_mixed", traces.mixed);
  report_timings(c, "forward", t);
}

void cmd_noise(const RunConfig& c) {
  const fs::path dir = out_dir(c);
  for (TraceKind kind : {TraceKind::kDirichlet, TraceKind::kNeumann, TraceKind::kMixed}) {
    const std::string name = std::string("trace_") + to_string(kind);
    const TraceMatrix clean = read_trace(dir / name);
    write_trace(dir / (name + "_noise" + percent_tag(c.noise.percent)),
                add_gaussian_noise(clean, c.noise.percent, c.noise.seed(kind)));
  }
}

MetricsReport cmd_reconstruct(const RunConfig& c, const fs::path& trace_stem, bool cross) {
  std::map<std::string, double> t;
  Stopwatch sw(&t);
  const TraceMatrix trace = sw.time("read_trace", [&] { return read_trace(trace_stem); });
  const GridSpec g = c.grid.spec();
  if (trace.dt() != g.spacing && std::abs(trace.dt() - g.spacing) > 1e-12 * g.spacing)
    throw ConfigError("trace time step does not match the configured grid spacing");
  const ScalarField2D rec =
      sw.time("reconstruct", [&] { return reconstruct(c, trace, c.reconstruction.formula, cross); });
  const PhantomData p = make_phantom(c);
  MetricsReport m = compute_metrics(rec, p.f);
  const fs::path dir = out_dir(c);
  const std::string name = std::string(to_string(c.reconstruction.formula)) + "_" + trace_stem.filename().string();
  const PgmWindow w = write_pgm(dir / ("recon_" + name + ".pgm"), rec);
  write_field(dir / ("recon_" + name), rec,
              {{"role", "reconstruction"},
               {"formula", to_string(c.reconstruction.formula)},
               {"trace_kind", to_string(trace.kind())},
               {"cross", cross},
               {"abel_rule", to_string(c.reconstruction.abel_rule)},
               {"preview_window", {w.lo, w.hi}}});
  m.timings = t;
  write_json(dir / ("metrics_" + name + ".json"), to_json(m, c.output.record_timings));
  report_timings(c, "reconstruct", t);
  return m;
}

nlohmann::json cmd_kernel(const RunConfig& c) {
  std::map<std::string, double> t;
  Stopwatch sw(&t);
  const ConvexDomain domain = make_domain(c);
  KernelOptions ko;
  ko.n_theta = c.kernel.n_theta;
  ko.ds = c.kernel.ds;
  ko.extent_factor = c.kernel.extent_factor;
  ko.hilbert.smoothing = c.kernel.hilbert_smoothing;
  const KernelField k2 = sw.time("kernel_field", [&] { return kernel_field(domain, ko); });
  ko.stage = KernelField::Stage::kHilbert;
  const KernelField k1 = sw.time("kernel_field_hilbert", [&] { return kernel_field(domain, ko); });

  const fs::path dir = out_dir(c);
  {
    std::ofstream csv(dir / "kernel.csv");
    k2.write_csv(csv, 10);
  }
  const double band = k2.band_max_abs(0.9);
  json report{{"domain", to_json(c.domain)},
              {"band_max_abs", band},
              {"vanishing", band <= 0.05},
              {"decay_warning", k2.decay_warning},
              {"constants",
               {{"kernel", c.kernel.literal_constants ? kLiteralKernelPrefactor : kClosingPrefactor},
                {"pairing", c.kernel.literal_constants ? kLiteralPairingPrefactor : kClosingPrefactor},
                {"literal", c.kernel.literal_constants}}}};

  const PhantomData p = make_phantom(c);
  if (p.f.max_abs() > 0.0) {
    const DetectorArray det = make_detectors(c, domain);
    const TimeGrid time = make_time_grid(c);
    const TraceMatrix d = sw.time("neumann_trace", [&] {
      return solve_neumann_trace_oracle(p.f, p.d1, p.d2, det, time.dt, time.final_time(), c.forward.oracle);
    });
    ApplyKOptions ak;
    ak.prefactor = c.kernel.literal_constants ? kLiteralKernelPrefactor : kClosingPrefactor;
    const auto probes = kernel_probes(c);
    const Theorem31Report th = sw.time("theorem31", [&] {
      return check_theorem31(p.f, domain, d, k2, probes, c.reconstruction.abel_rule, ak);
    });
    report["theorem31"] = to_json(th);

    Phantom partner;
    partner.components = {SmoothBump{c.kernel.partner_center, c.kernel.partner_radius, 1.0, 1.0}};
    const ScalarField2D g = rasterize(partner, c.grid.spec());
    IdentityOptions io;
    io.final_time = c.kernel.identity_t_factor * c.grid.rho;
    io.oracle = c.forward.oracle;
    io.apply_k = ak;
    io.pairing_prefactor = c.kernel.literal_constants ? kLiteralPairingPrefactor : kClosingPrefactor;
    report["lemma22"] = to_json(sw.time("lemma22", [&] { return check_lemma22(p.f, g, domain, k1, io); }));
    const TimeGrid long_time = TimeGrid::covering(time.dt, io.final_time);
    const TraceMatrix dl = sw.time("neumann_trace_long", [&] {
      return solve_neumann_trace_oracle(p.f, p.d1, p.d2, det, long_time.dt, long_time.final_time(), c.forward.oracle);
    });
    report["prop32"] = to_json(sw.time("prop32", [&] { return check_prop32(p.f, g, domain, dl, k2, io); }));
  }
  write_json(dir / "kernel_report.json", report);
  report_timings(c, "kernel", t);
  return report;
}

std::vector<MatrixCell> cmd_matrix(const RunConfig& c) {
  std::map<std::string, double> t;
  Stopwatch sw(&t);
  const fs::path dir = out_dir(c);
  const PhantomData p = make_phantom(c);
  const TraceSet clean = simulate_traces(c, p, &t);
  write_field(dir / "phantom", p.f, {{"role", "phantom"}, {"config", config_summary(c)}});
  write_pgm(dir / "phantom.pgm", p.f);

  std::vector<MatrixCell> cells;
  for (TraceKind kind : {TraceKind::kDirichlet, TraceKind::kNeumann, TraceKind::kMixed})
    for (double percent : {0.0, 10.0, 20.0})
      for (bool matching : {true, false})
        cells.push_back({.kind = kind,
                         .noise_percent = percent,
                         .formula = matching ? matching_formula(kind) : mismatched_formula(kind),
                         .matching = matching,
                         .ok = false,
                         .error = {},
                         .metrics = {}});

  std::map<double, TraceSet> noisy;
  for (double percent : {0.0, 10.0, 20.0})
    noisy.emplace(percent, percent == 0.0 ? clean : with_noise(clean, c.noise, percent));

  const PgmWindow window{std::min(0.0, -0.25 * p.f.max_abs()), std::max(1e-12, 1.25 * p.f.max_abs())};
  for (MatrixCell& cell : cells) {
    const std::string name = std::string("cell_") + to_string(cell.kind) + "_noise" + percent_tag(cell.noise_percent) +
                             "_" + to_string(cell.formula);
    try {
      const ScalarField2D rec = sw.time("reconstruct", [&] {
        return reconstruct(c, noisy.at(cell.noise_percent).of(cell.kind), cell.formula, !cell.matching);
      });
      cell.metrics = compute_metrics(rec, p.f);
      write_pgm(dir / (name + ".pgm"), rec, window);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  std::ofstream csv(dir / "summary.csv");
  csv << "kind,noise_percent,formula,matching,status,relative_l2,max_abs_error,correlation,alpha_star,sup_ratio\n";
  csv << std::setprecision(10);
  json summary = json::array();
  for (const MatrixCell& cell : cells) {
    csv << to_string(cell.kind) << ',' << cell.noise_percent << ',' << to_string(cell.formula) << ','
        << (cell.matching ? "yes" : "no") << ',' << (cell.ok ? "ok" : "failed");
    json row{{"kind", to_string(cell.kind)},
             {"noise_percent", cell.noise_percent},
             {"formula", to_string(cell.formula)},
             {"matching", cell.matching},
             {"ok", cell.ok}};
    if (cell.ok) {
      const MetricsReport& m = cell.metrics;
      csv << ',' << m.relative_l2 << ',' << m.max_abs_error << ',' << m.correlation << ',' << m.alpha_star << ','
          << m.sup_ratio;
      row["metrics"] = to_json(m, false);
    } else {
      csv << ",,,,,";
      row["error"] = cell.error;
    }
    csv << '\n';
    summary.push_back(row);
  }
  write_json(dir / "summary.json", {{"config", config_summary(c)}, {"cells", summary}});
  report_timings(c, "matrix", t);
  return cells;
}

MetricsReport cmd_compare(const fs::path& a, const fs::path& b) { return compute_metrics(read_field(a), read_field(b)); }

}  // namespace nbp
