// Acceptance suite: one PASS/FAIL line per criterion, thresholds pinned below.
// Exit status is the number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "nbp/forward.hpp"
#include "nbp/inversion.hpp"
#include "nbp/io.hpp"
#include "nbp/kernel.hpp"
#include "nbp/metrics.hpp"
#include "nbp/phantoms.hpp"
#include "nbp/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nbp;
using json = nlohmann::json;

namespace {

// criterion 1
constexpr double kNeumannTol201 = 0.10;
constexpr double kNeumannTol401 = 0.05;
constexpr double kRuntimeLimit = 60.0;
// criterion 2
constexpr double kMixedTol = 0.10;
// criterion 3
constexpr double kRangeTol = 0.05;
// criterion 4
constexpr double kBandTol = 0.05;
constexpr double kHilbertLineTol = 0.02;
constexpr double kBand = 0.9;
// criterion 5
constexpr double kClosureTol = 0.15;
constexpr double kCorrectionShare = 0.3;
// criterion 6
constexpr double kIdentityTol = 0.05;
// criterion 7
constexpr double kCrossTol = 1e-2;
// criterion 8
constexpr double kNoise10Tol = 0.30;
constexpr double kNoise20Tol = 0.45;
// criterion 9
constexpr double kUbpCorrelation = 0.99;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  int id;
  bool pass;
  std::string detail;
  json values;
};

std::vector<Outcome> g_outcomes;

void report(int id, bool pass, const std::string& detail, json values = {}) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  g_outcomes.push_back({id, pass, detail, std::move(values)});
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Phantom standard_bump() {
  Phantom p;
  p.components = {SmoothBump{{0.1, -0.05}, 0.5, 1.0, 1.0}};
  return p;
}

Phantom bump_at(Vec2 c, double r) {
  Phantom p;
  p.components = {SmoothBump{c, r, 1.0, 1.0}};
  return p;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

ReconstructionOptions linear_rule(bool mismatch = false) {
  ReconstructionOptions o;
  o.abel_rule = AbelRule::kLinear;
  o.allow_kind_mismatch = mismatch;
  return o;
}

// Unit disk, bump phantom, clean oracle traces with T = 16.
struct DiskRun {
  GridSpec grid;
  ScalarField2D f;
  TraceMatrix u, d;
  double forward_seconds = 0.0;
};

DiskRun disk_run(int n) {
  const auto t0 = Clock::now();
  const auto g = GridSpec::covering_square(n, 1.0, {});
  const Phantom p = standard_bump();
  auto f = rasterize(p, g);
  auto [d1, d2] = rasterize_gradient(p, g);
  const auto det = build_circle_detectors(1.0, {}, g.spacing);
  auto u = solve_dirichlet_trace_oracle(f, det, g.spacing, 16.0);
  auto d = solve_neumann_trace_oracle(f, d1, d2, det, g.spacing, 16.0);
  return {g, std::move(f), std::move(u), std::move(d), seconds_since(t0)};
}

void neumann_and_friends(const fs::path& out) {
  const auto t0 = Clock::now();
  const DiskRun r201 = disk_run(201);
  const auto rec201 = reconstruct_neumann(r201.d, r201.grid, linear_rule());
  const double total201 = seconds_since(t0);
  const double e201 = compute_metrics(rec201, r201.f).relative_l2;
  write_pgm(out / "neumann_201.pgm", rec201);

  const DiskRun r401 = disk_run(401);
  const auto rec401 = reconstruct_neumann(r401.d, r401.grid, linear_rule());
  const double e401 = compute_metrics(rec401, r401.f).relative_l2;
  report(1, e201 <= kNeumannTol201 && e401 <= kNeumannTol401 && e401 < e201 && total201 <= kRuntimeLimit,
         fmt("Neumann rel L2 N=201 %.4f (<= %.2f), N=401 %.4f (<= %.2f), runtime N=201 %.1f s (<= %.0f)", e201,
             kNeumannTol201, e401, kNeumannTol401, total201, kRuntimeLimit),
         {{"rel_l2_201", e201}, {"rel_l2_401", e401}, {"seconds_201", total201},
          {"forward_seconds_201", r201.forward_seconds}});

  // mixed trace, a = 1, b = 2 dx
  const double b = 2 * r201.grid.spacing;
  const auto m = make_mixed_trace(r201.u, r201.d, 1.0, b);
  const double em = compute_metrics(reconstruct_mixed(m, r201.grid, linear_rule()), r201.f).relative_l2;
  ReconstructionOptions step;
  step.abel_rule = AbelRule::kStep;
  const double em_step = compute_metrics(reconstruct_mixed(m, r201.grid, step), r201.f).relative_l2;
  const auto m01 = make_mixed_trace(r201.u, r201.d, 0.0, 1.0);
  const auto rec01 = reconstruct_mixed(m01, r201.grid, linear_rule());
  const bool bitwise = std::ranges::equal(rec01.values(), rec201.values());
  report(2, em <= kMixedTol && bitwise,
         fmt("mixed a=1 b=2dx rel L2 %.4f (<= %.2f; step rule %.4f), a=0 b=1 bitwise equal to Neumann: %s", em,
             kMixedTol, em_step, bitwise ? "yes" : "no"),
         {{"rel_l2_linear", em}, {"rel_l2_step", em_step}, {"bitwise_equal", bitwise}});

  // range condition
  const auto range = reconstruct_neumann(r201.u, r201.grid, linear_rule(true));
  const double ratio = range.max_abs() / r201.f.max_abs();
  report(3, ratio <= kRangeTol, fmt("Neumann formula on Dirichlet data: sup ratio %.4f (<= %.2f)", ratio, kRangeTol),
         {{"sup_ratio", ratio}});

  // noise
  NoiseConfig seeds;
  double en[2];
  int i = 0;
  for (double percent : {10.0, 20.0}) {
    const auto noisy = add_gaussian_noise(r201.d, percent, seeds.seed(TraceKind::kNeumann));
    const auto rec = reconstruct_neumann(noisy, r201.grid, linear_rule());
    en[i++] = compute_metrics(rec, r201.f).relative_l2;
    write_pgm(out / fmt("neumann_noise%.0f.pgm", percent), rec);
  }
  report(8, en[0] <= kNoise10Tol && en[1] <= kNoise20Tol,
         fmt("Neumann rel L2 with 10%% noise %.4f (<= %.2f), 20%% noise %.4f (<= %.2f)", en[0], kNoise10Tol, en[1],
             kNoise20Tol),
         {{"rel_l2_noise10", en[0]}, {"rel_l2_noise20", en[1]}});

  // Dirichlet universal back-projection
  const auto ubp = compute_metrics(reconstruct_dirichlet_ubp(r201.u, r201.grid, 1.0, linear_rule()), r201.f);
  report(9, ubp.correlation >= kUbpCorrelation,
         fmt("UBP correlation %.5f (>= %.2f), alpha* %.5f (reported)", ubp.correlation, kUbpCorrelation,
             ubp.alpha_star),
         {{"correlation", ubp.correlation}, {"alpha_star", ubp.alpha_star}, {"rel_l2", ubp.relative_l2}});
}

void kernel_vanishing() {
  const auto disk = ConvexDomain::circle({}, 1.0);
  const double disk_band = kernel_field(disk).band_max_abs(kBand);
  const auto ellipse = kernel_field(ConvexDomain::ellipse(2.0, 1.0));
  const double ellipse_band = ellipse.band_max_abs(kBand);
  KernelOptions o;
  o.stage = KernelField::Stage::kHilbert;
  const auto h = kernel_field(disk, o);
  double line = 0.0;
  for (int i = 0; i < h.table.directions(); ++i)
    for (int j = 0; j < h.table.s.count; ++j) {
      const double s = h.table.s.at(j);
      if (std::abs(s) <= kBand) line = std::max(line, std::abs(h.table.at(i, j) - 2 * s));
    }
  report(4, disk_band <= kBandTol && ellipse_band <= kBandTol && line <= kHilbertLineTol,
         fmt("kernel band max disk %.4f, ellipse(2,1) %.4f (<= %.2f); disk Hilbert stage vs 2s %.4f (<= %.2f)",
             disk_band, ellipse_band, kBandTol, line, kHilbertLineTol),
         {{"disk_band", disk_band}, {"ellipse_band", ellipse_band}, {"disk_hilbert_vs_2s", line}});
}

// Bump near the rounded corner, where the domain departs most from a disk; a
// centred bump sees |K f| below 1e-3 and the check would only measure the grid.
Theorem31Report superellipse_probe(int n, const ApplyKOptions& options = {}) {
  const double blend = 0.9;
  const Vec2 c{0.5, 0.5};
  const auto domain = ConvexDomain::smoothed_superellipse(1.0, blend);
  const double reach = std::pow((3.0 - blend) / 4.0, -0.25);
  const auto g = GridSpec::covering_square(n, reach + 0.05, {});
  const Phantom p = bump_at(c, 0.3);
  const auto f = rasterize(p, g);
  auto [d1, d2] = rasterize_gradient(p, g);
  const auto det = build_detectors(domain, g.spacing);
  const auto d = solve_neumann_trace_oracle(f, d1, d2, det, g.spacing, 16.0 * reach);
  static const KernelField k = kernel_field(domain);
  std::vector<Vec2> probes;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) probes.push_back(c + Vec2{0.15 * a, 0.15 * b});
  return check_theorem31(f, domain, d, k, probes, AbelRule::kLinear, options);
}

void superellipse_closure() {
  const auto r = superellipse_probe(101);
  ApplyKOptions literal;
  literal.prefactor = kLiteralKernelPrefactor;
  const auto lit = superellipse_probe(101, literal);
  const double fmax = r.f_max;
  // refinement: the residual keeps falling while f - BP stalls at |K f|
  const auto r201 = superellipse_probe(201);
  const auto r401 = superellipse_probe(401);
  report(5, r.max_residual <= kClosureTol * fmax && r.max_correction >= kCorrectionShare * r.max_uncorrected,
         fmt("superellipse N=101: residual %.4f (<= %.2f), |K f| %.4f vs |f - BP| %.4f (>= %.1fx); "
             "stated constant residual %.4f; N=201/401 residual %.4f/%.4f, |f - BP| %.4f/%.4f",
             r.max_residual / fmax, kClosureTol, r.max_correction / fmax, r.max_uncorrected / fmax,
             kCorrectionShare, lit.max_residual / fmax, r201.max_residual / fmax, r401.max_residual / fmax,
             r201.max_uncorrected / fmax, r401.max_uncorrected / fmax),
         {{"residual", r.max_residual / fmax},
          {"correction", r.max_correction / fmax},
          {"uncorrected", r.max_uncorrected / fmax},
          {"residual_stated_constant", lit.max_residual / fmax},
          {"residual_201", r201.max_residual / fmax},
          {"residual_401", r401.max_residual / fmax},
          {"uncorrected_201", r201.max_uncorrected / fmax},
          {"uncorrected_401", r401.max_uncorrected / fmax}});
}

void bilinear_identities() {
  const auto domain = ConvexDomain::circle({}, 1.0);
  const auto g = GridSpec::covering_square(101, 1.05, {});
  const Phantom pf = bump_at({0.25, 0.15}, 0.4);
  const auto f = rasterize(pf, g);
  auto [d1, d2] = rasterize_gradient(pf, g);
  const auto h = rasterize(bump_at({-0.15, -0.05}, 0.4), g);
  IdentityOptions o;
  o.final_time = 32.0;
  KernelOptions ko;
  ko.stage = KernelField::Stage::kHilbert;
  const auto lemma = check_lemma22(f, h, domain, kernel_field(domain, ko), o);
  const auto d = solve_neumann_trace_oracle(f, d1, d2, build_detectors(domain, g.spacing), g.spacing, o.final_time);
  const auto prop = check_prop32(f, h, domain, d, kernel_field(domain), o);
  report(6, lemma.relative_gap <= kIdentityTol && prop.relative_gap <= kIdentityTol,
         fmt("N=101 T=32, f != g: pairing identity gap %.4f, trace identity gap %.4f (<= %.2f)", lemma.relative_gap,
             prop.relative_gap, kIdentityTol),
         {{"pairing", to_json(lemma)}, {"trace", to_json(prop)}});
}

void forward_cross_validation() {
  const auto g = GridSpec::covering_square(301, 1.0, {});
  Phantom p;
  p.components = {GaussianBlob{{0.0, 0.0}, 0.15, 1.0}};
  const auto f = rasterize(p, g);
  const auto det = build_circle_detectors(1.0, {}, g.spacing);
  const TimeGrid time = TimeGrid::covering(g.spacing, 1.5);
  const auto spectral = spectral_traces(embed_with_margin(f, 8), det, time);
  const auto oracle = solve_dirichlet_trace_oracle(f, det, time.dt, time.final_time());
  const double e = relative_l2(spectral.dirichlet.values(), oracle.values());
  report(7, e <= kCrossTol, fmt("oracle vs spectral Dirichlet traces N=301, t <= 1.5: rel L2 %.2e (<= %.0e)", e, kCrossTol),
         {{"rel_l2", e}});
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void matrix_determinism(const fs::path& out) {
  std::vector<fs::path> dirs{out / "matrix_a", out / "matrix_b"};
  for (const auto& dir : dirs) {
    fs::remove_all(dir);
    RunConfig c = build_config(ConfigDocument::parse("[grid]\nn = 101\n[phantom]\nkind = head\n"));
    c.output.directory = dir.string();
    cmd_matrix(c);
  }
  int files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
    if (!e.is_regular_file()) continue;
    const fs::path other = dirs[1] / fs::relative(e.path(), dirs[0]);
    ++files;
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
  }
  int files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(dirs[1]))
    if (e.is_regular_file()) ++files_b;
  const bool summary = fs::exists(dirs[0] / "summary.csv") && fs::exists(dirs[0] / "summary.json");
  report(10, summary && files > 0 && differing == 0 && files == files_b,
         fmt("matrix run twice: %d files, %d differing, file counts %d/%d", files, differing, files, files_b),
         {{"files", files}, {"differing", differing}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-10"};
  std::string out_dir = "acceptance_out";
  app.add_option("--out", out_dir, "directory for previews, matrix runs and acceptance.json");
  CLI11_PARSE(app, argc, argv);
  const fs::path out(out_dir);
  fs::create_directories(out);

  const auto t0 = Clock::now();
  neumann_and_friends(out);
  kernel_vanishing();
  superellipse_closure();
  bilinear_identities();
  forward_cross_validation();
  matrix_determinism(out);

  std::sort(g_outcomes.begin(), g_outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int failed = 0;
  json all = json::array();
  for (const auto& o : g_outcomes) {
    failed += !o.pass;
    all.push_back({{"criterion", o.id}, {"pass", o.pass}, {"detail", o.detail}, {"values", o.values}});
  }
  write_json(out / "acceptance.json", all);
  std::printf("%d/%zu criteria passed in %.0f s\n", static_cast<int>(g_outcomes.size()) - failed, g_outcomes.size(),
              seconds_since(t0));
  return failed;
}
