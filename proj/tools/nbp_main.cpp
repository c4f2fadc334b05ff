#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbp/config.hpp"
#include "nbp/errors.hpp"
#include "nbp/io.hpp"
#include "nbp/pipeline.hpp"

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kPrecondition = 3, kPartial = 4 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<int> n;
  std::optional<double> rho, t_factor, noise, a;
  std::optional<std::string> b, formula, path, abel_rule, out, domain, phantom;
  std::optional<std::uint64_t> seed;
  bool record_timings = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "config file");
    app->add_option("--set", sets, "override, section.key=value (repeatable)");
    app->add_option("--n", n, "grid.n");
    app->add_option("--rho", rho, "grid.rho");
    app->add_option("--t-factor", t_factor, "forward.t_factor");
    app->add_option("--path", path, "forward.path: oracle | spectral");
    app->add_option("--domain", domain, "domain.kind");
    app->add_option("--phantom", phantom, "phantom.kind");
    app->add_option("--noise", noise, "noise.percent");
    app->add_option("--seed", seed, "noise.seed (per-kind seeds are seed, seed+1, seed+2)");
    app->add_option("--formula", formula, "reconstruction.formula");
    app->add_option("--a", a, "reconstruction.a");
    app->add_option("--b", b, "reconstruction.b, e.g. 2dx");
    app->add_option("--abel-rule", abel_rule, "reconstruction.abel_rule: step | linear");
    app->add_option("-o,--out", out, "output.directory");
    app->add_flag("--record-timings", record_timings, "write timings.json");
  }

  nbp::RunConfig build() const {
    nbp::ConfigDocument doc = config.empty() ? nbp::ConfigDocument{} : nbp::ConfigDocument::load(config);
    auto put = [&](const std::string& key, const std::string& value) { doc.add_override(key + "=" + value); };
    if (n) put("grid.n", std::to_string(*n));
    if (rho) put("grid.rho", num(*rho));
    if (t_factor) put("forward.t_factor", num(*t_factor));
    if (path) put("forward.path", *path);
    if (domain) put("domain.kind", *domain);
    if (phantom) put("phantom.kind", *phantom);
    if (noise) put("noise.percent", num(*noise));
    if (seed) put("noise.seed", std::to_string(*seed));
    if (formula) put("reconstruction.formula", *formula);
    if (a) put("reconstruction.a", num(*a));
    if (b) put("reconstruction.b", *b);
    if (abel_rule) put("reconstruction.abel_rule", *abel_rule);
    if (out) put("output.directory", *out);
    if (record_timings) put("output.record_timings", "true");
    for (const auto& s : sets) doc.add_override(s);
    return nbp::build_config(doc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Back-projection reconstruction from Neumann, mixed and Dirichlet wave traces"};
  app.require_subcommand(1);

  Common common;
  auto* phantom = app.add_subcommand("phantom", "rasterize the configured phantom");
  auto* forward = app.add_subcommand("forward", "simulate Dirichlet, Neumann and mixed traces");
  auto* noise = app.add_subcommand("noise", "add Gaussian noise to the traces in the output directory");
  auto* recon = app.add_subcommand("reconstruct", "reconstruct from a trace file");
  auto* kernel = app.add_subcommand("kernel", "error-kernel table and identity reports");
  auto* matrix = app.add_subcommand("matrix", "full data kind x noise x formula experiment grid");
  auto* compare = app.add_subcommand("compare", "metrics of one field file against another");
  for (auto* sub : {phantom, forward, noise, recon, kernel, matrix}) common.attach(sub);

  std::string trace_stem;
  bool cross = false;
  recon->add_option("-t,--trace", trace_stem, "trace stem (without .f64/.json)")->required();
  recon->add_flag("--cross", cross, "allow a formula that does not match the trace kind");

  std::string field_a, field_b;
  compare->add_option("field", field_a, "field stem")->required();
  compare->add_option("reference", field_b, "reference field stem")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0, every other parse error is a usage error
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*compare) {
      std::cout << nbp::to_json(nbp::cmd_compare(field_a, field_b), false).dump(2) << '\n';
      return kOk;
    }
    const nbp::RunConfig c = common.build();
    if (*phantom) nbp::cmd_phantom(c);
    if (*forward) nbp::cmd_forward(c);
    if (*noise) nbp::cmd_noise(c);
    if (*recon) std::cout << nbp::to_json(nbp::cmd_reconstruct(c, trace_stem, cross), false).dump(2) << '\n';
    if (*kernel) std::cout << nbp::cmd_kernel(c).dump(2) << '\n';
    if (*matrix) {
      const auto cells = nbp::cmd_matrix(c);
      int failed = 0;
      for (const auto& cell : cells)
        if (!cell.ok) {
          ++failed;
          std::cerr << "cell " << nbp::to_string(cell.kind) << " noise " << cell.noise_percent << " "
                    << nbp::to_string(cell.formula) << ": " << cell.error << '\n';
        }
      std::cout << cells.size() - failed << "/" << cells.size() << " cells completed\n";
      if (failed > 0) return kPartial;
    }
    return kOk;
  } catch (const nbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const nbp::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
