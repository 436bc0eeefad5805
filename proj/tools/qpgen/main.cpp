// qpgen: pair-breaking rates and parity lifetimes of driven superconducting
// circuits from JSON run configurations.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "qpgen/backend.hpp"
#include "qpgen/errors.hpp"

using namespace qpgen;

namespace {

int default_threads() {
  if (const char* s = std::getenv("QPGEN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && n > 0) return static_cast<int>(n);
    std::fprintf(stderr, "qpgen: ignoring QPGEN_THREADS='%s'\n", s);
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  backend::ensure_blas_backend(argv);

  CLI::App app{"Multiphoton pair-breaking rates and charge-parity lifetimes"};
  app.require_subcommand(1);

  std::string config, profile, out;
  int threads = 0;
  bool svg = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "worker threads (default: QPGEN_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--profile", profile, "numerics profile")->check(CLI::IsMember({"full", "ci"}));
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_flag("--svg", svg, "also write a quick-look SVG plot");
  };
  auto* sweep = app.add_subcommand("sweep", "rate sweep: charge_drive_map, stark_cut, readout, kapitza");
  auto* sf = app.add_subcommand("structure-factors", "S+ and S- versus frequency");
  auto* pot = app.add_subcommand("potential", "effective SQUID potential samples");
  auto* demo = app.add_subcommand("label-demo", "state overlap along a labeled amplitude sweep");
  auto* conv = app.add_subcommand("converge", "truncation convergence audit");
  for (auto* s : {sweep, sf, pot, demo, conv}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kInvalid;
  }

  cli::RunOptions opt;
  opt.threads = threads > 0 ? threads : default_threads();
  opt.svg = svg;
  omp_set_num_threads(opt.threads);
  cli::install_interrupt_handler();

  struct Route {
    CLI::App* sub;
    std::initializer_list<cli::ScenarioKind> kinds;
    int (*run)(const cli::RunConfig&, const cli::RunOptions&);
  };
  using K = cli::ScenarioKind;
  const Route routes[] = {
      {sweep, {K::ChargeDriveMap, K::StarkCut, K::Readout, K::Kapitza}, cli::cmd_sweep},
      {sf, {K::StructureFactors}, cli::cmd_structure_factors},
      {pot, {K::Potential}, cli::cmd_potential},
      {demo, {K::LabelDemo}, cli::cmd_label_demo},
      {conv, {K::Converge}, cli::cmd_converge},
  };

  try {
    cli::RunConfig cfg = cli::load_config(config, profile);
    if (!out.empty()) cfg.out_dir = out;
    for (const auto& r : routes) {
      if (!r.sub->parsed()) continue;
      bool ok = false;
      for (auto k : r.kinds) ok = ok || k == cfg.scenario;
      if (!ok)
        throw ArgumentError("scenario '" + cli::scenario_name(cfg.scenario) + "' does not belong to '" +
                            r.sub->get_name() + "'");
      return r.run(cfg, opt);
    }
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "qpgen: invalid input: %s\n", e.what());
    return cli::kInvalid;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "qpgen: invalid input: %s\n", e.what());
    return cli::kInvalid;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "qpgen: invalid input: %s\n", e.what());
    return cli::kInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "qpgen: invalid input: %s\n", e.what());
    return cli::kInvalid;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "qpgen: numeric failure: %s\n", e.what());
    return cli::kNumeric;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "qpgen: numeric failure: %s\n", e.what());
    return cli::kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qpgen: %s\n", e.what());
    return cli::kNumeric;
  }
  return cli::kInvalid;
}
