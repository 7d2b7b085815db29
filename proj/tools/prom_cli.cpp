// prom: offline training, online evaluation, reporting and invariant checks
// for parametric reduced-order models of Bouc-Wen shear chains.

#include "prom/config.hpp"
#include "prom/pipeline.hpp"
#include "prom/verify.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string variants;
  std::optional<double> tau;
  std::string points;
};

prom::ExperimentConfig load_with_overrides(const Overrides& o) {
  auto cfg = prom::load_config(o.config);
  if (!o.out.empty()) cfg.output = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.tau) {
    cfg.ecsw.tau = *o.tau;
    cfg.ecsw.enabled = true;
  }
  if (!o.variants.empty()) {
    cfg.reduction.variants.clear();
    std::stringstream ss(o.variants);
    std::string v;
    while (std::getline(ss, v, ',')) cfg.reduction.variants.push_back(prom::variant_from_string(v));
  }
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, Overrides& o, bool with_points) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides the config)");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--variants", o.variants, "comma list of global,local,entries,coefficients");
  cmd->add_option("--tau", o.tau, "ECSW tolerance; enables hyper-reduction");
  if (with_points) cmd->add_option("--points", o.points, "query points, e.g. \"0.5,30000;0.62,21000\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric reduced-order models with Grassmann interpolation and ECSW"};
  app.require_subcommand(1);

  Overrides off, on;
  auto* offline = app.add_subcommand("offline", "simulate training points and build region models");
  add_common(offline, off, false);
  auto* online = app.add_subcommand("online", "evaluate pROM variants at query points against the HFM");
  add_common(online, on, true);

  std::string report_dir;
  auto* rep = app.add_subcommand("report", "aggregate errors.csv files into summary tables");
  rep->add_option("dir", report_dir, "results directory")->required();

  std::uint64_t verify_seed = 1;
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--seed", verify_seed, "random seed for the randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*offline) {
      const auto cfg = load_with_overrides(off);
      const auto s = prom::run_offline(cfg, &std::cerr);
      std::cout << "simulations run " << s.simulations_run << ", reused " << s.simulations_reused << "; regions built "
                << s.regions_built << ", reused " << s.regions_reused << '\n';
    } else if (*online) {
      const auto cfg = load_with_overrides(on);
      prom::OnlineOptions opts;
      opts.log = &std::cerr;
      if (!on.points.empty()) opts.points = prom::parse_points(on.points);
      const auto r = prom::run_online(cfg, opts);
      std::cout << r.errors_csv.string() << '\n';
    } else if (*rep) {
      const auto r = prom::report(report_dir, &std::cerr);
      std::cout << r.summary_csv.string() << '\n';
    } else if (*verify) {
      const bool ok = prom::print_checks(prom::run_invariant_suite(verify_seed), std::cout);
      return ok ? 0 : kExitNumeric;
    }
  } catch (const prom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const prom::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const prom::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
