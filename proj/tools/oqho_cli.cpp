// oqho: command-line front end for the open quantum harmonic oscillator analyses.
//
// exit codes: 0 ok, 1 input error, 2 partial analysis failure, 3 numerical failure

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oqho/config.hpp"
#include "oqho/cumulants.hpp"
#include "oqho/error.hpp"
#include "oqho/large_dev.hpp"
#include "oqho/report.hpp"

namespace {

struct Common {
  std::string config;
  std::string fixture;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c, bool model = true) {
  if (model) {
    auto* cfg = sub->add_option("--config", c.config, "JSON config file");
    auto* fix = sub->add_option("--fixture", c.fixture, "built-in model: paper-example or tiny");
    cfg->excludes(fix);
    sub->add_option("--tol", c.tol, "quadrature tolerance (absolute and relative)");
  }
  sub->add_option("--out", c.out, "write output here instead of stdout");
}

oqho::AnalysisConfig resolve(const Common& c) {
  oqho::AnalysisConfig cfg;
  if (!c.config.empty()) {
    cfg = oqho::load_config(c.config);
  } else if (!c.fixture.empty()) {
    cfg = oqho::fixture_config(c.fixture);
  } else {
    throw oqho::Error(oqho::ErrorCode::ConfigParse, "one of --config or --fixture is required");
  }
  if (c.tol) {
    cfg.quad.abs_tol = *c.tol;
    cfg.quad.rel_tol = *c.tol;
    try {
      cfg.quad.validate();
    } catch (const oqho::Error& e) {
      throw oqho::Error(oqho::ErrorCode::ConfigParse, std::string("--tol: ") + e.what());
    }
  }
  if (c.seed) {
    if (!cfg.mc) cfg.mc = oqho::McSettings{};
    cfg.mc->seed = *c.seed;
  }
  return cfg;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw oqho::Error(oqho::ErrorCode::InvalidArgument, "cannot write '" + c.out + "'");
  f << text;
}

std::string bound_text(const oqho::AnalysisConfig& cfg, bool closed_only) {
  const oqho::OqhoModel model = oqho::config_model(cfg);
  const oqho::CovarianceKernel kernel(model);
  std::vector<double> grid;
  if (cfg.eps_grid) {
    grid = cfg.eps_grid->values();
  } else {
    grid = oqho::epsilon_grid(cfg, oqho::envelope_params(kernel, cfg.Pi), model.n());
  }
  return oqho::bound_csv(oqho::bound_curve(kernel, cfg.Pi, grid, !closed_only));
}

std::string cumulant_text(const oqho::AnalysisConfig& cfg, const std::vector<int>& orders) {
  const oqho::OqhoModel model = oqho::config_model(cfg);
  std::vector<double> rates;
  for (int r : orders) rates.push_back(oqho::cumulant_rate(model, cfg.Pi, r, cfg.quad));
  return oqho::cumulants_csv(orders, rates);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive analysis of open quantum harmonic oscillators"};
  app.require_subcommand(1);

  Common common;

  auto* validate = app.add_subcommand("validate", "check a config and print model certificates");
  add_common(validate, common);

  auto* analyze = app.add_subcommand("analyze", "full JSON report");
  add_common(analyze, common);
  analyze->add_option("--seed", common.seed, "Monte Carlo seed");
  analyze->add_flag("--timing", common.timing, "include wall-clock times");

  std::vector<int> orders;
  auto* cumulants = app.add_subcommand("cumulants", "asymptotic cumulant rates as CSV");
  add_common(cumulants, common);
  cumulants->add_option("--order", orders, "cumulant orders (default: config)");

  double eps_min = 0, eps_max = 0;
  int eps_steps = -1;
  bool closed_only = false;
  auto* bound = app.add_subcommand("bound", "tail probability bound curve as CSV");
  add_common(bound, common);
  bound->add_option("--eps-min", eps_min);
  bound->add_option("--eps-max", eps_max);
  bound->add_option("--eps-steps", eps_steps);
  bound->add_flag("--closed-only", closed_only, "skip the numeric Legendre transform");

  std::optional<long> paths, steps;
  std::optional<double> h;
  auto* simulate = app.add_subcommand("simulate", "classical twin Monte Carlo as JSON");
  add_common(simulate, common);
  simulate->add_option("--seed", common.seed, "Monte Carlo seed");
  simulate->add_option("--paths", paths);
  simulate->add_option("--steps", steps);
  simulate->add_option("--step-size", h, "time step");
  simulate->add_flag("--timing", common.timing, "include wall-clock times");

  int delta_r = 4;
  auto* delta = app.add_subcommand("delta", "descent-class counts as CSV");
  add_common(delta, common, false);
  delta->add_option("--r", delta_r, "cumulant order")->required();

  std::string which;
  auto* report = app.add_subcommand("report", "plottable CSV");
  add_common(report, common);
  report->add_option("--which", which)->required()->check(CLI::IsMember({"bound", "delta", "cumulants"}));
  report->add_option("--r", delta_r, "order for --which delta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*validate) {
      const oqho::OqhoModel model = oqho::config_model(resolve(common));
      const oqho::StabilityMargin sm = oqho::stability_margin(model);
      oqho::Json j;
      j["valid"] = true;
      j["n"] = model.n();
      j["m"] = model.m();
      j["pr_residual"] = oqho::pr_residual(model);
      j["pr_residual_normalized"] = oqho::pr_residual_normalized(model);
      j["abscissa"] = sm.abscissa;
      j["hurwitz"] = sm.is_hurwitz;
      emit(common, oqho::dump(j));
      return 0;
    }
    if (*analyze) {
      const oqho::Report r = oqho::analyze(resolve(common), {common.timing});
      emit(common, oqho::dump(r.json));
      return r.exit_code;
    }
    if (*cumulants) {
      const oqho::AnalysisConfig cfg = resolve(common);
      emit(common, cumulant_text(cfg, orders.empty() ? cfg.orders : orders));
      return 0;
    }
    if (*bound) {
      oqho::AnalysisConfig cfg = resolve(common);
      if (eps_steps >= 0) cfg.eps_grid = oqho::EpsilonGrid{eps_min, eps_max, eps_steps};
      emit(common, bound_text(cfg, closed_only));
      return 0;
    }
    if (*simulate) {
      oqho::AnalysisConfig cfg = resolve(common);
      if (!cfg.mc) cfg.mc = oqho::McSettings{};
      if (paths) cfg.mc->paths = *paths;
      if (steps) cfg.mc->steps = *steps;
      if (h) cfg.mc->h = *h;
      const oqho::Report r = oqho::simulate_report(cfg, {common.timing});
      emit(common, oqho::dump(r.json));
      return r.exit_code;
    }
    if (*delta) {
      emit(common, oqho::delta_csv(oqho::delta_table(delta_r)));
      return 0;
    }
    if (*report) {
      if (which == "delta") {
        emit(common, oqho::delta_csv(oqho::delta_table(delta_r)));
      } else if (which == "bound") {
        emit(common, bound_text(resolve(common), false));
      } else {
        const oqho::AnalysisConfig cfg = resolve(common);
        emit(common, cumulant_text(cfg, cfg.orders));
      }
      return 0;
    }
  } catch (const oqho::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return oqho::is_numerical(e.code()) ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
