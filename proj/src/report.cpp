#include "oqho/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "oqho/classical_twin.hpp"
#include "oqho/error.hpp"
#include "oqho/fixtures.hpp"
#include "oqho/quartic.hpp"

namespace oqho {

#ifndef OQHO_VERSION
#define OQHO_VERSION "0.1.0"
#endif

Json tagged(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) {
    Json t;
    t["inf"] = true;
    if (v < 0) t["negative"] = true;
    return t;
  }
  return v;
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(tagged(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const CMat& m) {
  Json j;
  j["re"] = to_json(Mat(m.real()));
  j["im"] = to_json(Mat(m.imag()));
  return j;
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        os << Json(key).dump() << (indent > 0 ? ": " : ":");
        write(os, value, indent, depth + 1);
      }
      pad(depth);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && (v.is_primitive());
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << (flat && indent > 0 ? ", " : ",");
        first = false;
        if (!flat) pad(depth + 1);
        write(os, v, indent, depth + 1);
      }
      if (!flat) pad(depth);
      os << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << format_double(v);
      } else {
        os << "null";
      }
      return;
    }
    default:
      os << j.dump();
  }
}

using Clock = std::chrono::steady_clock;

struct BlockRunner {
  Json& report;
  Json errors = Json::array();
  Json timings = Json::object();
  int attempted = 0;
  int failed = 0;

  void run(const std::string& name, const std::function<Json()>& body) {
    ++attempted;
    const auto t0 = Clock::now();
    try {
      report[name] = body();
    } catch (const Error& e) {
      fail(name, std::string(to_string(e.code())), e.what());
    } catch (const std::exception& e) {
      fail(name, "Internal", e.what());
    }
    timings[name] = std::chrono::duration<double>(Clock::now() - t0).count();
  }

  void fail(const std::string& name, const std::string& code, const std::string& what) {
    ++failed;
    Json err;
    err["code"] = code;
    err["message"] = what;
    report[name] = Json{{"error", err}};
    errors.push_back(Json{{"block", name}, {"code", code}, {"message", what}});
  }
};

Json model_block(const OqhoModel& model) {
  Json j;
  j["n"] = model.n();
  j["m"] = model.m();
  j["pr_residual"] = pr_residual(model);
  j["pr_residual_normalized"] = pr_residual_normalized(model);
  const StabilityMargin sm = stability_margin(model);
  j["abscissa"] = sm.abscissa;
  j["hurwitz"] = sm.is_hurwitz;
  const Eigen::VectorXcd ev = model.A.eigenvalues();
  Json eigs = Json::array();
  for (Eigen::Index k = 0; k < ev.size(); ++k) eigs.push_back(Json::array({ev[k].real(), ev[k].imag()}));
  j["eigenvalues"] = eigs;
  j["A"] = to_json(model.A);
  j["B"] = to_json(model.B);
  return j;
}

Json steady_block(const CovarianceKernel& k) {
  Json j;
  j["P"] = to_json(k.P());
  j["quantum_cov_min_eig"] = k.steady().min_eig;
  j["lyapunov_residual"] = k.steady().residual;
  return j;
}

Json quartic_block(const CovarianceKernel& k, const AnalysisConfig& cfg) {
  const double mean = mean_rate(k, cfg.Pi);
  const VarianceRate vr = variance_rate(k, cfg.Pi);
  const double theta0 = theta_threshold(k, cfg.Pi, vr);
  Json j;
  j["initial_state"] = "invariant";
  j["mean_rate"] = mean;
  j["variance_rate"] = vr.rate;
  j["variance_rate_dual"] = vr.dual;
  j["theta0"] = tagged(theta0);
  j["T"] = to_json(vr.T);
  j["Q"] = to_json(vr.Q);
  j["T_residual"] = vr.T_residual;
  j["Q_residual"] = vr.Q_residual;
  Json rates = Json::array();
  for (double th : cfg.theta_list)
    rates.push_back(Json{{"theta", th}, {"rate", quartic_rate(mean, vr, cfg.Pi, th)}, {"below_theta0", th < theta0}});
  j["quartic_rates"] = rates;
  return j;
}

Json cumulant_block(const OqhoModel& model, const AnalysisConfig& cfg, bool& partial) {
  Json rates = Json::array();
  Json checks = Json::array();
  std::optional<Error> first;
  std::size_t failures = 0;
  for (int r : cfg.orders) {
    Json e{{"order", r}};
    try {
      e["rate"] = cumulant_rate(model, cfg.Pi, r, cfg.quad);
    } catch (const Error& err) {
      partial = true;
      ++failures;
      if (!first) first = err;
      e["error"] = Json{{"code", std::string(to_string(err.code()))}, {"message", err.what()}};
    }
    rates.push_back(e);
    try {
      const DescentTable t = delta_table(r);
      std::uint64_t fact = 1;
      for (int k = 2; k < r; ++k) fact *= static_cast<std::uint64_t>(k);
      bool symmetric = true;
      for (std::size_t g = 0; g < t.size(); ++g) symmetric = symmetric && t.counts[g] == t.counts[t.size() - 1 - g];
      checks.push_back(Json{{"order", r}, {"sum", t.total()}, {"factorial", fact}, {"complement_symmetric", symmetric}});
    } catch (const Error& err) {
      checks.push_back(Json{{"order", r}, {"error", std::string(to_string(err.code()))}});
    }
  }
  // nothing usable: fail the block as a whole
  if (first && failures == cfg.orders.size()) throw *first;
  return Json{{"rates", rates}, {"delta_checksums", checks}};
}

Json deviation_block(const CovarianceKernel& k, const AnalysisConfig& cfg) {
  const FTransform F(k, cfg.Pi);
  const EnvelopeParams& env = F.envelope();
  const Eigen::Index n = k.model().n();
  Json j;
  j["mu"] = env.mu;
  j["alpha"] = env.alpha;
  j["Gamma"] = to_json(env.Gamma);
  j["gamma_fallback"] = env.fallback;
  j["N0"] = F.N0();
  j["F0"] = F.F0();
  Json qef = Json::array();
  for (double th : cfg.theta_list) {
    Json e{{"theta", th}};
    if (2.0 * th * F.F0() < 1.0) {
      e["upper_rate"] = qef_upper_rate(F, th);
    } else {
      e["upper_rate"] = tagged(std::numeric_limits<double>::infinity());
    }
    qef.push_back(e);
  }
  j["qef_upper_rates"] = qef;
  Json curve = Json::array();
  for (double eps : epsilon_grid(cfg, env, n)) {
    Json e{{"epsilon", eps}};
    const double na = static_cast<double>(n) * env.alpha;
    e["closed"] = eps >= na ? tagged(cramer_bound_closed(env.mu, env.alpha, n, eps)) : Json(nullptr);
    if (eps >= static_cast<double>(n) * F.N0()) {
      const CramerResult r = cramer_bound_numeric(F, eps);
      e["numeric"] = tagged(r.bound);
      e["theta_star"] = tagged(r.theta_star);
    } else {
      e["numeric"] = nullptr;
      e["theta_star"] = nullptr;
    }
    curve.push_back(e);
  }
  j["curve"] = curve;
  return j;
}

Json classical_analytic_block(const OqhoModel& model, const AnalysisConfig& cfg) {
  Json j;
  j["quadform_variance_classical"] = classical_quadform_variance(model, cfg.Pi);
  j["quadform_variance_quantum"] = quantum_quadform_variance(model, cfg.Pi);
  const double sup = classical_spectral_sup(model, cfg.Pi);
  j["spectral_sup"] = sup;
  Json rates = Json::array();
  for (double th : cfg.theta_list) {
    Json e{{"theta", th}};
    if (th * sup < 1.0) {
      const double sde = classical_rs_rate_sde(model, cfg.Pi, th, cfg.quad);
      e["rate_sde"] = sde;
      e["rate_half"] = 0.5 * sde;
    } else {
      e["rate_sde"] = tagged(std::numeric_limits<double>::infinity());
      e["rate_half"] = tagged(std::numeric_limits<double>::infinity());
    }
    rates.push_back(e);
  }
  j["rs_rates"] = rates;
  return j;
}

double max_z(const CMat& value, const CMat& target, const Mat& se_re, const Mat& se_im) {
  double z = 0;
  for (Eigen::Index i = 0; i < value.rows(); ++i)
    for (Eigen::Index k = 0; k < value.cols(); ++k) {
      if (se_re(i, k) > 0) z = std::max(z, std::abs(value(i, k).real() - target(i, k).real()) / se_re(i, k));
      if (se_im(i, k) > 0) z = std::max(z, std::abs(value(i, k).imag() - target(i, k).imag()) / se_im(i, k));
    }
  return z;
}

Json monte_carlo_block(const OqhoModel& model, const AnalysisConfig& cfg) {
  const McSettings& mc = *cfg.mc;
  const CovarianceKernel k(model);
  const TrajectoryBatch batch = simulate(model, mc.h, mc.steps, mc.paths, mc.seed, {0, mc.steps});
  const StationaryStats st = mc_stationary_stats(batch, mc.steps);
  const CMat target0 = k.steady().quantum_cov;
  const CMat targetlag = expm(model.A, mc.h * static_cast<double>(mc.steps)).cast<cplx>() * target0;
  const McEstimate qv = mc_quadform_variance(batch, cfg.Pi, mc.steps);
  const double qv_exact = classical_quadform_variance(model, cfg.Pi);
  Json j;
  j["h"] = mc.h;
  j["steps"] = mc.steps;
  j["paths"] = mc.paths;
  j["seed"] = mc.seed;
  j["cov0"] = to_json(st.cov0.value);
  j["cov0_max_z"] = max_z(st.cov0.value, target0, st.cov0.std_error_re, st.cov0.std_error_im);
  j["lag"] = mc.h * static_cast<double>(mc.steps);
  j["covlag"] = to_json(st.covlag.value);
  j["covlag_max_z"] = max_z(st.covlag.value, targetlag, st.covlag.std_error_re, st.covlag.std_error_im);
  j["quadform_variance"] = Json{{"value", qv.value}, {"std_error", qv.std_error}, {"exact", qv_exact}};
  return j;
}

Json provenance(const AnalysisConfig& cfg) {
  Json j;
  j["tool"] = "oqho";
  j["version"] = OQHO_VERSION;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  j["compiler"] = __VERSION__;
#endif
  j["source"] = cfg.source;
  if (cfg.source == "paper-example") {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fixture_hash(four_mode_example())));
    j["fixture_hash"] = buf;
  }
  j["seed"] = cfg.mc ? Json(cfg.mc->seed) : Json(nullptr);
  j["quadrature"] = Json{{"abs_tol", cfg.quad.abs_tol}, {"rel_tol", cfg.quad.rel_tol}};
  return j;
}

int exit_for(const BlockRunner& br) {
  if (br.failed == 0) return 0;
  return br.failed == br.attempted ? 3 : 2;
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  if (indent > 0) os << '\n';
  return os.str();
}

std::vector<double> epsilon_grid(const AnalysisConfig& cfg, const EnvelopeParams& env, Eigen::Index n) {
  if (cfg.eps_grid) return cfg.eps_grid->values();
  const double na = static_cast<double>(n) * env.alpha;
  return EpsilonGrid{na, 5.0 * na, 9}.values();
}

Report analyze(const AnalysisConfig& cfg, const ReportOptions& opts) {
  const auto t0 = Clock::now();
  const OqhoModel model = config_model(cfg);
  Report out;
  Json& r = out.json;
  r["model"] = model_block(model);
  BlockRunner br{r};
  std::optional<CovarianceKernel> kernel;
  br.run("steady_state", [&] {
    kernel.emplace(model);
    return steady_block(*kernel);
  });
  const auto need_kernel = [&]() -> const CovarianceKernel& {
    if (!kernel) throw Error(ErrorCode::NotHurwitz, "no steady state");
    return *kernel;
  };
  br.run("quartic", [&] { return quartic_block(need_kernel(), cfg); });
  bool partial = false;
  br.run("cumulants", [&] { return cumulant_block(model, cfg, partial); });
  br.run("deviation", [&] { return deviation_block(need_kernel(), cfg); });
  br.run("classical", [&] {
    Json j = classical_analytic_block(model, cfg);
    if (cfg.mc) j["monte_carlo"] = monte_carlo_block(model, cfg);
    return j;
  });
  r["provenance"] = provenance(cfg);
  if (opts.timing) {
    br.timings["total"] = std::chrono::duration<double>(Clock::now() - t0).count();
    r["provenance"]["wall_clock_s"] = br.timings;
  }
  r["errors"] = br.errors;
  out.exit_code = exit_for(br);
  if (out.exit_code == 0 && partial) out.exit_code = 2;
  return out;
}

Report simulate_report(const AnalysisConfig& cfg, const ReportOptions& opts) {
  const auto t0 = Clock::now();
  const OqhoModel model = config_model(cfg);
  AnalysisConfig c = cfg;
  if (!c.mc) c.mc = McSettings{};
  Report out;
  BlockRunner br{out.json};
  br.run("monte_carlo", [&] { return monte_carlo_block(model, c); });
  out.json["provenance"] = provenance(c);
  if (opts.timing) out.json["provenance"]["wall_clock_s"] = std::chrono::duration<double>(Clock::now() - t0).count();
  out.json["errors"] = br.errors;
  out.exit_code = br.failed ? 3 : 0;
  return out;
}

std::string bound_csv(const TailBoundCurve& c) {
  std::ostringstream os;
  os << "epsilon,bound_closed,bound_numeric,theta_star\n";
  for (std::size_t k = 0; k < c.epsilon.size(); ++k)
    os << format_double(c.epsilon[k]) << ',' << format_double(c.closed[k]) << ',' << format_double(c.numeric[k])
       << ',' << format_double(c.theta_star[k]) << '\n';
  return os.str();
}

std::string delta_csv(const DescentTable& t) {
  std::ostringstream os;
  os << "gamma_bits,count\n";
  for (std::size_t g = 0; g < t.size(); ++g) os << t.bits(g) << ',' << t.counts[g] << '\n';
  return os.str();
}

std::string cumulants_csv(const std::vector<int>& orders, const std::vector<double>& rates) {
  std::ostringstream os;
  os << "order,rate\n";
  for (std::size_t k = 0; k < orders.size() && k < rates.size(); ++k)
    os << orders[k] << ',' << format_double(rates[k]) << '\n';
  return os.str();
}

}  // namespace oqho
