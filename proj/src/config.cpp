#include "oqho/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oqho/error.hpp"
#include "oqho/fixtures.hpp"

namespace oqho {

using json = nlohmann::ordered_json;

std::vector<double> EpsilonGrid::values() const {
  std::vector<double> out;
  if (steps <= 0) return out;
  if (steps == 1) return {min};
  out.reserve(steps);
  for (int k = 0; k < steps; ++k) out.push_back(min + (max - min) * k / (steps - 1));
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigParse, what); }

std::string where(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) bad("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad("'" + key + "' must be finite");
  return v;
}

Mat matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) bad("'" + key + "' must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) bad("'" + key + "' must be an array of arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      bad("'" + key + "' row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = number(row[k], key);
  }
  return out;
}

long integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad("'" + key + "' must be an integer");
  return j.get<long>();
}

void expect_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const std::string& key) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(ErrorCode::DimensionMismatch, "'" + key + "' is " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                                                  "x" + std::to_string(cols));
}

}  // namespace

AnalysisConfig fixture_config(const std::string& name) {
  Fixture f;
  if (name == "paper-example") {
    f = four_mode_example();
  } else if (name == "tiny") {
    f = tiny_example();
  } else {
    bad("unknown fixture '" + name + "'");
  }
  AnalysisConfig cfg;
  cfg.source = f.name;
  cfg.theta = f.theta;
  cfg.R = f.R;
  cfg.M = f.M;
  cfg.Pi = f.Pi;
  return cfg;
}

AnalysisConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("malformed JSON at " + where(text, e.byte) + ": " + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  AnalysisConfig cfg;
  if (j.contains("fixture")) {
    if (!j["fixture"].is_string()) bad("'fixture' must be a string");
    cfg = fixture_config(j["fixture"].get<std::string>());
  } else {
    for (const char* key : {"n", "m", "R", "M"})
      if (!j.contains(key)) bad(std::string("missing '") + key + "'");
    const long n = integer(j["n"], "n");
    const long m = integer(j["m"], "m");
    if (n <= 0 || m <= 0) bad("'n' and 'm' must be positive");
    cfg.R = matrix(j["R"], "R");
    cfg.M = matrix(j["M"], "M");
    cfg.theta = j.contains("theta") ? matrix(j["theta"], "theta") : Mat(0.5 * block_J(n));
    expect_shape(cfg.theta, n, n, "theta");
    expect_shape(cfg.R, n, n, "R");
    expect_shape(cfg.M, m, n, "M");
  }
  const Eigen::Index n = cfg.theta.rows();

  const char* pi_key = j.contains("Pi") ? "Pi" : (j.contains("pi") ? "pi" : nullptr);
  if (pi_key) {
    cfg.Pi = matrix(j[pi_key], pi_key);
  } else if (cfg.Pi.size() == 0) {
    cfg.Pi = Mat::Identity(n, n);
  }
  expect_shape(cfg.Pi, n, n, "Pi");

  if (j.contains("theta_list")) {
    if (!j["theta_list"].is_array()) bad("'theta_list' must be an array");
    cfg.theta_list.clear();
    for (const auto& v : j["theta_list"]) {
      const double th = number(v, "theta_list");
      if (th < 0) bad("'theta_list' entries must be non-negative");
      cfg.theta_list.push_back(th);
    }
  }
  if (j.contains("orders")) {
    if (!j["orders"].is_array()) bad("'orders' must be an array");
    cfg.orders.clear();
    for (const auto& v : j["orders"]) {
      const long r = integer(v, "orders");
      if (r < 2) bad("'orders' entries must be at least 2");
      cfg.orders.push_back(static_cast<int>(r));
    }
  }
  if (j.contains("eps_grid")) {
    const json& g = j["eps_grid"];
    if (!g.is_object()) bad("'eps_grid' must be an object");
    EpsilonGrid grid;
    grid.min = g.contains("min") ? number(g["min"], "eps_grid.min") : 0.0;
    grid.max = g.contains("max") ? number(g["max"], "eps_grid.max") : grid.min;
    grid.steps = g.contains("steps") ? static_cast<int>(integer(g["steps"], "eps_grid.steps")) : 0;
    if (grid.steps < 0) bad("'eps_grid.steps' must be non-negative");
    if (grid.max < grid.min) bad("'eps_grid.max' is below 'eps_grid.min'");
    cfg.eps_grid = grid;
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (!q.is_object()) bad("'quadrature' must be an object");
    if (q.contains("abs_tol")) cfg.quad.abs_tol = number(q["abs_tol"], "quadrature.abs_tol");
    if (q.contains("rel_tol")) cfg.quad.rel_tol = number(q["rel_tol"], "quadrature.rel_tol");
    try {
      cfg.quad.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  if (j.contains("mc")) {
    const json& q = j["mc"];
    if (!q.is_object()) bad("'mc' must be an object");
    McSettings mc;
    if (q.contains("h")) mc.h = number(q["h"], "mc.h");
    if (q.contains("steps")) mc.steps = integer(q["steps"], "mc.steps");
    if (q.contains("paths")) mc.paths = integer(q["paths"], "mc.paths");
    if (q.contains("seed")) {
      if (!q["seed"].is_number_unsigned()) bad("'mc.seed' must be a non-negative integer");
      mc.seed = q["seed"].get<std::uint64_t>();
    }
    if (!(mc.h > 0) || mc.steps < 1 || mc.paths < 1) bad("'mc' needs h > 0, steps >= 1, paths >= 1");
    cfg.mc = mc;
  }
  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

OqhoModel config_model(const AnalysisConfig& cfg) {
  try {
    OqhoModel model = build_model(cfg.theta, cfg.R, cfg.M);
    validate_weight(model, cfg.Pi, true);
    return model;
  } catch (const Error& e) {
    throw Error(ErrorCode::ModelInvalid, e.what());
  }
}

}  // namespace oqho
