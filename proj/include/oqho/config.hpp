#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oqho/model.hpp"
#include "oqho/quadrature.hpp"

namespace oqho {

struct EpsilonGrid {
  double min = 0;
  double max = 0;
  int steps = 0;

  std::vector<double> values() const;
};

struct McSettings {
  double h = 0.05;
  long steps = 200;
  long paths = 20000;
  std::uint64_t seed = 1;
};

struct AnalysisConfig {
  std::string source = "inline";  // or a fixture name
  Mat theta, R, M, Pi;
  std::vector<double> theta_list;
  std::vector<int> orders{2, 3};
  std::optional<EpsilonGrid> eps_grid;  // unset: [n alpha, 5 n alpha]
  QuadratureSpec quad;
  std::optional<McSettings> mc;
};

// Throws ConfigParse (with line:column for malformed JSON) or DimensionMismatch.
AnalysisConfig parse_config(const std::string& text);
AnalysisConfig load_config(const std::string& path);
// "paper-example" or "tiny"
AnalysisConfig fixture_config(const std::string& name);

// Builds the model and checks Pi; any failure becomes ModelInvalid.
OqhoModel config_model(const AnalysisConfig& cfg);

}  // namespace oqho
