#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "oqho/config.hpp"
#include "oqho/cumulants.hpp"
#include "oqho/large_dev.hpp"

namespace oqho {

using Json = nlohmann::ordered_json;

// Finite values pass through; +inf -> {"inf": true}, -inf -> {"inf": true, "negative": true}, NaN -> null.
Json tagged(double v);
Json to_json(const Mat& m);
Json to_json(const CMat& m);  // {"re": [[...]], "im": [[...]]}

// Serialises with every double printed as %.17g.
std::string dump(const Json& j, int indent = 2);
std::string format_double(double v);

struct ReportOptions {
  bool timing = false;
};

struct Report {
  Json json;
  int exit_code = 0;  // 0, or 2 when some block failed
};

// Model, steady state, quartic, cumulant, deviation and classical blocks.
Report analyze(const AnalysisConfig& cfg, const ReportOptions& opts = {});

// Classical Monte Carlo block only; requires cfg.mc.
Report simulate_report(const AnalysisConfig& cfg, const ReportOptions& opts = {});

// Default epsilon grid [n alpha, 5 n alpha] with 9 points unless configured.
std::vector<double> epsilon_grid(const AnalysisConfig& cfg, const EnvelopeParams& env, Eigen::Index n);

std::string bound_csv(const TailBoundCurve& c);
std::string delta_csv(const DescentTable& t);
std::string cumulants_csv(const std::vector<int>& orders, const std::vector<double>& rates);

}  // namespace oqho
