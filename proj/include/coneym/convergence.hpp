#pragma once

// Refinement studies: evaluate measurements on a sequence of grids, compute
// observed orders, and judge each measurement against its law.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coneym/configurations.hpp"

namespace coneym {

/// Values at or below this are treated as exact zeros: their ratios carry no
/// order information.
inline constexpr double kRoundoffFloor = 1e-10;
inline constexpr double kMinOrder = 1.9;

struct ConvergenceRow {
  double h = 0.0;
  std::string name;
  double value = 0.0;
  std::optional<double> observed_order;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

struct LawOutcome {
  std::string name;
  Law law = Law::to_zero;
  bool pass = false;
  std::string detail;
};

inline std::optional<double> observed_order(double coarse, double fine, double ratio = 2.0) {
  if (coarse <= kRoundoffFloor && fine <= kRoundoffFloor) return std::nullopt;
  if (fine <= 0.0 || coarse <= 0.0) return std::nullopt;
  return std::log(coarse / fine) / std::log(ratio);
}

/// Judges a sequence of values (coarse to fine, each level halving h).
inline LawOutcome judge(const std::string& name, const ExpectedRecord& rec, const std::vector<double>& values) {
  LawOutcome out{name, rec.law, true, ""};
  std::ostringstream why;
  why.precision(4);
  if (values.empty()) return {name, rec.law, false, "no values"};
  switch (rec.law) {
    case Law::to_zero:
      for (std::size_t i = 1; i < values.size(); ++i) {
        const double a = values[i - 1];
        const double b = values[i];
        if (a <= kRoundoffFloor && b <= kRoundoffFloor) continue;
        const auto p = observed_order(a, b);
        if (!p || *p < kMinOrder) {
          out.pass = false;
          why << "order " << (p ? *p : 0.0) << " < " << kMinOrder << " at level " << i << "; ";
        }
      }
      if (out.pass) why << "all observed orders >= " << kMinOrder << " or below round-off";
      break;
    case Law::bounded_below:
      out.pass = values.front() > kRoundoffFloor && values.back() >= 0.5 * values.front();
      why << "fine/coarse = " << values.back() / values.front();
      break;
    case Law::converges_to: {
      const double err = std::abs(values.back() - rec.target);
      out.pass = err <= rec.tolerance * std::abs(rec.target);
      why << "finest " << values.back() << " vs target " << rec.target << ", relative error "
          << err / std::abs(rec.target);
      break;
    }
  }
  out.detail = why.str();
  return out;
}

struct StudyResult {
  ConvergenceTable table;
  std::vector<LawOutcome> outcomes;
  bool pass = true;
};

/// Builds the configuration at each resolution (strictly increasing, each
/// double the previous) and judges every expected record.
inline StudyResult refinement_study(const std::function<NamedConfiguration(int)>& build,
                                    const std::vector<int>& resolutions) {
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1]) throw DomainError("resolutions must be strictly increasing");
  StudyResult result;
  std::vector<ExpectedRecord> expected;
  std::map<std::string, std::vector<double>> values;
  std::vector<double> hs;
  for (int n : resolutions) {
    NamedConfiguration cfg = build(n);
    if (expected.empty()) expected = cfg.expected;
    const auto m = cfg.measure(cfg);
    hs.push_back(cfg.chart->max_spacing());
    for (const auto& rec : expected) {
      auto it = m.find(rec.verifier);
      if (it == m.end()) throw DomainError("configuration does not measure '" + rec.verifier + "'");
      values[rec.verifier].push_back(it->second);
    }
  }
  for (const auto& rec : expected) {
    const auto& v = values[rec.verifier];
    for (std::size_t i = 0; i < v.size(); ++i) {
      ConvergenceRow row{hs[i], rec.verifier, v[i], std::nullopt};
      if (i > 0) row.observed_order = observed_order(v[i - 1], v[i], hs[i - 1] / hs[i]);
      result.table.rows.push_back(row);
    }
    result.outcomes.push_back(judge(rec.verifier, rec, v));
    result.pass = result.pass && result.outcomes.back().pass;
  }
  return result;
}

}  // namespace coneym
