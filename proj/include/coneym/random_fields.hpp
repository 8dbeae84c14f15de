#pragma once

// Smooth random forms for property tests: truncated trigonometric
// polynomials with integer frequencies, drawn from a seeded generator.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "coneym/cone.hpp"

namespace coneym {

struct RandomFieldOptions {
  int max_frequency = 2;
  int modes = 3;
  double scale = 0.1;
};

/// Uniform doubles in [0, 1) from the top 53 bits of mt19937_64, so the
/// stream is identical on every platform.
class FieldRng {
 public:
  explicit FieldRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

 private:
  std::mt19937_64 engine_;
};

/// Every coefficient is a sum of `modes` terms a cos(k.x) + b sin(k.x) with
/// |k_i| <= max_frequency (in units of 2 pi / period length) and
/// a, b uniform in [-scale, scale].
inline Form random_form(const ChartPtr& chart, const AlgebraPtr& algebra, int degree, FieldRng& rng,
                        const RandomFieldOptions& opts = {}) {
  const int m = chart->dim();
  struct Mode {
    std::array<double, kMaxDim> k{};
    double a = 0.0;
    double b = 0.0;
  };
  Form f(chart, algebra, degree);
  const std::size_t ncoef = f.stride();
  std::vector<std::vector<Mode>> modes(ncoef);
  for (auto& list : modes) {
    for (int i = 0; i < opts.modes; ++i) {
      Mode md;
      for (int a = 0; a < m; ++a) {
        const auto& ax = chart->axis(a);
        const double length = ax.spacing * static_cast<double>(ax.size);
        md.k[a] = 2.0 * std::numbers::pi / length * rng.integer(-opts.max_frequency, opts.max_frequency);
      }
      md.a = rng.uniform(-opts.scale, opts.scale);
      md.b = rng.uniform(-opts.scale, opts.scale);
      list.push_back(md);
    }
  }
  parallel::for_each(chart->points(), [&](std::size_t p) {
    const auto x = chart->position(p);
    double* out = f.at(p, 0);
    for (std::size_t c = 0; c < ncoef; ++c) {
      double v = 0.0;
      for (const auto& md : modes[c]) {
        double phase = 0.0;
        for (int a = 0; a < m; ++a) phase += md.k[a] * x[a];
        v += md.a * std::cos(phase) + md.b * std::sin(phase);
      }
      out[c] = v;
    }
  });
  return f;
}

inline ConnectionPair random_pair(const ChartPtr& chart, const AlgebraPtr& algebra, FieldRng& rng,
                                  const RandomFieldOptions& opts = {}) {
  Form A = random_form(chart, algebra, 1, rng, opts);
  Form B = random_form(chart, algebra, 0, rng, opts);
  return {std::move(A), std::move(B)};
}

inline ConeForm random_cone_form(const ChartPtr& chart, const AlgebraPtr& algebra, int degree, FieldRng& rng,
                                 const RandomFieldOptions& opts = {}) {
  std::optional<Form> eta, xi;
  if (degree <= chart->dim()) eta = random_form(chart, algebra, degree, rng, opts);
  if (degree >= 1) xi = random_form(chart, algebra, degree - 1, rng, opts);
  return {degree, std::move(eta), std::move(xi)};
}

/// Random constant 2-form plus d of a random real 1-form. Discretely closed
/// on periodic charts.
inline RealTwoForm random_closed_two_form(const ChartPtr& chart, FieldRng& rng, const RandomFieldOptions& opts = {}) {
  Form a = random_form(chart, algebras::reals(), 1, rng, opts);
  Form z = exterior_derivative(a);
  const auto& table = multi_indices(chart->dim());
  for (int c = 0; c < table.count(2); ++c) {
    const double v = rng.uniform(-1.0, 1.0);
    for (std::size_t p = 0; p < chart->points(); ++p) z.at(p, c)[0] += v;
  }
  return RealTwoForm(std::move(z));
}

}  // namespace coneym
