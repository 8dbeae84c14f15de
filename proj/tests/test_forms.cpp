#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace coneym;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

RandomFieldOptions smooth() {
  RandomFieldOptions o;
  o.max_frequency = 1;
  return o;
}

double max_abs(const Form& f) {
  double m = 0.0;
  for (double v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

/// Observed orders of a sequence of values on halving grids.
std::vector<double> orders(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 1; i < v.size(); ++i) out.push_back(oracle::log2_ratio(v[i - 1], v[i]));
  return out;
}

}  // namespace

TEST(ExteriorDerivative, SquaresToZeroOnPeriodicCharts) {
  for (int m : {2, 3, 4}) {
    auto chart = Chart::torus(m, 6, 1.0);
    FieldRng rng(m);
    for (int k = 0; k + 2 <= m; ++k) {
      const Form a = random_form(chart, algebras::su2(), k, rng);
      EXPECT_LT(max_abs(exterior_derivative(exterior_derivative(a))), 1e-12) << "m=" << m << " k=" << k;
    }
  }
}

TEST(ExteriorDerivative, SecondOrderAgainstAnalyticGradient) {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    auto chart = Chart::torus(2, n, 1.0);
    const Form f = Form::sample(chart, algebras::reals(), 0, [](const auto& x, double* out) {
      out[0] = std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
    });
    const Form exact = Form::sample(chart, algebras::reals(), 1, [](const auto& x, double* out) {
      out[0] = kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
      out[1] = -kTwoPi * std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
    });
    err.push_back(max_abs(exterior_derivative(f) - exact));
  }
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}

TEST(ExteriorDerivative, LeibnizRuleHoldsToSecondOrder) {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    auto chart = Chart::torus(3, n, 1.0);
    const MetricField g = MetricField::euclidean(chart);
    FieldRng rng(21);
    const Form a = random_form(chart, algebras::reals(), 1, rng, smooth());
    const Form b = random_form(chart, algebras::reals(), 1, rng, smooth());
    Form r = exterior_derivative(wedge(a, b));
    r -= wedge(exterior_derivative(a), b);
    r += wedge(a, exterior_derivative(b));
    err.push_back(norm(r, g));
  }
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}

TEST(ExteriorDerivative, MarginGrowsOnBoxes) {
  auto chart = Chart::padded_box(3, 8, 0.0, 1.0, 2);
  const Form f = Form::sample(chart, algebras::reals(), 0, [](const auto& x, double* out) { out[0] = x[0] * x[1]; });
  const Form df = exterior_derivative(f);
  EXPECT_EQ(df.margin(), 1);
  EXPECT_EQ(exterior_derivative(df).margin(), 2);
  // x y is differenced exactly
  for (std::size_t p = 0; p < chart->points(); ++p)
    if (df.valid(p)) {
      EXPECT_NEAR(df.at(p, 0)[0], chart->coordinate(p, 1), 1e-13);
      EXPECT_NEAR(df.at(p, 1)[0], chart->coordinate(p, 0), 1e-13);
    }
}

TEST(HodgeStar, MatchesLeviCivitaContraction) {
  for (int m : {2, 3, 4}) {
    FieldRng rng(100 + m);
    const Eigen::MatrixXd g = oracle::random_spd(m, rng);
    auto chart = Chart::torus(m, 3, 1.0);
    const MetricField metric(chart, [&](const auto&) { return g; });
    for (int k = 0; k <= m; ++k) {
      const Form a = random_form(chart, algebras::reals(), k, rng);
      const Form s = hodge_star(a, metric);
      for (std::size_t p = 0; p < chart->points(); ++p) {
        std::vector<double> comps(a.components());
        for (int c = 0; c < a.components(); ++c) comps[c] = a.at(p, c)[0];
        const auto expected = oracle::hodge_star(g, k, comps);
        for (int c = 0; c < s.components(); ++c) EXPECT_NEAR(s.at(p, c)[0], expected[c], 1e-12) << m << k;
      }
    }
  }
}

TEST(HodgeStar, DoubleStarSign) {
  for (int m : {2, 3, 4}) {
    FieldRng rng(7 * m);
    const Eigen::MatrixXd g = oracle::random_spd(m, rng);
    auto chart = Chart::torus(m, 3, 1.0);
    const MetricField metric(chart, [&](const auto&) { return g; });
    for (int k = 0; k <= m; ++k) {
      const Form a = random_form(chart, algebras::su2(), k, rng);
      Form ss = hodge_star(hodge_star(a, metric), metric);
      ss.axpy(-((k * (m - k)) % 2 == 0 ? 1.0 : -1.0), a);
      EXPECT_LT(max_abs(ss), 1e-12);
    }
  }
}

TEST(HodgeStar, WedgeWithStarIsTheInnerDensity) {
  FieldRng rng(9);
  const Eigen::MatrixXd g = oracle::random_spd(3, rng);
  auto chart = Chart::torus(3, 3, 1.0);
  const MetricField metric(chart, [&](const auto&) { return g; });
  for (int k = 0; k <= 3; ++k) {
    const Form a = random_form(chart, algebras::reals(), k, rng);
    const Form b = random_form(chart, algebras::reals(), k, rng);
    const Form top = wedge(a, hodge_star(b, metric));
    for (std::size_t p = 0; p < chart->points(); ++p)
      EXPECT_NEAR(top.at(p, 0)[0], inner_density(a, b, metric, p), 1e-12);
  }
}

TEST(ZetaAdjoint, PointwiseAdjointOfWedge) {
  for (int m : {3, 4}) {
    FieldRng rng(40 + m);
    auto chart = Chart::torus(m, 4, 1.0);
    const Eigen::MatrixXd g0 = oracle::random_spd(m, rng);
    const MetricField metric(chart, [&](const auto& x) {
      return Eigen::MatrixXd(g0 * (1.0 + 0.3 * std::sin(kTwoPi * x[0])));
    });
    const RealTwoForm zeta = random_closed_two_form(chart, rng);
    for (int k = 0; k + 2 <= m; ++k) {
      const Form a = random_form(chart, algebras::su2(), k, rng);
      const Form b = random_form(chart, algebras::su2(), k + 2, rng);
      const Form za = zeta_wedge(zeta, a);
      const Form zb = zeta_adjoint(zeta, b, metric);
      for (std::size_t p = 0; p < chart->points(); ++p)
        EXPECT_NEAR(inner_density(za, b, metric, p), inner_density(a, zb, metric, p), 1e-13);
    }
  }
}

TEST(Codifferential, ExactAdjointOfCovariantDerivativeOnTori) {
  for (int m : {3, 4}) {
    FieldRng rng(60 + m);
    auto chart = Chart::torus(m, m == 3 ? 8 : 5, 1.0);
    const MetricField metric = MetricField::conformal(chart, [](const auto& x) {
      return 1.0 + 0.2 * std::cos(kTwoPi * x[1]);
    });
    const Form A = random_form(chart, algebras::su2(), 1, rng);
    for (int k = 0; k < m; ++k) {
      const Form eta = random_form(chart, algebras::su2(), k, rng);
      const Form omega = random_form(chart, algebras::su2(), k + 1, rng);
      const double lhs = inner_product(covariant_derivative(A, eta), omega, metric);
      const double rhs = inner_product(eta, codifferential(A, omega, metric), metric);
      EXPECT_NEAR(lhs, rhs, 1e-13 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST(Codifferential, LaplacianOfAPlaneWave) {
  // d*d f = -lap f = (2 pi)^2 |k|^2 f for f = sin(2 pi (x + 2 y))
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    auto chart = Chart::torus(3, n, 1.0);
    const MetricField g = MetricField::euclidean(chart);
    const Form f = Form::sample(chart, algebras::reals(), 0, [](const auto& x, double* out) {
      out[0] = std::sin(kTwoPi * (x[0] + 2.0 * x[1]));
    });
    Form r = codifferential(Form(chart, algebras::reals(), 1), exterior_derivative(f), g);
    r.axpy(-5.0 * kTwoPi * kTwoPi, f);
    err.push_back(norm(r, g));
  }
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}

TEST(Curvature, AbelianCurvatureIsDA) {
  auto chart = Chart::torus(3, 8, 1.0);
  FieldRng rng(2);
  const Form A = random_form(chart, algebras::u1(), 1, rng);
  EXPECT_LT(max_abs(curvature(A) - exterior_derivative(A)), 1e-15);
}

TEST(Curvature, ConstantSu2ConnectionGivesCommutators) {
  auto chart = Chart::torus(3, 4, 1.0);
  auto g = algebras::su2();
  const std::vector<double> coeffs{0.3, -0.2, 0.5, 0.1, 0.7, -0.4, -0.6, 0.2, 0.25};
  const Form A = Form::constant(chart, g, 1, coeffs);
  const Form F = curvature(A);
  const auto& t = multi_indices(3);
  for (int c = 0; c < 3; ++c) {
    const auto ij = t.indices(2, c);
    const Matrix ai = g->to_matrix(Eigen::Map<const Eigen::VectorXd>(coeffs.data() + 3 * ij[0], 3));
    const Matrix aj = g->to_matrix(Eigen::Map<const Eigen::VectorXd>(coeffs.data() + 3 * ij[1], 3));
    const Matrix expected = ai * aj - aj * ai;
    const Matrix got = g->to_matrix(Eigen::Map<const Eigen::VectorXd>(F.at(0, c), 3));
    EXPECT_LT((got - expected).norm(), 1e-14);
  }
}

TEST(Curvature, BianchiAndSquareOfCovariantDerivative) {
  std::vector<double> bianchi, square;
  for (int n : {16, 32, 64}) {
    auto chart = Chart::torus(3, n, 1.0);
    const MetricField metric = MetricField::euclidean(chart);
    FieldRng rng(5);
    const Form A = random_form(chart, algebras::su2(), 1, rng, smooth());
    const Form s = random_form(chart, algebras::su2(), 0, rng, smooth());
    const Form F = curvature(A);
    bianchi.push_back(norm(covariant_derivative(A, F), metric));
    Form r = covariant_derivative(A, covariant_derivative(A, s));
    r -= bracket_wedge(F, s);
    square.push_back(norm(r, metric));
  }
  for (double p : orders(bianchi)) EXPECT_GE(p, 1.9);
  for (double p : orders(square)) EXPECT_GE(p, 1.9);
}

TEST(Bracket, GradedSymmetry) {
  auto chart = Chart::torus(4, 3, 1.0);
  FieldRng rng(12);
  for (int j = 0; j <= 2; ++j)
    for (int k = 0; j + k <= 4; ++k) {
      const Form a = random_form(chart, algebras::so(4), j, rng);
      const Form b = random_form(chart, algebras::so(4), k, rng);
      Form r = bracket_wedge(a, b);
      r.axpy((j * k) % 2 == 0 ? 1.0 : -1.0, bracket_wedge(b, a));
      EXPECT_LT(max_abs(r), 1e-14);
    }
}

TEST(Wedge, AlgebraProductsLandInTheEnvelope) {
  auto chart = Chart::torus(3, 3, 1.0);
  FieldRng rng(4);
  const Form a = random_form(chart, algebras::su2(), 1, rng);
  const Form aa = wedge(a, a);
  EXPECT_EQ(aa.algebra()->kind(), Algebra::Kind::envelope);
  EXPECT_THROW(inner_product(aa, aa, MetricField::euclidean(chart)), AlgebraError);
  // a ^ a = (1/2) [a ^ a] for an algebra-valued 1-form
  Form back = to_algebra(aa, algebras::su2());
  back.axpy(-0.5, bracket_wedge(a, a));
  EXPECT_LT(max_abs(back), 1e-14);
}

TEST(PairedWedge, GradedSymmetryAndIntegration) {
  auto chart = Chart::torus(3, 4, 2.0);
  FieldRng rng(8);
  const Form a = random_form(chart, algebras::su2(), 1, rng);
  const Form b = random_form(chart, algebras::su2(), 2, rng);
  EXPECT_LT(max_abs(paired_wedge(a, b) - paired_wedge(b, a)), 1e-15);
  const Form vol = Form::constant(chart, algebras::reals(), 3, {1.0});
  EXPECT_NEAR(integrate_top(vol), 8.0, 1e-13);
}

TEST(Forms, CompatibilityErrors) {
  auto c1 = Chart::torus(2, 4, 1.0);
  auto c2 = Chart::torus(2, 5, 1.0);
  const Form a(c1, algebras::su2(), 1);
  EXPECT_THROW(a + Form(c2, algebras::su2(), 1), ChartMismatch);
  EXPECT_THROW(a + Form(c1, algebras::su2(), 2), DegreeError);
  EXPECT_THROW(a + Form(c1, algebras::u1(), 1), AlgebraError);
  EXPECT_THROW(Form(c1, algebras::su2(), 3), DegreeError);
  EXPECT_THROW(exterior_derivative(Form(c1, algebras::su2(), 2)), DegreeError);
  EXPECT_THROW(RealTwoForm(Form(c1, algebras::su2(), 2)), AlgebraError);
}

TEST(RealTwoForm, ClosednessDefectIsMeasured) {
  auto chart = Chart::torus(3, 8, 1.0);
  FieldRng rng(1);
  EXPECT_LT(random_closed_two_form(chart, rng).closedness_defect(), 1e-12);
  const RealTwoForm open = RealTwoForm::sample(chart, [](const auto& x, double* out) {
    out[0] = std::sin(kTwoPi * x[2]);
    out[1] = 0.0;
    out[2] = 0.0;
  });
  EXPECT_GT(open.closedness_defect(), 1.0);
}

TEST(HodgeStar, FlatPermutationCases) {
  auto c3 = Chart::torus(3, 3, 1.0);
  const Form dx1 = Form::constant(c3, algebras::reals(), 1, {1.0, 0.0, 0.0});
  const Form s = hodge_star(dx1, MetricField::euclidean(c3));
  EXPECT_EQ(s.at(0, 0)[0], 0.0);
  EXPECT_EQ(s.at(0, 1)[0], 0.0);
  EXPECT_EQ(s.at(0, 2)[0], 1.0);

  auto c4 = Chart::torus(4, 3, 1.0);
  const Form zeta = Form::constant(c4, algebras::reals(), 2, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  EXPECT_EQ(max_abs(hodge_star(zeta, MetricField::euclidean(c4)) - zeta), 0.0);
}

TEST(InnerProduct, ZeroAndConstantU1) {
  auto chart = Chart::torus(2, 5, 2.0);
  const MetricField g = MetricField::euclidean(chart);
  const Form zero(chart, algebras::su2(), 1);
  EXPECT_EQ(inner_product(zero, zero, g), 0.0);
  // alpha = i dx^1 pairs to 1 pointwise, so the integral is the area
  const Form a = Form::constant(chart, algebras::u1(), 1, {1.0, 0.0});
  EXPECT_NEAR(inner_product(a, a, g), 4.0, 1e-12);
}

TEST(ExteriorDerivative, SineOneFormOnTheTorus) {
  std::vector<double> err;
  for (int n : {16, 32, 64}) {
    auto chart = Chart::torus(2, n, 1.0);
    const Form a = Form::sample(chart, algebras::reals(), 1, [](const auto& x, double* out) {
      out[0] = 0.0;
      out[1] = std::sin(kTwoPi * x[0]);
    });
    const Form exact = Form::sample(chart, algebras::reals(), 2, [](const auto& x, double* out) {
      out[0] = kTwoPi * std::cos(kTwoPi * x[0]);
    });
    err.push_back(max_abs(exterior_derivative(a) - exact));
  }
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}

TEST(Curvature, ZeroConnectionIsFlat) {
  auto chart = Chart::torus(3, 4, 1.0);
  EXPECT_EQ(max_abs(curvature(Form(chart, algebras::su2(), 1))), 0.0);
}

TEST(Curvature, TorusCounterexamplePotentialOnAPatch) {
  // a = (1/2pi) x1 dx3 + (1/4pi) sin 2x2 sin x3 dx1, valued in u(1)
  const double pi = closed_form::pi;
  std::vector<double> err;
  for (int n : {8, 16, 32}) {
    auto chart = Chart::padded_box(4, n, 0.0, pi / 2, 1);
    const Form a = Form::sample(chart, algebras::u1(), 1, [&](const auto& x, double* out) {
      out[0] = std::sin(2 * x[1]) * std::sin(x[2]) / (4 * pi);
      out[1] = 0.0;
      out[2] = x[0] / (2 * pi);
      out[3] = 0.0;
    });
    const Form exact = Form::sample(chart, algebras::u1(), 2, [&](const auto& x, double* out) {
      const auto F = closed_form::t4_curvature(x[1], x[2]);
      std::fill(out, out + 6, 0.0);
      out[0] = F[0];
      out[1] = F[1];
    });
    Form diff = curvature(a);
    diff -= exact;
    err.push_back(diff.sup_norm());
  }
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}

TEST(Codifferential, ConstantFormsAreCoclosed) {
  auto chart = Chart::torus(4, 4, 1.0);
  FieldRng rng(3);
  const Eigen::MatrixXd g0 = oracle::random_spd(4, rng);
  const MetricField g(chart, [&](const auto&) { return g0; });
  const Form a = Form::constant(chart, algebras::reals(), 2, {0.3, -1.0, 2.0, 0.5, 0.1, -0.7});
  EXPECT_LT(max_abs(codifferential(Form(chart, algebras::reals(), 1), a, g)), 1e-10);
}

TEST(ZetaAdjoint, ZeroZetaGivesZero) {
  auto chart = Chart::torus(4, 3, 1.0);
  FieldRng rng(5);
  const RealTwoForm zero = RealTwoForm::zero(chart);
  const Form a = random_form(chart, algebras::su2(), 1, rng);
  const Form b = random_form(chart, algebras::su2(), 3, rng);
  EXPECT_EQ(max_abs(zeta_wedge(zero, a)), 0.0);
  EXPECT_EQ(max_abs(zeta_adjoint(zero, b, MetricField::euclidean(chart))), 0.0);
}

TEST(ZetaAdjoint, TwentyRandomPairsOnFlatT4) {
  auto chart = Chart::torus(4, 4, 1.0);
  const MetricField g = MetricField::euclidean(chart);
  FieldRng rng(99);
  const RealTwoForm zeta = RealTwoForm::sample(chart, [](const auto&, double* out) {
    std::fill(out, out + 6, 0.0);
    out[0] = 1.0;
    out[5] = 1.0;
  });
  for (int t = 0; t < 20; ++t) {
    const int k = t % 3;
    const Form a = random_form(chart, algebras::su2(), k, rng);
    const Form b = random_form(chart, algebras::su2(), k + 2, rng);
    EXPECT_NEAR(inner_product(zeta_wedge(zeta, a), b, g), inner_product(a, zeta_adjoint(zeta, b, g), g), 1e-10);
  }
}

TEST(Integration, ConstantDensities) {
  auto chart = Chart::torus(2, 7, 1.0);
  const MetricField g = MetricField::euclidean(chart);
  std::vector<double> ones(chart->points(), 1.0), zeros(chart->points(), 0.0);
  EXPECT_NEAR(integrate_density(ones, chart, g, 0).value, 1.0, 1e-12);
  EXPECT_EQ(integrate_density(zeros, chart, g, 0).value, 0.0);
}

TEST(Integration, TaubNutBoxVolumeSelfConverges) {
  // volume of [1,2]^3 under e^{4 phi} delta; reference from a 128^3 run
  auto volume = [](int n) {
    auto chart = Chart::padded_box(3, n, 1.0, 2.0, 2);
    const MetricField g = MetricField::conformal(chart, [](const auto& x) {
      const double e2 = closed_form::tn_exp2phi({x[0], x[1], x[2]});
      return e2 * e2;
    });
    std::vector<double> ones(chart->points(), 1.0);
    return integrate_density(ones, chart, g, 0).value;
  };
  const double ref = volume(128);
  std::vector<double> err;
  for (int n : {8, 16, 32}) err.push_back(std::abs(volume(n) - ref));
  for (double p : orders(err)) EXPECT_GE(p, 1.9);
}
