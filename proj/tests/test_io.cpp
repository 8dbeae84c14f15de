#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "coneym/serialization.hpp"

using namespace coneym;

namespace {

Form sample_form() {
  auto chart = Chart::padded_box(3, 5, -1.0, 2.0, 2);
  FieldRng rng(77);
  Form f = random_form(chart, algebras::so(4), 2, rng);
  f.set_margin(1);
  return f;
}

void expect_identical(const Form& a, const Form& b) {
  EXPECT_TRUE(*a.chart() == *b.chart());
  EXPECT_EQ(a.degree(), b.degree());
  EXPECT_EQ(a.margin(), b.margin());
  EXPECT_EQ(a.algebra()->name(), b.algebra()->name());
  EXPECT_EQ(a.data(), b.data());
}

}  // namespace

TEST(Serialization, BinaryRoundTripIsBitExact) {
  const Form f = sample_form();
  std::stringstream ss;
  write_form(ss, f);
  expect_identical(f, read_form(ss));

  const auto path = std::filesystem::temp_directory_path() / "coneym_roundtrip.bin";
  save_form(path.string(), f);
  expect_identical(f, load_form(path.string()));
  std::filesystem::remove(path);
}

TEST(Serialization, BinaryRejectsCorruptInput) {
  const Form f = sample_form();
  std::stringstream ss;
  write_form(ss, f);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 4), "CYMF");

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream s1(bad);
  EXPECT_THROW(read_form(s1), DomainError);

  std::stringstream s2(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_form(s2), DomainError);

  std::stringstream s3(bytes.substr(0, 10));
  EXPECT_THROW(read_form(s3), DomainError);

  EXPECT_THROW(load_form("/nonexistent/dir/form.bin"), DomainError);
}

TEST(Serialization, JsonRoundTripAndSizeLimit) {
  const Form f = sample_form();
  const Json j = form_to_json(f);
  expect_identical(f, form_from_json(Json::parse(j.dump())));

  Json broken = j;
  broken["coefficients"].erase(0);
  EXPECT_THROW(form_from_json(broken), DomainError);

  const Form big(Chart::torus(3, 41, 1.0), algebras::reals(), 0);
  EXPECT_THROW(form_to_json(big), DomainError);
}

TEST(Serialization, ExactDecimalsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) EXPECT_EQ(std::stod(exact(v)), v);
}

TEST(Serialization, TablesAndTraces) {
  ConvergenceTable t;
  t.rows.push_back({0.5, "r", 0.25, std::nullopt});
  t.rows.push_back({0.25, "r", 0.0625, 2.0});
  EXPECT_EQ(table_csv(t), "h,residual,value,observed_order\n0.5,r,0.25,\n0.25,r,0.0625,2\n");
  const Json j = table_to_json(t);
  EXPECT_TRUE(j[0]["observed_order"].is_null());
  EXPECT_EQ(j[1]["observed_order"].get<double>(), 2.0);

  auto chart = Chart::torus(2, 8, 1.0);
  FieldRng rng(3);
  FlowOptions opts;
  opts.max_iter = 3;
  const FlowReport r = gradient_flow(random_pair(chart, algebras::su2(), rng), RealTwoForm::zero(chart),
                                     MetricField::euclidean(chart), opts);
  const std::string csv = flow_trace_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.energy_trace.size()) + 1);
  EXPECT_EQ(flow_report_to_json(r)["iterations"].get<int>(), r.iterations);

  const GridLoop loop{{1, 2}, {1, 2, -1, -2}};
  const GridLoop back = loop_from_json(loop_to_json(loop));
  EXPECT_EQ(back.base, loop.base);
  EXPECT_EQ(back.steps, loop.steps);

  const Json p = period_report_to_json(classify_period_group(std::vector<std::string>{"1", "2/3"}));
  EXPECT_EQ(p["minimal"], "1/3");
  EXPECT_EQ(p["classification"], "discrete");
}

TEST(Convergence, ObservedOrder) {
  EXPECT_DOUBLE_EQ(*observed_order(4.0, 1.0), 2.0);
  EXPECT_FALSE(observed_order(1e-12, 1e-13).has_value());
  EXPECT_FALSE(observed_order(1.0, 0.0).has_value());
  EXPECT_NEAR(*observed_order(9.0, 1.0, 3.0), 2.0, 1e-15);
}

TEST(Convergence, JudgeLaws) {
  const ExpectedRecord zero{"r", Law::to_zero};
  EXPECT_TRUE(judge("r", zero, {1.0, 0.25, 0.0625}).pass);
  EXPECT_FALSE(judge("r", zero, {1.0, 0.5, 0.25}).pass);
  EXPECT_TRUE(judge("r", zero, {1e-12, 3e-12, 2e-13}).pass);
  EXPECT_FALSE(judge("r", zero, {}).pass);

  const ExpectedRecord below{"r", Law::bounded_below};
  EXPECT_TRUE(judge("r", below, {1.0, 0.8, 0.6}).pass);
  EXPECT_FALSE(judge("r", below, {1.0, 0.5, 0.1}).pass);
  EXPECT_FALSE(judge("r", below, {0.0, 0.0}).pass);

  const ExpectedRecord to{"r", Law::converges_to, 2.0, 0.01};
  EXPECT_TRUE(judge("r", to, {3.0, 2.01}).pass);
  EXPECT_FALSE(judge("r", to, {2.0, 2.1}).pass);
}

TEST(Convergence, RefinementStudyValidatesInput) {
  auto build = [](int n) { return make_configuration("abelian-2d", {}, "", n); };
  EXPECT_THROW(refinement_study(build, {16, 16}), DomainError);
  EXPECT_THROW(refinement_study(build, {32, 16}), DomainError);
  const StudyResult r = refinement_study(build, {16, 32});
  EXPECT_EQ(r.table.rows.size(), 2 * r.outcomes.size());
  EXPECT_FALSE(r.table.rows[0].observed_order.has_value());
}

TEST(Random, SeededFieldsAreReproducible) {
  auto chart = Chart::torus(3, 6, 1.0);
  FieldRng a(5), b(5), c(6);
  const Form fa = random_form(chart, algebras::su2(), 1, a);
  const Form fb = random_form(chart, algebras::su2(), 1, b);
  const Form fc = random_form(chart, algebras::su2(), 1, c);
  EXPECT_EQ(fa.data(), fb.data());
  EXPECT_NE(fa.data(), fc.data());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, ClosedTwoFormsAreClosed) {
  auto chart = Chart::torus(4, 6, 1.0);
  FieldRng rng(8);
  const RealTwoForm z = random_closed_two_form(chart, rng);
  EXPECT_LT(exterior_derivative(z.form()).sup_norm(), 1e-12);
  EXPECT_GT(z.form().sup_norm(), 1e-3);
}

TEST(Parallel, ReductionsAreIndependentOfThreadCount) {
  auto chart = Chart::torus(3, 32, 1.0);
  ASSERT_GE(chart->points(), parallel::kMinParallelRange);
  FieldRng rng(12);
  const ConnectionPair pair = random_pair(chart, algebras::su2(), rng);
  const RealTwoForm zeta = random_closed_two_form(chart, rng);
  const MetricField g = MetricField::euclidean(chart);
  std::vector<double> results;
  for (unsigned t : {1u, 2u, 4u}) {
    parallel::set_threads(t);
    results.push_back(energy(pair, zeta, g));
    results.push_back(charge_Q(pair, zeta));
  }
  parallel::set_threads(0);
  for (std::size_t i = 2; i < results.size(); ++i) EXPECT_EQ(results[i], results[i % 2]);
}
