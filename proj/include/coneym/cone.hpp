#pragma once

// Cone forms eta + theta xi, where theta is a formal 1-form with
// d theta = zeta. theta is never stored: a ConeForm of degree k is the pair
// (eta, xi) of degrees (k, k-1), and each operation carries the theta signs.
//
//   product    (a + theta b)(c + theta e) = ac + theta (bc + (-1)^|a| a e)
//   star       eta + theta xi  ->  *xi + theta (-1)^|eta| *eta
//   D_C        (eta, xi)       ->  (d_A eta + zeta xi, [B, eta] - d_A xi)
//   D_C^*      (eta, xi)       ->  (d_A^* eta - [B, xi], zeta^* eta - d_A^* xi)

#include <optional>

#include "coneym/forms.hpp"

namespace coneym {

struct ConnectionPair {
  Form A;
  Form B;

  ConnectionPair(Form a, Form b) : A(std::move(a)), B(std::move(b)) {
    if (A.degree() != 1) throw DegreeError("A must be a 1-form");
    if (B.degree() != 0) throw DegreeError("B must be a 0-form");
    if (!same_chart(A.chart(), B.chart())) throw ChartMismatch("A and B live on different charts");
    if (A.algebra()->name() != B.algebra()->name()) throw AlgebraError("A and B carry different algebras");
  }

  static ConnectionPair zero(ChartPtr chart, AlgebraPtr algebra) {
    return {Form(chart, algebra, 1), Form(chart, algebra, 0)};
  }

  const ChartPtr& chart() const { return A.chart(); }
  const AlgebraPtr& algebra() const { return A.algebra(); }

  void axpy(double s, const Form& dA, const Form& dB) {
    A.axpy(s, dA);
    B.axpy(s, dB);
  }
};

class ConeForm {
 public:
  /// A cone form of degree k on an m-chart; eta exists for k <= m, xi for
  /// k >= 1. Missing components are treated as zero.
  ConeForm(int degree, std::optional<Form> eta, std::optional<Form> xi)
      : degree_(degree), eta_(std::move(eta)), xi_(std::move(xi)) {
    if (eta_ && eta_->degree() != degree_) throw DegreeError("eta has the wrong degree");
    if (xi_ && xi_->degree() != degree_ - 1) throw DegreeError("xi has the wrong degree");
    if (!eta_ && !xi_) throw DomainError("cone form needs at least one component");
    if (eta_ && xi_) {
      if (!same_chart(eta_->chart(), xi_->chart())) throw ChartMismatch("eta and xi live on different charts");
      if (eta_->algebra()->name() != xi_->algebra()->name()) throw AlgebraError("eta and xi carry different algebras");
    }
  }

  static ConeForm zero(ChartPtr chart, AlgebraPtr algebra, int degree) {
    const int m = chart->dim();
    std::optional<Form> eta, xi;
    if (degree <= m) eta.emplace(chart, algebra, degree);
    if (degree >= 1) xi.emplace(chart, algebra, degree - 1);
    return {degree, std::move(eta), std::move(xi)};
  }

  int degree() const { return degree_; }
  bool has_eta() const { return eta_.has_value(); }
  bool has_xi() const { return xi_.has_value(); }
  const Form& eta() const {
    if (!eta_) throw DegreeError("cone form has no eta component");
    return *eta_;
  }
  const Form& xi() const {
    if (!xi_) throw DegreeError("cone form has no xi component");
    return *xi_;
  }
  const std::optional<Form>& eta_opt() const { return eta_; }
  const std::optional<Form>& xi_opt() const { return xi_; }
  const Form& any() const { return eta_ ? *eta_ : *xi_; }
  const ChartPtr& chart() const { return any().chart(); }
  const AlgebraPtr& algebra() const { return any().algebra(); }

  ConeForm& operator+=(const ConeForm& o) {
    if (o.degree_ != degree_) throw DegreeError("cone forms have different degrees");
    add(eta_, o.eta_, 1.0);
    add(xi_, o.xi_, 1.0);
    return *this;
  }
  ConeForm& operator-=(const ConeForm& o) {
    if (o.degree_ != degree_) throw DegreeError("cone forms have different degrees");
    add(eta_, o.eta_, -1.0);
    add(xi_, o.xi_, -1.0);
    return *this;
  }
  ConeForm& operator*=(double s) {
    if (eta_) *eta_ *= s;
    if (xi_) *xi_ *= s;
    return *this;
  }
  friend ConeForm operator+(ConeForm a, const ConeForm& b) { return a += b; }
  friend ConeForm operator-(ConeForm a, const ConeForm& b) { return a -= b; }
  friend ConeForm operator*(double s, ConeForm a) { return a *= s; }

  double sup_norm() const {
    return std::max(eta_ ? eta_->sup_norm() : 0.0, xi_ ? xi_->sup_norm() : 0.0);
  }

 private:
  static void add(std::optional<Form>& a, const std::optional<Form>& b, double s) {
    if (!b) return;
    if (a)
      a->axpy(s, *b);
    else
      a = s * *b;
  }

  int degree_;
  std::optional<Form> eta_;
  std::optional<Form> xi_;
};

namespace detail {
inline std::optional<Form> sum(std::optional<Form> a, const std::optional<Form>& b, double s = 1.0) {
  if (!b) return a;
  if (!a) return s * *b;
  a->axpy(s, *b);
  return a;
}
inline std::optional<Form> scaled(std::optional<Form> a, double s) {
  if (a) *a *= s;
  return a;
}
}  // namespace detail

/// eta + theta xi  ->  *xi + theta (-1)^k *eta.
inline ConeForm cone_star(const ConeForm& c, const MetricField& metric) {
  const int m = c.chart()->dim();
  const int k = c.degree();
  std::optional<Form> eta, xi;
  if (c.has_xi()) eta = hodge_star(c.xi(), metric);
  if (c.has_eta()) xi = (k % 2 == 0 ? 1.0 : -1.0) * hodge_star(c.eta(), metric);
  // Components may be absent on one side and required (as zero) on the other.
  const int out = m + 1 - k;
  if (!eta && out <= m) eta.emplace(c.chart(), c.algebra(), out);
  if (!xi && out >= 1) xi.emplace(c.chart(), c.algebra(), out - 1);
  return {out, std::move(eta), std::move(xi)};
}

/// <eta1, eta2> + <xi1, xi2>.
inline double cone_inner(const ConeForm& a, const ConeForm& b, const MetricField& metric) {
  if (a.degree() != b.degree()) throw DegreeError("cone forms have different degrees");
  double s = 0.0;
  if (a.has_eta() && b.has_eta()) s += inner_product(a.eta(), b.eta(), metric);
  if (a.has_xi() && b.has_xi()) s += inner_product(a.xi(), b.xi(), metric);
  return s;
}

/// Same inner product evaluated as the integral of the theta-coefficient of
/// c1 ^ *_C c2, paired in the algebra.
inline double cone_inner_integral(const ConeForm& a, const ConeForm& b, const MetricField& metric) {
  if (a.degree() != b.degree()) throw DegreeError("cone forms have different degrees");
  const ConeForm sb = cone_star(b, metric);
  // (a_eta + theta a_xi)(s_eta + theta s_xi): theta-part a_xi s_eta + (-1)^k a_eta s_xi
  const int k = a.degree();
  double total = 0.0;
  if (a.has_xi() && sb.has_eta()) total += integrate_top(paired_wedge(a.xi(), sb.eta()));
  if (a.has_eta() && sb.has_xi())
    total += (k % 2 == 0 ? 1.0 : -1.0) * integrate_top(paired_wedge(a.eta(), sb.xi()));
  return total;
}

/// Graded bracket of cone forms by the product rule above.
inline ConeForm cone_bracket(const ConeForm& a, const ConeForm& b) {
  const int m = a.chart()->dim();
  const int k = a.degree() + b.degree();
  if (k > m + 1) throw DegreeError("cone bracket exceeds the top degree");
  std::optional<Form> eta, xi;
  if (a.has_eta() && b.has_eta() && k <= m) eta = bracket_wedge(a.eta(), b.eta());
  if (a.has_xi() && b.has_eta()) xi = detail::sum(xi, bracket_wedge(a.xi(), b.eta()));
  if (a.has_eta() && b.has_xi())
    xi = detail::sum(xi, bracket_wedge(a.eta(), b.xi()), a.degree() % 2 == 0 ? 1.0 : -1.0);
  if (!eta && k <= m) eta.emplace(a.chart(), a.algebra(), k);
  if (!xi && k >= 1) xi.emplace(a.chart(), a.algebra(), k - 1);
  return {k, std::move(eta), std::move(xi)};
}

/// D_C (eta, xi) = (d_A eta + zeta ^ xi, [B, eta] - d_A xi).
inline ConeForm cone_differential(const ConnectionPair& pair, const RealTwoForm& zeta, const ConeForm& c) {
  const int m = c.chart()->dim();
  const int k = c.degree();
  if (k > m) throw DegreeError("cone differential needs degree <= m");
  if (!same_chart(c.chart(), pair.chart()) || !same_chart(c.chart(), zeta.chart()))
    throw ChartMismatch("cone form, pair and zeta live on different charts");
  if (c.algebra()->name() != pair.algebra()->name()) throw AlgebraError("cone form and pair carry different algebras");
  std::optional<Form> eta, xi;
  if (k + 1 <= m) {
    if (c.has_eta()) eta = covariant_derivative(pair.A, c.eta());
    if (c.has_xi()) eta = detail::sum(eta, zeta_wedge(zeta, c.xi()));
    if (!eta) eta.emplace(c.chart(), c.algebra(), k + 1);
  }
  if (c.has_eta()) xi = bracket_wedge(pair.B, c.eta());
  if (c.has_xi()) xi = detail::sum(xi, covariant_derivative(pair.A, c.xi()), -1.0);
  if (!xi) xi.emplace(c.chart(), c.algebra(), k);
  return {k + 1, std::move(eta), std::move(xi)};
}

/// D_C^* (eta, xi) = (d_A^* eta - [B, xi], zeta^* eta - d_A^* xi).
inline ConeForm cone_codifferential(const ConnectionPair& pair, const RealTwoForm& zeta, const ConeForm& c,
                                    const MetricField& metric) {
  const int k = c.degree();
  if (k < 1) throw DegreeError("cone codifferential needs degree >= 1");
  if (!same_chart(c.chart(), pair.chart()) || !same_chart(c.chart(), zeta.chart()))
    throw ChartMismatch("cone form, pair and zeta live on different charts");
  if (c.algebra()->name() != pair.algebra()->name()) throw AlgebraError("cone form and pair carry different algebras");
  std::optional<Form> eta, xi;
  if (c.has_eta()) eta = codifferential(pair.A, c.eta(), metric);
  if (c.has_xi()) eta = detail::sum(eta, bracket_wedge(pair.B, c.xi()), -1.0);
  if (k >= 2) {
    if (c.has_eta()) xi = zeta_adjoint(zeta, c.eta(), metric);
    if (c.has_xi()) xi = detail::sum(xi, codifferential(pair.A, c.xi(), metric), -1.0);
    if (!xi) xi.emplace(c.chart(), c.algebra(), k - 2);
  }
  return {k - 1, std::move(eta), std::move(xi)};
}

/// (F_A + zeta B, -d_A B).
inline ConeForm cone_curvature(const ConnectionPair& pair, const RealTwoForm& zeta) {
  Form eta = curvature(pair.A);
  eta += zeta_wedge(zeta, pair.B);
  return {2, std::move(eta), -covariant_derivative(pair.A, pair.B)};
}

/// Cone curvature with F_A supplied directly instead of derived from A.
inline ConeForm cone_curvature(const ConnectionPair& pair, const RealTwoForm& zeta, const Form& F) {
  Form eta = F;
  eta += zeta_wedge(zeta, pair.B);
  return {2, std::move(eta), -covariant_derivative(pair.A, pair.B)};
}

/// Linearization of the Euler-Lagrange operator in the direction `dir`:
/// D_C^* D_C dir + (-1)^m *_C [dir, *_C F].
inline ConeForm linearized_el(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric,
                              const ConeForm& dir) {
  if (dir.degree() != 1) throw DegreeError("direction must be a degree-1 cone form");
  const int m = pair.chart()->dim();
  ConeForm out = cone_codifferential(pair, zeta, cone_differential(pair, zeta, dir), metric);
  if (!pair.algebra()->abelian()) {
    const ConeForm curv = cone_star(cone_curvature(pair, zeta), metric);
    ConeForm term = cone_star(cone_bracket(dir, curv), metric);
    if (m % 2 != 0) term *= -1.0;
    out += term;
  }
  return out;
}

/// Gauge-fixing residual D_C^* c for a degree-1 cone form.
inline double gauge_residual(const ConnectionPair& pair, const RealTwoForm& zeta, const ConeForm& c,
                             const MetricField& metric) {
  const ConeForm r = cone_codifferential(pair, zeta, c, metric);
  return std::sqrt(cone_inner(r, r, metric));
}

}  // namespace coneym
