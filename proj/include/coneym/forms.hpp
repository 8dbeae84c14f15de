#pragma once

// Algebra-valued differential forms on a chart, and the operators acting on
// them: d, wedge, curvature, covariant derivative, Hodge star, codifferential,
// wedging with a real 2-form and its metric adjoint.
//
// Every form carries a margin. Points with depth < margin hold no data (they
// are zero-filled); each differencing step raises the margin by one.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "coneym/algebra.hpp"
#include "coneym/errors.hpp"
#include "coneym/geometry.hpp"
#include "coneym/multi_index.hpp"
#include "coneym/parallel.hpp"

namespace coneym {

class Form {
 public:
  Form(ChartPtr chart, AlgebraPtr algebra, int degree, int margin = 0)
      : chart_(std::move(chart)), algebra_(std::move(algebra)), degree_(degree), margin_(margin) {
    if (degree_ < 0 || degree_ > chart_->dim()) throw DegreeError("form degree out of range");
    ncomp_ = binomial(chart_->dim(), degree_);
    nalg_ = algebra_->size();
    data_.assign(chart_->points() * ncomp_ * nalg_, 0.0);
  }

  /// Samples fn(x, out) at every point; out holds components() * algebra size
  /// values, component-major.
  template <class Fn>
  static Form sample(ChartPtr chart, AlgebraPtr algebra, int degree, Fn&& fn) {
    Form f(std::move(chart), std::move(algebra), degree);
    parallel::for_each(f.chart_->points(), [&](std::size_t p) { fn(f.chart_->position(p), f.at(p, 0)); });
    return f;
  }

  static Form constant(ChartPtr chart, AlgebraPtr algebra, int degree, const std::vector<double>& values) {
    Form f(std::move(chart), std::move(algebra), degree);
    if (values.size() != f.stride()) throw DomainError("constant form needs one value per coefficient");
    for (std::size_t p = 0; p < f.chart_->points(); ++p) std::copy(values.begin(), values.end(), f.at(p, 0));
    return f;
  }

  const ChartPtr& chart() const { return chart_; }
  const AlgebraPtr& algebra() const { return algebra_; }
  int degree() const { return degree_; }
  int margin() const { return margin_; }
  int dim() const { return chart_->dim(); }
  int components() const { return ncomp_; }
  int algebra_size() const { return nalg_; }
  std::size_t stride() const { return static_cast<std::size_t>(ncomp_) * nalg_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double* at(std::size_t p, int comp) { return data_.data() + (p * ncomp_ + comp) * nalg_; }
  const double* at(std::size_t p, int comp) const { return data_.data() + (p * ncomp_ + comp) * nalg_; }

  bool valid(std::size_t p) const { return chart_->depth(p) >= margin_; }

  /// Widens the margin, zeroing points that fall out of it.
  void set_margin(int margin) {
    margin_ = std::max(margin_, margin);
    for (std::size_t p = 0; p < chart_->points(); ++p)
      if (!valid(p)) std::fill(at(p, 0), at(p, 0) + stride(), 0.0);
  }

  Form zeros_like() const { return Form(chart_, algebra_, degree_, margin_); }

  Form& operator+=(const Form& o) {
    check_compatible(o);
    margin_ = std::max(margin_, o.margin_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    if (o.margin_ > 0 || margin_ > 0) set_margin(margin_);
    return *this;
  }
  Form& operator-=(const Form& o) {
    check_compatible(o);
    margin_ = std::max(margin_, o.margin_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    if (o.margin_ > 0 || margin_ > 0) set_margin(margin_);
    return *this;
  }
  Form& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(Form a) { return a *= -1.0; }
  friend Form operator*(double s, Form a) { return a *= s; }
  friend Form operator*(Form a, double s) { return a *= s; }

  /// this += s * o
  void axpy(double s, const Form& o) {
    check_compatible(o);
    margin_ = std::max(margin_, o.margin_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
    if (margin_ > 0) set_margin(margin_);
  }

  /// Largest absolute coefficient over the quadrature region.
  double sup_norm() const {
    return parallel::max(chart_->points(), [&](std::size_t p) {
      if (!chart_->in_region(p, margin_)) return 0.0;
      double m = 0.0;
      for (std::size_t i = 0; i < stride(); ++i) m = std::max(m, std::abs(at(p, 0)[i]));
      return m;
    });
  }

  void check_compatible(const Form& o) const {
    if (!same_chart(chart_, o.chart_)) throw ChartMismatch("forms live on different charts");
    if (degree_ != o.degree_) throw DegreeError("forms have different degrees");
    if (algebra_->name() != o.algebra_->name()) throw AlgebraError("forms have different algebras");
  }

 private:
  ChartPtr chart_;
  AlgebraPtr algebra_;
  int degree_;
  int margin_;
  int ncomp_ = 0;
  int nalg_ = 0;
  std::vector<double> data_;
};

using GValuedForm = Form;

namespace detail {
inline void require_chart(const Form& a, const ChartPtr& c) {
  if (!same_chart(a.chart(), c)) throw ChartMismatch("form and metric live on different charts");
}
inline void require_same_chart(const Form& a, const Form& b) {
  if (!same_chart(a.chart(), b.chart())) throw ChartMismatch("forms live on different charts");
}
}  // namespace detail

/// Second-order central differences, antisymmetrized.
inline Form exterior_derivative(const Form& alpha) {
  const int k = alpha.degree();
  const int m = alpha.dim();
  if (k >= m) throw DegreeError("exterior derivative of a top-degree form");
  const Chart& chart = *alpha.chart();
  const auto& table = multi_indices(m);
  Form out(alpha.chart(), alpha.algebra(), k + 1, alpha.margin() + 1);
  const int na = alpha.algebra_size();
  std::array<double, kMaxDim> inv2h{};
  for (int a = 0; a < m; ++a) inv2h[a] = 0.5 / chart.axis(a).spacing;
  parallel::for_each(chart.points(), [&](std::size_t p) {
    if (!out.valid(p)) return;
    for (int c = 0; c < out.components(); ++c) {
      double* o = out.at(p, c);
      for (const auto& term : table.derivative(k, c)) {
        const double* fwd = alpha.at(chart.neighbor(p, term.axis, +1), term.in);
        const double* bwd = alpha.at(chart.neighbor(p, term.axis, -1), term.in);
        const double s = term.sign * inv2h[term.axis];
        for (int x = 0; x < na; ++x) o[x] += s * (fwd[x] - bwd[x]);
      }
    }
  });
  return out;
}

/// Pointwise wedge product. A real-valued factor multiplies the other
/// factor's coefficients; two algebra-valued factors multiply as matrices and
/// the result lives in the envelope algebra.
inline Form wedge(const Form& alpha, const Form& beta) {
  detail::require_same_chart(alpha, beta);
  const int j = alpha.degree();
  const int k = beta.degree();
  const int m = alpha.dim();
  if (j + k > m) throw DegreeError("wedge degree exceeds the chart dimension");
  const auto& terms = multi_indices(m).wedge(j, k);
  const int margin = std::max(alpha.margin(), beta.margin());
  const Chart& chart = *alpha.chart();
  const bool alpha_real = alpha.algebra()->kind() == Algebra::Kind::reals;
  const bool beta_real = beta.algebra()->kind() == Algebra::Kind::reals;

  if (alpha_real || beta_real) {
    const Form& other = alpha_real ? beta : alpha;
    Form out(alpha.chart(), other.algebra(), j + k, margin);
    const int na = other.algebra_size();
    parallel::for_each(chart.points(), [&](std::size_t p) {
      if (!out.valid(p)) return;
      for (const auto& t : terms) {
        const double* l = alpha.at(p, t.left);
        const double* r = beta.at(p, t.right);
        double* o = out.at(p, t.out);
        if (alpha_real) {
          const double s = t.sign * l[0];
          if (s != 0.0)
            for (int x = 0; x < na; ++x) o[x] += s * r[x];
        } else {
          const double s = t.sign * r[0];
          if (s != 0.0)
            for (int x = 0; x < na; ++x) o[x] += s * l[x];
        }
      }
    });
    return out;
  }

  if (alpha.algebra()->name() != beta.algebra()->name())
    throw AlgebraError("wedge of forms with different algebras");
  const Algebra& g = *alpha.algebra();
  if (!g.envelope()) throw AlgebraError("algebra has no matrix envelope");
  Form out(alpha.chart(), g.envelope(), j + k, margin);
  const int na = g.size();
  parallel::for_each(chart.points(), [&](std::size_t p) {
    if (!out.valid(p)) return;
    for (const auto& t : terms) {
      const double* l = alpha.at(p, t.left);
      const double* r = beta.at(p, t.right);
      double* o = out.at(p, t.out);
      for (int a = 0; a < na; ++a) {
        if (l[a] == 0.0) continue;
        for (int b = 0; b < na; ++b) {
          const double s = t.sign * l[a] * r[b];
          if (s == 0.0) continue;
          for (const auto& pt : g.product_terms(a, b)) o[pt.out] += s * pt.value;
        }
      }
    }
  });
  return out;
}

/// Re-expresses an envelope-valued form in the basis of `target`. The caller
/// is responsible for the values lying in the target algebra.
inline Form to_algebra(const Form& env, const AlgebraPtr& target) {
  if (!target->envelope() || target->envelope()->name() != env.algebra()->name())
    throw AlgebraError("form is not valued in the envelope of the target algebra");
  const Eigen::MatrixXd& proj = target->from_envelope();
  Form out(env.chart(), target, env.degree(), env.margin());
  const int ne = env.algebra_size();
  const int na = target->size();
  parallel::for_each(env.chart()->points(), [&](std::size_t p) {
    for (int c = 0; c < env.components(); ++c) {
      const double* in = env.at(p, c);
      double* o = out.at(p, c);
      for (int a = 0; a < na; ++a) {
        double s = 0.0;
        for (int e = 0; e < ne; ++e) s += proj(a, e) * in[e];
        o[a] = s;
      }
    }
  });
  return out;
}

/// Graded bracket [alpha ^ beta] = alpha^beta - (-1)^{jk} beta^alpha.
inline Form bracket_wedge(const Form& alpha, const Form& beta) {
  detail::require_same_chart(alpha, beta);
  if (alpha.algebra()->name() != beta.algebra()->name())
    throw AlgebraError("bracket of forms with different algebras");
  const int j = alpha.degree();
  const int k = beta.degree();
  if (j + k > alpha.dim()) throw DegreeError("bracket degree exceeds the chart dimension");
  const Algebra& g = *alpha.algebra();
  Form out(alpha.chart(), alpha.algebra(), j + k, std::max(alpha.margin(), beta.margin()));
  if (g.abelian()) return out;
  const auto& terms = multi_indices(alpha.dim()).wedge(j, k);
  const int na = g.size();
  parallel::for_each(alpha.chart()->points(), [&](std::size_t p) {
    if (!out.valid(p)) return;
    for (const auto& t : terms) {
      const double* l = alpha.at(p, t.left);
      const double* r = beta.at(p, t.right);
      double* o = out.at(p, t.out);
      for (int a = 0; a < na; ++a) {
        if (l[a] == 0.0) continue;
        for (int b = 0; b < na; ++b) {
          const double s = t.sign * l[a] * r[b];
          if (s == 0.0) continue;
          for (const auto& bt : g.bracket_terms(a, b)) o[bt.out] += s * bt.value;
        }
      }
    }
  });
  return out;
}

/// F_A = dA + A ^ A.
inline Form curvature(const Form& A) {
  if (A.degree() != 1) throw DegreeError("curvature needs a 1-form");
  Form F = exterior_derivative(A);
  if (A.algebra()->abelian()) return F;
  F += to_algebra(wedge(A, A), A.algebra());
  return F;
}

/// d_A s = ds + [A ^ s].
inline Form covariant_derivative(const Form& A, const Form& s) {
  if (A.degree() != 1) throw DegreeError("connection must be a 1-form");
  Form out = exterior_derivative(s);
  if (!A.algebra()->abelian()) out += bracket_wedge(A, s);
  return out;
}

/// Pointwise Hodge star; (*alpha)_{I^c} = sqrt(det g) s(I) alpha^I.
inline Form hodge_star(const Form& alpha, const MetricField& metric) {
  detail::require_chart(alpha, metric.chart());
  const int m = alpha.dim();
  const int k = alpha.degree();
  const auto& table = multi_indices(m);
  Form out(alpha.chart(), alpha.algebra(), m - k, alpha.margin());
  const int na = alpha.algebra_size();
  const int nc = alpha.components();
  parallel::for_each(alpha.chart()->points(), [&](std::size_t p) {
    if (!alpha.valid(p)) return;
    const double vol = metric.sqrt_det(p);
    for (int I = 0; I < nc; ++I) {
      double* o = out.at(p, table.complement(k, I));
      const double s = vol * table.star_sign(k, I);
      for (int J = 0; J < nc; ++J) {
        const double r = metric.raise_factor(p, table.mask(k, I), table.mask(k, J));
        if (r == 0.0) continue;
        const double* in = alpha.at(p, J);
        for (int x = 0; x < na; ++x) o[x] += s * r * in[x];
      }
    }
  });
  return out;
}

/// Pointwise density sqrt(det g) sum_{I,J} raise(I,J) <alpha_I, beta_J>.
inline double inner_density(const Form& alpha, const Form& beta, const MetricField& metric, std::size_t p) {
  const int k = alpha.degree();
  const auto& table = multi_indices(alpha.dim());
  const Algebra& g = *alpha.algebra();
  const int nc = alpha.components();
  double s = 0.0;
  for (int I = 0; I < nc; ++I) {
    if (metric.diagonal()) {
      const double r = metric.raise_factor(p, table.mask(k, I), table.mask(k, I));
      s += r * g.pairing(alpha.at(p, I), beta.at(p, I));
      continue;
    }
    for (int J = 0; J < nc; ++J) {
      const double r = metric.raise_factor(p, table.mask(k, I), table.mask(k, J));
      if (r != 0.0) s += r * g.pairing(alpha.at(p, I), beta.at(p, J));
    }
  }
  return s * metric.sqrt_det(p);
}

/// L2 inner product by the midpoint rule over the quadrature region.
inline double inner_product(const Form& alpha, const Form& beta, const MetricField& metric) {
  alpha.check_compatible(beta);
  detail::require_chart(alpha, metric.chart());
  if (alpha.algebra()->kind() == Algebra::Kind::envelope)
    throw AlgebraError("inner product needs an algebra with a positive pairing");
  const Chart& chart = *alpha.chart();
  const int margin = std::max(alpha.margin(), beta.margin());
  const double w = chart.cell_volume();
  return parallel::sum(chart.points(), [&](std::size_t p) {
    return chart.in_region(p, margin) ? inner_density(alpha, beta, metric, p) : 0.0;
  }) * w;
}

inline double norm(const Form& alpha, const MetricField& metric) {
  return std::sqrt(std::max(0.0, inner_product(alpha, alpha, metric)));
}

/// d_A^* = (-1)^{mk+m+1} * d_A * on k-forms.
inline Form codifferential(const Form& A, const Form& alpha, const MetricField& metric) {
  const int k = alpha.degree();
  const int m = alpha.dim();
  if (k == 0) throw DegreeError("codifferential of a 0-form");
  Form out = hodge_star(covariant_derivative(A, hodge_star(alpha, metric)), metric);
  if ((m * k + m + 1) % 2 != 0) out *= -1.0;
  return out;
}

/// A real-valued 2-form together with its measured closedness defect.
class RealTwoForm {
 public:
  explicit RealTwoForm(Form form) : form_(std::move(form)) {
    if (form_.degree() != 2) throw DegreeError("zeta must be a 2-form");
    if (form_.algebra()->kind() != Algebra::Kind::reals) throw AlgebraError("zeta must be real-valued");
    closedness_ = form_.dim() > 2 ? exterior_derivative(form_).sup_norm() : 0.0;
  }

  template <class Fn>
  static RealTwoForm sample(ChartPtr chart, Fn&& fn) {
    return RealTwoForm(Form::sample(std::move(chart), algebras::reals(), 2, std::forward<Fn>(fn)));
  }
  static RealTwoForm zero(ChartPtr chart) { return RealTwoForm(Form(std::move(chart), algebras::reals(), 2)); }

  const Form& form() const { return form_; }
  const ChartPtr& chart() const { return form_.chart(); }
  /// sup |d zeta| over the quadrature region, as measured at construction.
  double closedness_defect() const { return closedness_; }

 private:
  Form form_;
  double closedness_ = 0.0;
};

inline Form zeta_wedge(const RealTwoForm& zeta, const Form& alpha) {
  if (alpha.degree() + 2 > alpha.dim()) throw DegreeError("zeta wedge exceeds the chart dimension");
  return wedge(zeta.form(), alpha);
}

/// zeta^* = (-1)^{(m-k)k} * (zeta ^ *alpha) on k-forms.
inline Form zeta_adjoint(const RealTwoForm& zeta, const Form& alpha, const MetricField& metric) {
  const int k = alpha.degree();
  const int m = alpha.dim();
  if (k < 2) throw DegreeError("zeta adjoint needs degree >= 2");
  Form out = hodge_star(wedge(zeta.form(), hodge_star(alpha, metric)), metric);
  if (((m - k) * k) % 2 != 0) out *= -1.0;
  return out;
}

/// Real form sum_{I,J} sign <alpha_I, beta_J> dx^I ^ dx^J, the pairing
/// applied to the wedge product.
inline Form paired_wedge(const Form& alpha, const Form& beta) {
  detail::require_same_chart(alpha, beta);
  if (alpha.algebra()->name() != beta.algebra()->name())
    throw AlgebraError("paired wedge of forms with different algebras");
  const int j = alpha.degree();
  const int k = beta.degree();
  if (j + k > alpha.dim()) throw DegreeError("paired wedge exceeds the chart dimension");
  const auto& terms = multi_indices(alpha.dim()).wedge(j, k);
  const Algebra& g = *alpha.algebra();
  Form out(alpha.chart(), algebras::reals(), j + k, std::max(alpha.margin(), beta.margin()));
  parallel::for_each(alpha.chart()->points(), [&](std::size_t p) {
    if (!out.valid(p)) return;
    for (const auto& t : terms) out.at(p, t.out)[0] += t.sign * g.pairing(alpha.at(p, t.left), beta.at(p, t.right));
  });
  return out;
}

/// Integral of a real top-degree form over the quadrature region.
inline double integrate_top(const Form& omega) {
  if (omega.degree() != omega.dim()) throw DegreeError("only top-degree forms integrate");
  if (omega.algebra()->kind() != Algebra::Kind::reals) throw AlgebraError("only real forms integrate");
  const Chart& chart = *omega.chart();
  return parallel::sum(chart.points(), [&](std::size_t p) {
    return chart.in_region(p, omega.margin()) ? omega.at(p, 0)[0] : 0.0;
  }) * chart.cell_volume();
}

/// Value of a 0-form at one point as an algebra element.
inline AlgebraElement element_at(const Form& s, std::size_t p, int comp = 0) {
  return {s.algebra(), Eigen::Map<const Eigen::VectorXd>(s.at(p, comp), s.algebra_size())};
}

}  // namespace coneym
