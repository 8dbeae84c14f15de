#pragma once

// Matrix Lie algebras used as coefficient rings: u(1), su(2), so(N), the
// trivial real line, and the matrix envelope gl(n) that holds products.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "coneym/errors.hpp"

namespace coneym {

using Matrix = Eigen::MatrixXcd;

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

/// A real vector space spanned by n x n complex matrices, with structure
/// constants for the bracket and for the plain matrix product into the
/// envelope algebra.
class Algebra {
 public:
  enum class Kind { lie, reals, envelope };

  struct Term {
    int out;
    double value;
  };

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  bool is_lie() const { return kind_ == Kind::lie; }
  int matrix_dim() const { return n_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  double c_G() const { return c_G_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  bool abelian() const { return abelian_; }

  /// Coefficients of [X_a, X_b] in this basis.
  const std::vector<Term>& bracket_terms(int a, int b) const { return bracket_[a * size() + b]; }

  /// Coefficients of X_a X_b in the envelope basis.
  const std::vector<Term>& product_terms(int a, int b) const { return product_[a * size() + b]; }
  const AlgebraPtr& envelope() const { return envelope_; }

  /// Linear map from envelope coefficients back to this basis.
  const Eigen::MatrixXd& from_envelope() const { return from_envelope_; }

  Matrix to_matrix(const Eigen::VectorXd& c) const {
    Matrix m = Matrix::Zero(n_, n_);
    for (int a = 0; a < size(); ++a)
      if (c[a] != 0.0) m += c[a] * basis_[a];
    return m;
  }

  /// Least-squares coefficients of a matrix; `residual` receives the
  /// Frobenius norm of the part outside the span.
  Eigen::VectorXd project(const Matrix& m, double* residual = nullptr) const {
    const Eigen::VectorXd v = flatten(m);
    const Eigen::VectorXd c = pinv_ * v;
    if (residual) *residual = (span_ * c - v).norm();
    return c;
  }

  double pairing(const double* x, const double* y) const {
    double s = 0.0;
    for (int a = 0; a < size(); ++a)
      for (int b = 0; b < size(); ++b) s += gram_(a, b) * x[a] * y[b];
    return s;
  }

  /// Builds every derived table. Called once by the factories below.
  static AlgebraPtr make(std::string name, Kind kind, int n, std::vector<Matrix> basis, double c_G,
                         AlgebraPtr envelope) {
    auto alg = std::shared_ptr<Algebra>(new Algebra());
    alg->name_ = std::move(name);
    alg->kind_ = kind;
    alg->n_ = n;
    alg->basis_ = std::move(basis);
    alg->c_G_ = c_G;
    alg->envelope_ = envelope;
    alg->build();
    return alg;
  }

 private:
  Algebra() = default;

  Eigen::VectorXd flatten(const Matrix& m) const {
    Eigen::VectorXd v(2 * n_ * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        v[2 * (i * n_ + j)] = m(i, j).real();
        v[2 * (i * n_ + j) + 1] = m(i, j).imag();
      }
    return v;
  }

  void build() {
    const int d = size();
    span_.resize(2 * n_ * n_, d);
    for (int a = 0; a < d; ++a) span_.col(a) = flatten(basis_[a]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-12) throw AlgebraError(name_ + ": basis is linearly dependent");
    pinv_ = svd.solve(Eigen::MatrixXd::Identity(2 * n_ * n_, 2 * n_ * n_));

    gram_.resize(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        gram_(a, b) = (kind_ == Kind::reals) ? 1.0 : -c_G_ * (basis_[a] * basis_[b]).trace().real();
    if (kind_ != Kind::envelope) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
      if (es.eigenvalues().minCoeff() <= 0.0) throw AlgebraError(name_ + ": pairing is not positive definite");
    }

    bracket_.assign(static_cast<std::size_t>(d) * d, {});
    abelian_ = true;
    if (kind_ == Kind::lie) {
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double residual = 0.0;
          const Eigen::VectorXd c =
              project(basis_[a] * basis_[b] - basis_[b] * basis_[a], &residual);
          if (residual > 1e-10) throw AlgebraError(name_ + ": bracket leaves the span of the basis");
          for (int e = 0; e < d; ++e)
            if (std::abs(c[e]) > 1e-14) {
              bracket_[a * d + b].push_back({e, c[e]});
              abelian_ = false;
            }
        }
    }

    product_.assign(static_cast<std::size_t>(d) * d, {});
    if (envelope_) {
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double residual = 0.0;
          const Eigen::VectorXd c = envelope_->project(basis_[a] * basis_[b], &residual);
          if (residual > 1e-10) throw AlgebraError(name_ + ": product leaves the envelope");
          for (int e = 0; e < c.size(); ++e)
            if (std::abs(c[e]) > 1e-14) product_[a * d + b].push_back({e, c[e]});
        }
      from_envelope_.resize(d, envelope_->size());
      for (int e = 0; e < envelope_->size(); ++e) from_envelope_.col(e) = project(envelope_->basis()[e]);
    }
  }

  std::string name_;
  Kind kind_ = Kind::lie;
  int n_ = 1;
  std::vector<Matrix> basis_;
  double c_G_ = 1.0;
  bool abelian_ = true;
  Eigen::MatrixXd span_;
  Eigen::MatrixXd pinv_;
  Eigen::MatrixXd gram_;
  std::vector<std::vector<Term>> bracket_;
  std::vector<std::vector<Term>> product_;
  AlgebraPtr envelope_;
  Eigen::MatrixXd from_envelope_;
};

namespace algebras {

namespace detail {
inline std::recursive_mutex& cache_mutex() {
  static std::recursive_mutex m;
  return m;
}
inline std::map<std::string, AlgebraPtr>& cache() {
  static std::map<std::string, AlgebraPtr> c;
  return c;
}

template <class Build>
AlgebraPtr cached(const std::string& key, Build&& build) {
  std::lock_guard lock(cache_mutex());
  auto& c = cache();
  if (auto it = c.find(key); it != c.end()) return it->second;
  AlgebraPtr alg = build();
  c.emplace(key, alg);
  return alg;
}
}  // namespace detail

/// Full matrix algebra gl(n) over the reals (E_ij) or, when `complex`, with
/// the extra real directions i E_ij.
inline AlgebraPtr envelope(int n, bool complex) {
  return detail::cached("gl" + std::to_string(n) + (complex ? "c" : "r"), [&] {
    std::vector<Matrix> basis;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Matrix e = Matrix::Zero(n, n);
        e(i, j) = 1.0;
        basis.push_back(e);
        if (complex) basis.push_back(std::complex<double>(0, 1) * e);
      }
    return Algebra::make(complex ? "gl" + std::to_string(n) + "C" : "gl" + std::to_string(n) + "R",
                         Algebra::Kind::envelope, n, basis, 1.0, nullptr);
  });
}

inline AlgebraPtr reals() {
  return detail::cached("reals", [] {
    return Algebra::make("reals", Algebra::Kind::reals, 1, {Matrix::Identity(1, 1)}, 1.0,
                         envelope(1, false));
  });
}

inline AlgebraPtr u1() {
  return detail::cached("u1", [] {
    Matrix i(1, 1);
    i(0, 0) = std::complex<double>(0, 1);
    return Algebra::make("u1", Algebra::Kind::lie, 1, {i}, 1.0, envelope(1, true));
  });
}

/// su(2) with e_j = -i sigma_j, so [e_1, e_2] = 2 e_3 cyclically.
inline AlgebraPtr su2() {
  return detail::cached("su2", [] {
    using C = std::complex<double>;
    const C i(0, 1);
    Matrix s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, -i, i, 0;
    s3 << 1, 0, 0, -1;
    return Algebra::make("su2", Algebra::Kind::lie, 2, {-i * s1, -i * s2, -i * s3}, 1.0,
                         envelope(2, true));
  });
}

/// Index of the elementary rotation E_ab - E_ba (a < b) in the so(N) basis.
inline int so_index(int N, int a, int b) {
  if (a > b) std::swap(a, b);
  int idx = 0;
  for (int r = 0; r < a; ++r) idx += N - 1 - r;
  return idx + (b - a - 1);
}

/// so(N), N >= 3, with basis E_ab - E_ba for a < b and c_G = N - 2.
inline AlgebraPtr so(int N) {
  if (N < 3) throw AlgebraError("so(N) needs N >= 3");
  return detail::cached("so" + std::to_string(N), [N] {
    std::vector<Matrix> basis;
    for (int a = 0; a < N; ++a)
      for (int b = a + 1; b < N; ++b) {
        Matrix x = Matrix::Zero(N, N);
        x(a, b) = 1.0;
        x(b, a) = -1.0;
        basis.push_back(x);
      }
    return Algebra::make("so" + std::to_string(N), Algebra::Kind::lie, N, basis, N - 2.0,
                         envelope(N, false));
  });
}

/// so(4) coefficients of J_i = X_jk + t X_i4, (i, j, k) cyclic. The three J_i
/// close under the bracket and span one of the two su(2) factors of so(4);
/// t = +1 and t = -1 give the two factors.
inline std::vector<Eigen::VectorXd> so4_su2_factor(int t) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
    v[so_index(4, j, k)] = (j < k) ? 1.0 : -1.0;
    v[so_index(4, i, 3)] = t;
    out.push_back(v);
  }
  return out;
}

/// Lookup by name: "u1", "su2", "soN", "reals".
inline AlgebraPtr by_name(const std::string& name) {
  if (name == "u1") return u1();
  if (name == "su2") return su2();
  if (name == "reals") return reals();
  if (name.size() > 2 && name.rfind("so", 0) == 0) {
    try {
      return so(std::stoi(name.substr(2)));
    } catch (const std::invalid_argument&) {
    }
  }
  if (name.rfind("gl", 0) == 0 && name.size() > 3) {
    const char field = name.back();
    return envelope(std::stoi(name.substr(2, name.size() - 3)), field == 'C');
  }
  throw AlgebraError("unknown algebra '" + name + "'");
}

}  // namespace algebras

/// A single algebra element in basis coordinates.
struct AlgebraElement {
  AlgebraPtr algebra;
  Eigen::VectorXd coeffs;

  AlgebraElement(AlgebraPtr alg, Eigen::VectorXd c) : algebra(std::move(alg)), coeffs(std::move(c)) {
    if (coeffs.size() != algebra->size()) throw AlgebraError("coefficient count does not match the basis");
  }
  static AlgebraElement zero(AlgebraPtr alg) {
    const int d = alg->size();
    return {std::move(alg), Eigen::VectorXd::Zero(d)};
  }

  Matrix matrix() const { return algebra->to_matrix(coeffs); }
};

namespace detail {
inline void require_same(const AlgebraElement& x, const AlgebraElement& y) {
  if (x.algebra != y.algebra && x.algebra->name() != y.algebra->name())
    throw AlgebraError("elements belong to different algebras");
}
}  // namespace detail

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  detail::require_same(x, y);
  const Algebra& g = *x.algebra;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (int a = 0; a < g.size(); ++a)
    for (int b = 0; b < g.size(); ++b)
      for (const auto& t : g.bracket_terms(a, b)) out[t.out] += t.value * x.coeffs[a] * y.coeffs[b];
  return {x.algebra, out};
}

inline double pairing(const AlgebraElement& x, const AlgebraElement& y) {
  detail::require_same(x, y);
  return x.algebra->pairing(x.coeffs.data(), y.coeffs.data());
}

/// Matrix exponential by scaling and squaring of a Taylor series.
inline Matrix expm(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix y = x / std::ldexp(1.0, squarings);
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 20; ++k) {
    term = term * y / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

inline Matrix exponential(const AlgebraElement& x) { return expm(x.matrix()); }

}  // namespace coneym
