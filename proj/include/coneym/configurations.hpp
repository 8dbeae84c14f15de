#pragma once

// Closed-form field configurations with the refinement behaviour each one is
// expected to show.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "coneym/dual.hpp"
#include "coneym/functional.hpp"

namespace coneym {

enum class Law { to_zero, bounded_below, converges_to };

inline std::string to_string(Law law) {
  switch (law) {
    case Law::to_zero:
      return "to_zero";
    case Law::bounded_below:
      return "bounded_below";
    case Law::converges_to:
      return "converges_to";
  }
  return "unknown";
}

/// One machine-checkable expectation: a named measurement and the law it
/// must obey under grid refinement.
struct ExpectedRecord {
  std::string verifier;
  Law law = Law::to_zero;
  double target = 0.0;     // converges_to only
  double tolerance = 0.0;  // relative tolerance for converges_to
};

struct NamedConfiguration {
  std::string name;
  int resolution = 0;
  ChartPtr chart;
  std::shared_ptr<const MetricField> metric;
  RealTwoForm zeta;
  ConnectionPair pair;
  std::optional<Form> curvature;  // prescribed F_A, if A is not meant to be differentiated
  std::vector<ExpectedRecord> expected;
  std::map<std::string, double> params;
  /// Evaluates every measurement named in `expected`.
  std::function<std::map<std::string, double>(const NamedConfiguration&)> measure;
};

namespace closed_form {

inline constexpr double pi = std::numbers::pi;

// Taub-NUT: e^{2 phi} = 1 + 2/r on R^3 minus the origin.

template <class T>
T tn_phi(const std::array<T, 3>& x) {
  const T r = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  return 0.5 * log(1.0 + 2.0 / r);
}

inline double tn_exp2phi(const std::array<double, 3>& x) {
  return 1.0 + 2.0 / std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

inline std::array<double, 3> tn_dphi(const std::array<double, 3>& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double den = r * r * (r + 2.0);
  return {-x[0] / den, -x[1] / den, -x[2] / den};
}

inline std::array<std::array<double, 3>, 3> tn_ddphi(const std::array<double, 3>& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double a = 1.0 / (r * r * (r + 2.0));
  const double b = (3.0 * r + 4.0) / (r * r * r * r * (r + 2.0) * (r + 2.0));
  std::array<std::array<double, 3>, 3> h{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = (i == j ? -a : 0.0) + x[i] * x[j] * b;
  return h;
}

inline double levi_civita(int i, int j, int k) {
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

/// Component i<j of zeta = s eps_ijk d_k phi e^{2 phi} dx^i ^ dx^j.
inline std::array<double, 3> tn_zeta(const std::array<double, 3>& x, int s) {
  const auto d = tn_dphi(x);
  const double e2 = tn_exp2phi(x);
  // components ordered 01, 02, 12
  return {2.0 * s * d[2] * e2, -2.0 * s * d[1] * e2, 2.0 * s * d[0] * e2};
}

/// so(4) fields (A, B). A has 3 x 6 coefficients (dx^l major), B 6.
inline void tn_fields(const std::array<double, 3>& x, int s, double* A, double* B) {
  const auto d = tn_dphi(x);
  const double em2 = 1.0 / tn_exp2phi(x);
  auto idx = [](int a, int b) { return algebras::so_index(4, a, b); };
  for (int l = 0; l < 18; ++l) A[l] = 0.0;
  for (int c = 0; c < 6; ++c) B[c] = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const int k = 3 - i - j;
      // A^i_j = -d_i phi dx^j + d_j phi dx^i
      A[j * 6 + idx(i, j)] += -d[i];
      A[i * 6 + idx(i, j)] += d[j];
      B[idx(i, j)] = -s * levi_civita(i, j, k) * em2 * d[k];
    }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) A[k * 6 + idx(i, 3)] += s * levi_civita(i, j, k) * d[j];
    B[idx(i, 3)] = em2 * d[i];
  }
}

// T^4 counterexample.

template <class T>
T t4_f(T x2, T x3) {
  const T q = sin(2.0 * x2) * cos(x3);
  return (3.0 + 2.0 * q) / (1.0 - 0.5 * q);
}

/// F_12 and F_13 of the prescribed curvature.
inline std::array<double, 2> t4_curvature(double x2, double x3) {
  return {-std::cos(2.0 * x2) * std::sin(x3) / (2.0 * pi),
          (1.0 - 0.5 * std::sin(2.0 * x2) * std::cos(x3)) / (2.0 * pi)};
}

inline double t4_candidate_B(double x2, double x3) { return std::cos(2.0 * x2) * std::sin(x3) / (4.0 * pi); }

// Smooth periodic functions on the unit torus for the 2D abelian family:
// f = amp * u(2 pi x) * v(2 pi y) with u, v in {1, sin, cos}.

struct TorusFunction {
  enum class Factor { one, sin, cos };
  double amp = 0.0;
  Factor fx = Factor::one;
  Factor fy = Factor::one;

  static TorusFunction parse(const std::string& name, double amp) {
    TorusFunction f;
    f.amp = amp;
    if (name == "zero") {
      f.amp = 0.0;
      return f;
    }
    auto factor = [&](const std::string& part, char axis) {
      if (part == std::string("sin_") + axis) return Factor::sin;
      if (part == std::string("cos_") + axis) return Factor::cos;
      throw DomainError("unknown function '" + name + "'");
    };
    const auto us = name.find('_', 4);
    if (us == std::string::npos) {
      if (name.size() == 5 && name[4] == 'x') f.fx = factor(name, 'x');
      else if (name.size() == 5 && name[4] == 'y') f.fy = factor(name, 'y');
      else throw DomainError("unknown function '" + name + "'");
    } else {
      f.fx = factor(name.substr(0, us), 'x');
      f.fy = factor(name.substr(us + 1), 'y');
    }
    return f;
  }

  template <class T>
  T operator()(T x, T y) const {
    auto apply = [](Factor f, T t) -> T {
      switch (f) {
        case Factor::sin:
          return sin(2.0 * pi * t);
        case Factor::cos:
          return cos(2.0 * pi * t);
        default:
          return T(1.0);
      }
    };
    return amp * apply(fx, x) * apply(fy, y);
  }

  // Hand-coded derivatives. For a factor u(2 pi t): u' = 2 pi w, u'' = -(2 pi)^2 u.
  static double value(Factor f, double t) {
    return f == Factor::sin ? std::sin(2 * pi * t) : f == Factor::cos ? std::cos(2 * pi * t) : 1.0;
  }
  static double deriv(Factor f, double t) {
    return f == Factor::sin ? 2 * pi * std::cos(2 * pi * t) : f == Factor::cos ? -2 * pi * std::sin(2 * pi * t) : 0.0;
  }
  static double second(Factor f, double t) {
    return f == Factor::one ? 0.0 : -4 * pi * pi * value(f, t);
  }
  double dx(double x, double y) const { return amp * deriv(fx, x) * value(fy, y); }
  double dy(double x, double y) const { return amp * value(fx, x) * deriv(fy, y); }
  double laplacian(double x, double y) const {
    return amp * (second(fx, x) * value(fy, y) + value(fx, x) * second(fy, y));
  }
};

}  // namespace closed_form

namespace detail {
inline std::array<double, 3> xyz(const std::array<double, kMaxDim>& x) { return {x[0], x[1], x[2]}; }
}  // namespace detail

/// Taub-NUT reduction on the box [1,2]^3 with n cells per axis. `sign` picks
/// the upper (+1) or lower (-1) signs in zeta, B^i_j and A^i_4; the pair then
/// satisfies F_A + zeta B = -sign * d_A B.
inline NamedConfiguration taub_nut(int sign, int n) {
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  if (n < 8) throw DomainError("Taub-NUT needs resolution >= 8");
  auto chart = Chart::padded_box(3, static_cast<std::size_t>(n), 1.0, 2.0, 2);
  auto metric = std::make_shared<const MetricField>(MetricField::conformal(chart, [](const auto& x) {
    const double e = closed_form::tn_exp2phi(detail::xyz(x));
    return e * e;
  }));
  auto zeta = RealTwoForm::sample(chart, [sign](const auto& x, double* out) {
    const auto z = closed_form::tn_zeta(detail::xyz(x), sign);
    for (int c = 0; c < 3; ++c) out[c] = z[c];
  });
  auto so4 = algebras::so(4);
  Form A = Form::sample(chart, so4, 1, [&](const auto& x, double* out) {
    double b[6];
    closed_form::tn_fields(detail::xyz(x), sign, out, b);
  });
  Form B = Form::sample(chart, so4, 0, [&](const auto& x, double* out) {
    double a[18];
    closed_form::tn_fields(detail::xyz(x), sign, a, out);
  });
  NamedConfiguration cfg{"taub-nut", n, chart, metric, std::move(zeta), ConnectionPair(std::move(A), std::move(B))};
  cfg.params = {{"sign", sign}, {"duality_sign", -sign}};
  cfg.expected = {{"duality_residual", Law::to_zero},
                  {"el_residual.rA", Law::to_zero},
                  {"el_residual.rB", Law::to_zero},
                  {"duality_residual.wrong_sign", Law::bounded_below},
                  {"bracket_B_dAB", Law::bounded_below}};
  cfg.measure = [sign](const NamedConfiguration& c) {
    const ELResidual r = el_residual(c.pair, c.zeta, *c.metric);
    const Form dB = covariant_derivative(c.pair.A, c.pair.B);
    return std::map<std::string, double>{
        {"duality_residual", duality_residual(c.pair, c.zeta, *c.metric, -sign)},
        {"duality_residual.wrong_sign", duality_residual(c.pair, c.zeta, *c.metric, sign)},
        {"el_residual.rA", r.norm_rA},
        {"el_residual.rB", r.norm_rB},
        {"bracket_B_dAB", norm(bracket_wedge(c.pair.B, dB), *c.metric)}};
  };
  return cfg;
}

/// Abelian Yang-Mills field on T^4 that admits no B, sampled on the
/// coordinate patch [0, pi]^4 with two ghost layers. B is forced pointwise by
/// the second equation, so the patch already witnesses nonexistence. The
/// curvature is prescribed; A is the zero form, so it only enters brackets.
inline NamedConfiguration t4_counterexample(int n) {
  if (n < 8) throw DomainError("T^4 counterexample needs resolution >= 8");
  auto chart = Chart::padded_box(4, static_cast<std::size_t>(n), 0.0, closed_form::pi, 2);
  auto metric = std::make_shared<const MetricField>(chart, [](const auto& x) {
    const double f = closed_form::t4_f(x[1], x[2]);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g(0, 0) = 1.0;
    g(1, 1) = 1.0;
    g(2, 2) = 1.0 / f;
    g(3, 3) = f;
    return g;
  });
  auto zeta = RealTwoForm::sample(chart, [](const auto&, double* out) {
    // 12, 13, 14, 23, 24, 34
    for (int c = 0; c < 6; ++c) out[c] = 0.0;
    out[0] = 1.0;
    out[5] = 1.0;
  });
  auto u1 = algebras::u1();
  Form F = Form::sample(chart, u1, 2, [](const auto& x, double* out) {
    const auto f = closed_form::t4_curvature(x[1], x[2]);
    for (int c = 0; c < 6; ++c) out[c] = 0.0;
    out[0] = f[0];
    out[1] = f[1];
  });
  Form B = Form::sample(chart, u1, 0, [](const auto& x, double* out) { out[0] = closed_form::t4_candidate_B(x[1], x[2]); });
  NamedConfiguration cfg{"t4-counterexample", n, chart, metric, std::move(zeta),
                         ConnectionPair(Form(chart, u1, 1), std::move(B))};
  cfg.curvature = std::move(F);
  cfg.expected = {{"codifferential_F", Law::to_zero},
                  {"zeta_adjoint_F_plus_2B", Law::to_zero},
                  {"dB", Law::bounded_below},
                  {"zeta_wedge_dB", Law::bounded_below},
                  {"el_residual.rA", Law::bounded_below},
                  {"el_residual.rB", Law::bounded_below}};
  cfg.measure = [](const NamedConfiguration& c) {
    const Form& F = *c.curvature;
    const auto [dstarF, zetaF] = b_zero_solution_check(c.pair.A, c.zeta, *c.metric, F);
    Form zf = zeta_adjoint(c.zeta, F, *c.metric);
    zf.axpy(2.0, c.pair.B);
    const Form dB = exterior_derivative(c.pair.B);
    const ELResidual r = el_residual(c.pair, c.zeta, *c.metric, F);
    return std::map<std::string, double>{{"codifferential_F", dstarF},
                                         {"zeta_adjoint_F", zetaF},
                                         {"zeta_adjoint_F_plus_2B", norm(zf, *c.metric)},
                                         {"dB", norm(dB, *c.metric)},
                                         {"zeta_wedge_dB", norm(zeta_wedge(c.zeta, dB), *c.metric)},
                                         {"el_residual.rA", r.norm_rA},
                                         {"el_residual.rB", r.norm_rB}};
  };
  return cfg;
}

/// Cone-flat pair on a chart of the degree-1 circle bundle over the unit
/// torus: coordinates (x, y, z), theta = dz + x dy, zeta = dx ^ dy, metric
/// dx^2 + dy^2 + theta^2. The u(1) field A' = 2 pi n i x dy has
/// F_{A'} = zeta Phi with Phi = 2 pi n i; A = A' + c theta Phi and
/// B = -(1 + c) Phi. The x axis is not periodic (the bundle's transition
/// function is not represented) and carries two ghost layers.
inline NamedConfiguration heisenberg(double c, int charge, int n) {
  if (charge == 0) throw DomainError("Heisenberg example needs a nonzero charge");
  if (n < 4) throw DomainError("Heisenberg example needs resolution >= 4");
  const double h = 1.0 / n;
  std::vector<Chart::Axis> axes{{static_cast<std::size_t>(n) + 4, h, -1.5 * h, false},
                                {static_cast<std::size_t>(n), h, 0.0, true},
                                {static_cast<std::size_t>(n), h, 0.0, true}};
  auto chart = std::make_shared<const Chart>(axes, 2);
  auto metric = std::make_shared<const MetricField>(chart, [](const auto& p) {
    const double x = p[0];
    Eigen::MatrixXd g(3, 3);
    g << 1, 0, 0, 0, 1 + x * x, x, 0, x, 1;
    return g;
  });
  auto zeta = RealTwoForm::sample(chart, [](const auto&, double* out) {
    out[0] = 1.0;  // dx ^ dy
    out[1] = 0.0;
    out[2] = 0.0;
  });
  auto u1 = algebras::u1();
  const double phi = 2.0 * closed_form::pi * charge;
  Form A = Form::sample(chart, u1, 1, [=](const auto& p, double* out) {
    const double x = p[0];
    out[0] = 0.0;
    out[1] = phi * (x + c * x);
    out[2] = phi * c;
  });
  Form B = Form::constant(chart, u1, 0, {-(1.0 + c) * phi});
  NamedConfiguration cfg{"heisenberg", n, chart, metric, std::move(zeta), ConnectionPair(std::move(A), std::move(B))};
  cfg.params = {{"c", c}, {"charge", charge}, {"phi", phi}};
  cfg.expected = {{"cone_flat.eta", Law::to_zero}, {"cone_flat.xi", Law::to_zero}};
  if (c == -1.0)
    cfg.expected.push_back({"yang_mills", Law::to_zero});
  else
    cfg.expected.push_back({"yang_mills", Law::converges_to, std::abs(1.0 + c) * phi, 0.05});
  cfg.measure = [](const NamedConfiguration& k) {
    const ConeForm curv = cone_curvature(k.pair, k.zeta);
    const Form F = curvature(k.pair.A);
    return std::map<std::string, double>{{"cone_flat.eta", norm(curv.eta(), *k.metric)},
                                         {"cone_flat.xi", norm(curv.xi(), *k.metric)},
                                         {"yang_mills", norm(codifferential(k.pair.A, F, *k.metric), *k.metric)}};
  };
  return cfg;
}

/// u(1) solutions on the flat unit torus: zeta = (c' - lap f) omega,
/// B = -c f + c'', F_A = c omega - zeta B. F_A is prescribed, except when
/// c = c' = 0: then the potential A = i c'' *df is supplied and F_A = dA.
inline NamedConfiguration abelian_2d(double c_prime, double c, double c_dprime, const closed_form::TorusFunction& f,
                                     int n) {
  if (c * c_prime != 0.0) throw DomainError("the product c * c' must vanish");
  if (n < 4) throw DomainError("abelian family needs resolution >= 4");
  auto chart = Chart::torus(2, static_cast<std::size_t>(n), 1.0);
  auto metric = std::make_shared<const MetricField>(MetricField::euclidean(chart));
  auto zeta = RealTwoForm::sample(chart, [=](const auto& x, double* out) { out[0] = c_prime - f.laplacian(x[0], x[1]); });
  auto u1 = algebras::u1();
  Form B = Form::sample(chart, u1, 0, [=](const auto& x, double* out) { out[0] = -c * f(x[0], x[1]) + c_dprime; });
  Form F = Form::sample(chart, u1, 2, [=](const auto& x, double* out) {
    const double z = c_prime - f.laplacian(x[0], x[1]);
    out[0] = c - z * (-c * f(x[0], x[1]) + c_dprime);
  });
  const bool has_potential = c == 0.0 && c_prime == 0.0;
  Form A = has_potential ? Form::sample(chart, u1, 1,
                                        [=](const auto& x, double* out) {
                                          out[0] = -c_dprime * f.dy(x[0], x[1]);
                                          out[1] = c_dprime * f.dx(x[0], x[1]);
                                        })
                         : Form(chart, u1, 1);
  NamedConfiguration cfg{"abelian-2d", n, chart, metric, std::move(zeta), ConnectionPair(std::move(A), std::move(B))};
  if (!has_potential) cfg.curvature = std::move(F);
  cfg.params = {{"c_prime", c_prime}, {"c", c}, {"c_dprime", c_dprime}, {"has_potential", has_potential ? 1.0 : 0.0}};
  cfg.expected = {{"el_residual.rA", Law::to_zero}, {"el_residual.rB", Law::to_zero}};
  if (c_prime != 0.0 || c == 0.0) {
    cfg.expected.push_back({"cone_flat.eta", Law::to_zero});
    cfg.expected.push_back({"cone_flat.xi", Law::to_zero});
  }
  cfg.measure = [](const NamedConfiguration& k) {
    const ELResidual r = el_residual(k.pair, k.zeta, *k.metric, k.curvature);
    const ConeForm curv = k.curvature ? cone_curvature(k.pair, k.zeta, *k.curvature) : cone_curvature(k.pair, k.zeta);
    return std::map<std::string, double>{{"el_residual.rA", r.norm_rA},
                                         {"el_residual.rB", r.norm_rB},
                                         {"cone_flat.eta", norm(curv.eta(), *k.metric)},
                                         {"cone_flat.xi", norm(curv.xi(), *k.metric)}};
  };
  return cfg;
}

/// Builds a configuration by registry name. Recognized parameters:
/// taub-nut {sign}; heisenberg {c, charge}; abelian-2d {c_prime, c, c_dprime,
/// amp} with the function chosen by `function`.
inline NamedConfiguration make_configuration(const std::string& name, const std::map<std::string, double>& params,
                                             const std::string& function, int resolution) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "taub-nut") return taub_nut(static_cast<int>(get("sign", 1.0)), resolution);
  if (name == "t4-counterexample") return t4_counterexample(resolution);
  if (name == "heisenberg")
    return heisenberg(get("c", 0.0), static_cast<int>(get("charge", 1.0)), resolution);
  if (name == "abelian-2d")
    return abelian_2d(get("c_prime", 0.0), get("c", 0.0), get("c_dprime", 0.25),
                      closed_form::TorusFunction::parse(function.empty() ? "sin_x_cos_y" : function, get("amp", 0.1)),
                      resolution);
  throw DomainError("unknown example '" + name + "'");
}

inline std::vector<std::string> configuration_names() {
  return {"taub-nut", "t4-counterexample", "heisenberg", "abelian-2d"};
}

}  // namespace coneym
