#pragma once

// The cone Yang-Mills functional S = |F_A + zeta B|^2 + |d_A B|^2, its
// Euler-Lagrange residuals, steepest-descent flow, and the 3D duality and
// charge diagnostics.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "coneym/cone.hpp"

namespace coneym {

struct ELResidual {
  Form rA;
  Form rB;
  double norm_rA = 0.0;
  double norm_rB = 0.0;
};

inline double energy(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric) {
  Form eta = curvature(pair.A);
  eta += zeta_wedge(zeta, pair.B);
  const Form dB = covariant_derivative(pair.A, pair.B);
  return inner_product(eta, eta, metric) + inner_product(dB, dB, metric);
}

/// rA = d_A^*(F + zeta B) + [B, d_A B],  rB = zeta^*(F + zeta B) + d_A^* d_A B.
/// When F is supplied it replaces the curvature of A; A still enters every
/// covariant derivative.
inline ELResidual el_residual(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric,
                              const std::optional<Form>& F = std::nullopt) {
  Form fz = F ? *F : curvature(pair.A);
  fz += zeta_wedge(zeta, pair.B);
  const Form dB = covariant_derivative(pair.A, pair.B);
  Form rA = codifferential(pair.A, fz, metric);
  rA += bracket_wedge(pair.B, dB);
  Form rB = zeta_adjoint(zeta, fz, metric);
  rB += codifferential(pair.A, dB, metric);
  ELResidual r{std::move(rA), std::move(rB)};
  r.norm_rA = norm(r.rA, metric);
  r.norm_rB = norm(r.rB, metric);
  return r;
}

/// dS/dt at t = 0 along (A + t eta, B + t xi).
inline double first_variation(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric,
                              const Form& eta, const Form& xi) {
  const ELResidual r = el_residual(pair, zeta, metric);
  return 2.0 * inner_product(r.rA, eta, metric) + 2.0 * inner_product(r.rB, xi, metric);
}

struct FlowOptions {
  int max_iter = 500;
  /// Stop once max(|rA|, |rB|) < tol. Non-positive selects the default
  /// 10 h^2 max(1, initial residual).
  double tol = 0.0;
  double initial_step = 1e-2;
  double shrink = 0.5;
  double grow = 2.0;
  double armijo = 1e-4;
  int max_backtracks = 60;
};

struct FlowReport {
  enum class Termination { tolerance, max_iter, stall };

  int iterations = 0;
  std::vector<double> energy_trace;
  std::vector<double> norm_rA_trace;
  std::vector<double> norm_rB_trace;
  std::vector<double> step_sizes;
  ELResidual final_residual;
  Termination terminated_by = Termination::max_iter;
  double tolerance = 0.0;
  ConnectionPair final_pair;
};

inline std::string to_string(FlowReport::Termination t) {
  switch (t) {
    case FlowReport::Termination::tolerance:
      return "tolerance";
    case FlowReport::Termination::max_iter:
      return "max_iter";
    case FlowReport::Termination::stall:
      return "stall";
  }
  return "unknown";
}

/// Steepest descent on S along -(rA, rB) with Armijo backtracking.
inline FlowReport gradient_flow(ConnectionPair start, const RealTwoForm& zeta, const MetricField& metric,
                                const FlowOptions& opts = {}) {
  ConnectionPair pair = std::move(start);
  ELResidual r = el_residual(pair, zeta, metric);
  double S = energy(pair, zeta, metric);
  double tol = opts.tol;
  if (!(tol > 0.0)) {
    const double h = pair.chart()->max_spacing();
    tol = 10.0 * h * h * std::max(1.0, std::max(r.norm_rA, r.norm_rB));
  }
  std::vector<double> trace{S}, trA{r.norm_rA}, trB{r.norm_rB}, steps{0.0};
  auto terminated = FlowReport::Termination::max_iter;
  double step = opts.initial_step;
  int iter = 0;
  for (;; ++iter) {
    if (std::max(r.norm_rA, r.norm_rB) < tol) {
      terminated = FlowReport::Termination::tolerance;
      break;
    }
    if (iter >= opts.max_iter) break;
    const double slope = r.norm_rA * r.norm_rA + r.norm_rB * r.norm_rB;
    bool accepted = false;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      ConnectionPair trial = pair;
      trial.axpy(-step, r.rA, r.rB);
      const double St = energy(trial, zeta, metric);
      if (St <= S - opts.armijo * step * 2.0 * slope) {
        pair = std::move(trial);
        S = St;
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      terminated = FlowReport::Termination::stall;
      break;
    }
    r = el_residual(pair, zeta, metric);
    trace.push_back(S);
    trA.push_back(r.norm_rA);
    trB.push_back(r.norm_rB);
    steps.push_back(step);
    step *= opts.grow;
  }
  return FlowReport{iter,          std::move(trace), std::move(trA), std::move(trB), std::move(steps),
                    std::move(r), terminated,       tol,            std::move(pair)};
}

/// |F_A + zeta B - sign * d_A B| on a 3-chart.
inline double duality_residual(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric,
                               int sign) {
  if (pair.chart()->dim() != 3) throw DomainError("duality residual is defined for m = 3");
  Form lhs = curvature(pair.A);
  lhs += zeta_wedge(zeta, pair.B);
  lhs.axpy(-static_cast<double>(sign), hodge_star(covariant_derivative(pair.A, pair.B), metric));
  return norm(lhs, metric);
}

/// Q = integral of <F_A + zeta B ^ d_A B> with the positive pairing, so that
/// S >= 2|Q| holds at the discrete level.
inline double charge_Q(const ConnectionPair& pair, const RealTwoForm& zeta) {
  if (pair.chart()->dim() != 3) throw DomainError("charge is defined for m = 3");
  Form fz = curvature(pair.A);
  fz += zeta_wedge(zeta, pair.B);
  return integrate_top(paired_wedge(fz, covariant_derivative(pair.A, pair.B)));
}

/// Residual norms of F_A + zeta B + dchi b = sign *[b, B] and
/// *d_A B = sign d_A b on a 2-chart.
inline std::pair<double, double> hitchin_residual(const Form& A, const Form& b, const Form& B,
                                                  const RealTwoForm& zeta, const RealTwoForm& dchi,
                                                  const MetricField& metric, int sign) {
  if (A.dim() != 2) throw DomainError("Hitchin residual is defined for m = 2");
  Form first = curvature(A);
  first += zeta_wedge(zeta, B);
  first += zeta_wedge(dchi, b);
  first.axpy(-static_cast<double>(sign), hodge_star(bracket_wedge(b, B), metric));
  Form second = hodge_star(covariant_derivative(A, B), metric);
  second.axpy(-static_cast<double>(sign), covariant_derivative(A, b));
  return {norm(first, metric), norm(second, metric)};
}

/// B = 0 specialization: (|d_A^* F|, |zeta^* F|), with F the curvature of A
/// unless supplied.
inline std::pair<double, double> b_zero_solution_check(const Form& A, const RealTwoForm& zeta,
                                                       const MetricField& metric,
                                                       const std::optional<Form>& F = std::nullopt) {
  const Form f = F ? *F : curvature(A);
  return {norm(codifferential(A, f, metric), metric), norm(zeta_adjoint(zeta, f, metric), metric)};
}

}  // namespace coneym
