#pragma once

// Independent oracles and small helpers shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "coneym/coneym.hpp"

namespace oracle {

inline int permutation_sign(std::vector<int> seq) {
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) sign = -sign;
      else if (seq[i] == seq[j]) return 0;
  return sign;
}

inline std::vector<int> bits(unsigned mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

/// All k-subsets of {0..m-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < m; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Hodge star by full tensor contraction with the Levi-Civita symbol:
/// (*a)_{l} = sqrt|g| / k! a^{j} eps_{j l}, indices raised with g^{-1}.
/// `comps` are the k-form components in lexicographic order.
inline std::vector<double> hodge_star(const Eigen::MatrixXd& g, int k, const std::vector<double>& comps) {
  const int m = static_cast<int>(g.rows());
  const Eigen::MatrixXd gi = g.inverse();
  const auto in_sets = subsets(m, k);
  const auto out_sets = subsets(m, m - k);
  // fully antisymmetric lower components
  auto lower = [&](const std::vector<int>& idx) {
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    const int s = permutation_sign(idx);
    if (s == 0) return 0.0;
    const auto it = std::find(in_sets.begin(), in_sets.end(), sorted);
    return s * comps[it - in_sets.begin()];
  };
  std::vector<int> tuple(k, 0);
  const int total = static_cast<int>(std::pow(m, k));
  std::vector<double> out(out_sets.size(), 0.0);
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  for (int t = 0; t < total; ++t) {
    int rem = t;
    for (int i = 0; i < k; ++i) {
      tuple[i] = rem % m;
      rem /= m;
    }
    // raised component a^{tuple}
    double raised = 0.0;
    std::vector<int> src(k, 0);
    for (int s = 0; s < total; ++s) {
      int r2 = s;
      double w = 1.0;
      for (int i = 0; i < k; ++i) {
        src[i] = r2 % m;
        r2 /= m;
        w *= gi(tuple[i], src[i]);
      }
      if (w != 0.0) raised += w * lower(src);
    }
    if (raised == 0.0) continue;
    for (std::size_t o = 0; o < out_sets.size(); ++o) {
      std::vector<int> full = tuple;
      full.insert(full.end(), out_sets[o].begin(), out_sets[o].end());
      out[o] += raised * permutation_sign(full);
    }
  }
  const double vol = std::sqrt(g.determinant());
  for (double& v : out) v *= vol / kfact;
  return out;
}

inline Eigen::MatrixXd random_spd(int m, coneym::FieldRng& rng) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rng.uniform(-0.5, 0.5);
  return a * a.transpose() + Eigen::MatrixXd::Identity(m, m);
}

inline double log2_ratio(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace oracle
