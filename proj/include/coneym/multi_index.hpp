#pragma once

// Combinatorics of strictly increasing multi-indices for forms on m <= 4
// dimensional charts. Subsets of {0..m-1} are encoded as bitmasks; each degree
// lists its subsets in lexicographic order, which is the component order used
// by every form.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "coneym/errors.hpp"

namespace coneym {

inline constexpr int kMaxDim = 4;

namespace detail {

inline int inversions(const std::vector<int>& seq) {
  int n = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++n;
  return n;
}

inline std::vector<int> mask_indices(unsigned mask) {
  std::vector<int> out;
  for (int i = 0; i < kMaxDim; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

}  // namespace detail

/// Sign of the permutation that sorts the concatenation of two disjoint
/// increasing index sets.
inline int concat_sign(unsigned first, unsigned second) {
  auto seq = detail::mask_indices(first);
  auto tail = detail::mask_indices(second);
  seq.insert(seq.end(), tail.begin(), tail.end());
  return (detail::inversions(seq) % 2 == 0) ? 1 : -1;
}

/// Component tables for one chart dimension.
class MultiIndexTable {
 public:
  struct WedgeTerm {
    int left;
    int right;
    int out;
    int sign;
  };
  struct DerivativeTerm {
    int axis;
    int in;  // component of the input (degree k)
    int sign;
  };

  explicit MultiIndexTable(int m) : m_(m) {
    if (m < 1 || m > kMaxDim) throw DomainError("chart dimension must be in [1, 4]");
    for (auto& p : position_) p.fill(-1);
    for (unsigned mask = 0; mask < (1u << m); ++mask) masks_[std::popcount(mask)].push_back(mask);
    for (int k = 0; k <= m; ++k) {
      std::sort(masks_[k].begin(), masks_[k].end(), [](unsigned a, unsigned b) {
        return detail::mask_indices(a) < detail::mask_indices(b);
      });
      for (std::size_t c = 0; c < masks_[k].size(); ++c) position_[k][masks_[k][c]] = static_cast<int>(c);
    }
    const unsigned full = (1u << m) - 1;
    for (int k = 0; k <= m; ++k) {
      for (unsigned mask : masks_[k]) {
        const unsigned comp = full & ~mask;
        complement_[k].push_back(position_[m - k][comp]);
        star_sign_[k].push_back(concat_sign(mask, comp));
      }
    }
    // d: (d alpha)_K = sum_p (-1)^p D_{K[p]} alpha_{K \ K[p]}
    for (int k = 0; k < m; ++k) {
      derivative_[k].resize(masks_[k + 1].size());
      for (std::size_t c = 0; c < masks_[k + 1].size(); ++c) {
        const unsigned K = masks_[k + 1][c];
        int p = 0;
        for (int axis = 0; axis < m; ++axis) {
          if (!(K & (1u << axis))) continue;
          const unsigned rest = K & ~(1u << axis);
          derivative_[k][c].push_back({axis, position_[k][rest], (p % 2 == 0) ? 1 : -1});
          ++p;
        }
      }
    }
    for (int j = 0; j <= m; ++j) {
      for (int k = 0; j + k <= m; ++k) {
        auto& terms = wedge_[j][k];
        for (std::size_t a = 0; a < masks_[j].size(); ++a) {
          for (std::size_t b = 0; b < masks_[k].size(); ++b) {
            const unsigned I = masks_[j][a];
            const unsigned J = masks_[k][b];
            if (I & J) continue;
            terms.push_back({static_cast<int>(a), static_cast<int>(b),
                             position_[j + k][I | J], concat_sign(I, J)});
          }
        }
      }
    }
  }

  int dim() const { return m_; }
  int count(int k) const { return static_cast<int>(masks_[k].size()); }
  unsigned mask(int k, int c) const { return masks_[k][c]; }
  int position(int k, unsigned mask) const { return position_[k][mask]; }
  std::vector<int> indices(int k, int c) const { return detail::mask_indices(masks_[k][c]); }

  /// Component of the complementary (m-k)-index and the orientation sign of
  /// (I, complement(I)).
  int complement(int k, int c) const { return complement_[k][c]; }
  int star_sign(int k, int c) const { return star_sign_[k][c]; }

  const std::vector<DerivativeTerm>& derivative(int k, int out) const { return derivative_[k][out]; }
  const std::vector<WedgeTerm>& wedge(int j, int k) const { return wedge_[j][k]; }

 private:
  int m_;
  std::array<std::vector<unsigned>, kMaxDim + 1> masks_{};
  std::array<std::array<int, 1u << kMaxDim>, kMaxDim + 1> position_{};
  std::array<std::vector<int>, kMaxDim + 1> complement_{};
  std::array<std::vector<int>, kMaxDim + 1> star_sign_{};
  std::array<std::vector<std::vector<DerivativeTerm>>, kMaxDim + 1> derivative_{};
  std::array<std::array<std::vector<WedgeTerm>, kMaxDim + 1>, kMaxDim + 1> wedge_{};
};

inline const MultiIndexTable& multi_indices(int m) {
  static const std::array<MultiIndexTable, kMaxDim> tables{MultiIndexTable(1), MultiIndexTable(2),
                                                           MultiIndexTable(3), MultiIndexTable(4)};
  if (m < 1 || m > kMaxDim) throw DomainError("chart dimension must be in [1, 4]");
  return tables[m - 1];
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace coneym
