#pragma once

// Structured charts, Riemannian metrics and midpoint quadrature.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coneym/errors.hpp"
#include "coneym/multi_index.hpp"
#include "coneym/parallel.hpp"

namespace coneym {

/// A rectangular grid with per-axis periodicity.
///
/// Points are stored row-major (last axis fastest). On a periodic axis point i
/// sits at origin + i*h and the axis wraps after n points. On a non-periodic
/// axis the same placement holds but nothing wraps; the "depth" of a point is
/// its distance in points to the nearest non-periodic boundary. Differencing
/// needs depth >= 1, and each nested differencing step consumes one more layer.
/// Quadrature runs over the points with depth >= quadrature_depth(), which lets
/// constructors pad a physical region with ghost layers.
class Chart {
 public:
  struct Axis {
    std::size_t size;
    double spacing;
    double origin = 0.0;
    bool periodic = true;

    bool operator==(const Axis&) const = default;
  };

  static constexpr int kUnbounded = 255;

  explicit Chart(std::vector<Axis> axes, int quadrature_depth = 1)
      : axes_(std::move(axes)), quadrature_depth_(quadrature_depth) {
    if (axes_.size() < 1 || axes_.size() > static_cast<std::size_t>(kMaxDim))
      throw DomainError("chart dimension must be in [1, 4]");
    if (quadrature_depth_ < 1 || quadrature_depth_ >= kUnbounded)
      throw DomainError("quadrature depth must be at least 1");
    points_ = 1;
    for (const auto& a : axes_) {
      if (a.size < 3) throw DomainError("every axis needs at least 3 points");
      if (!(a.spacing > 0.0)) throw DomainError("axis spacing must be positive");
      points_ *= a.size;
    }
    strides_.assign(axes_.size(), 1);
    for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
      strides_[i] = strides_[i + 1] * axes_[i + 1].size;
    depth_.resize(points_);
    for (std::size_t p = 0; p < points_; ++p) {
      int d = kUnbounded;
      for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (axes_[a].periodic) continue;
        const std::size_t i = index(p, static_cast<int>(a));
        const std::size_t edge = std::min(i, axes_[a].size - 1 - i);
        d = std::min<int>(d, static_cast<int>(std::min<std::size_t>(edge, kUnbounded - 1)));
      }
      depth_[p] = static_cast<std::uint8_t>(d);
    }
  }

  /// Fully periodic m-torus of the given side with n points per axis.
  static std::shared_ptr<const Chart> torus(int m, std::size_t n, double side) {
    return std::make_shared<const Chart>(
        std::vector<Axis>(m, Axis{n, side / static_cast<double>(n), 0.0, true}));
  }

  /// Non-periodic box [lo, hi]^m sampled at n cell centres, padded with
  /// `ghost` extra points on each side. Quadrature covers exactly the box.
  static std::shared_ptr<const Chart> padded_box(int m, std::size_t n, double lo, double hi,
                                                 int ghost) {
    const double h = (hi - lo) / static_cast<double>(n);
    const double origin = lo + 0.5 * h - ghost * h;
    return std::make_shared<const Chart>(
        std::vector<Axis>(m, Axis{n + 2 * static_cast<std::size_t>(ghost), h, origin, false}),
        ghost);
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t points() const { return points_; }
  std::size_t stride(int a) const { return strides_[a]; }
  int quadrature_depth() const { return quadrature_depth_; }

  std::size_t index(std::size_t p, int a) const { return (p / strides_[a]) % axes_[a].size; }

  double coordinate(std::size_t p, int a) const {
    return axes_[a].origin + static_cast<double>(index(p, a)) * axes_[a].spacing;
  }

  std::array<double, kMaxDim> position(std::size_t p) const {
    std::array<double, kMaxDim> x{};
    for (int a = 0; a < dim(); ++a) x[a] = coordinate(p, a);
    return x;
  }

  /// Neighbour one step along an axis; wraps on periodic axes. The caller must
  /// only ask for neighbours of points with depth >= 1.
  std::size_t neighbor(std::size_t p, int a, int dir) const {
    const std::size_t i = index(p, a);
    const std::size_t n = axes_[a].size;
    if (dir > 0) return (i + 1 < n) ? p + strides_[a] : p - (n - 1) * strides_[a];
    return (i > 0) ? p - strides_[a] : p + (n - 1) * strides_[a];
  }

  int depth(std::size_t p) const { return depth_[p]; }
  bool interior(std::size_t p) const { return depth_[p] >= 1; }

  std::vector<bool> interior_mask() const {
    std::vector<bool> mask(points_);
    for (std::size_t p = 0; p < points_; ++p) mask[p] = interior(p);
    return mask;
  }

  bool fully_periodic() const {
    return std::all_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.periodic; });
  }

  /// Whether p belongs to the quadrature region for data valid at `margin`.
  bool in_region(std::size_t p, int margin = 0) const {
    return depth_[p] >= std::max(quadrature_depth_, margin);
  }

  double cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes_) v *= a.spacing;
    return v;
  }

  double max_spacing() const {
    double h = 0.0;
    for (const auto& a : axes_) h = std::max(h, a.spacing);
    return h;
  }

  bool operator==(const Chart& o) const {
    return axes_ == o.axes_ && quadrature_depth_ == o.quadrature_depth_;
  }

 private:
  std::vector<Axis> axes_;
  int quadrature_depth_;
  std::size_t points_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<std::uint8_t> depth_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline bool same_chart(const ChartPtr& a, const ChartPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Pointwise symmetric positive-definite metric with cached inverse and
/// volume factor.
class MetricField {
 public:
  using MetricFn = std::function<Eigen::MatrixXd(const std::array<double, kMaxDim>&)>;

  MetricField(ChartPtr chart, const MetricFn& metric) : chart_(std::move(chart)) {
    const int m = chart_->dim();
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    g_.resize(chart_->points() * mm);
    ginv_.resize(chart_->points() * mm);
    sqrt_det_.resize(chart_->points());
    diagonal_ = true;
    for (std::size_t p = 0; p < chart_->points(); ++p) {
      const Eigen::MatrixXd g = metric(chart_->position(p));
      if (g.rows() != m || g.cols() != m) throw DomainError("metric has the wrong shape");
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw DomainError("metric is not symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite");
      const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
      double det = 1.0;
      for (int i = 0; i < m; ++i) det *= llt.matrixL()(i, i);
      // det(g) = det(L)^2, so sqrt(det g) = prod diag(L).
      sqrt_det_[p] = det;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          g_[p * mm + i * m + j] = g(i, j);
          ginv_[p * mm + i * m + j] = (i == j) ? inv(i, j) : 0.5 * (inv(i, j) + inv(j, i));
          if (i != j && g(i, j) != 0.0) diagonal_ = false;
        }
      }
    }
  }

  static MetricField euclidean(ChartPtr chart) {
    const int m = chart->dim();
    return MetricField(std::move(chart),
                       [m](const auto&) { return Eigen::MatrixXd::Identity(m, m); });
  }

  /// Metric c(x)^2 * delta, given the conformal factor c(x)^2.
  static MetricField conformal(ChartPtr chart,
                               const std::function<double(const std::array<double, kMaxDim>&)>& factor) {
    const int m = chart->dim();
    return MetricField(std::move(chart), [m, &factor](const auto& x) {
      return Eigen::MatrixXd(factor(x) * Eigen::MatrixXd::Identity(m, m));
    });
  }

  const ChartPtr& chart() const { return chart_; }
  int dim() const { return chart_->dim(); }
  bool diagonal() const { return diagonal_; }

  double g(std::size_t p, int i, int j) const { return g_[(p * dim() + i) * dim() + j]; }
  double g_inv(std::size_t p, int i, int j) const { return ginv_[(p * dim() + i) * dim() + j]; }
  double sqrt_det(std::size_t p) const { return sqrt_det_[p]; }

  /// det of the (I, J) block of g^{-1}; raises the indices of a k-form.
  double raise_factor(std::size_t p, unsigned I, unsigned J) const {
    int rows[kMaxDim];
    int cols[kMaxDim];
    int k = 0;
    int kc = 0;
    for (int i = 0; i < dim(); ++i) {
      if (I & (1u << i)) rows[k++] = i;
      if (J & (1u << i)) cols[kc++] = i;
    }
    if (diagonal_) {
      if (I != J) return 0.0;
      double v = 1.0;
      for (int i = 0; i < k; ++i) v *= g_inv(p, rows[i], rows[i]);
      return v;
    }
    switch (k) {
      case 0:
        return 1.0;
      case 1:
        return g_inv(p, rows[0], cols[0]);
      case 2:
        return g_inv(p, rows[0], cols[0]) * g_inv(p, rows[1], cols[1]) -
               g_inv(p, rows[0], cols[1]) * g_inv(p, rows[1], cols[0]);
      default: {
        Eigen::Matrix4d block = Eigen::Matrix4d::Identity();
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) block(a, b) = g_inv(p, rows[a], cols[b]);
        return block.topLeftCorner(k, k).determinant();
      }
    }
  }

  /// Max over points of |g g^{-1} - I|.
  double inverse_defect() const {
    double worst = 0.0;
    const int m = dim();
    for (std::size_t p = 0; p < chart_->points(); ++p)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) s += g(p, i, l) * g_inv(p, l, j);
          worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
  }

 private:
  ChartPtr chart_;
  std::vector<double> g_;
  std::vector<double> ginv_;
  std::vector<double> sqrt_det_;
  bool diagonal_ = true;
};

struct ScalarDensityReport {
  double value = 0.0;
  std::string quadrature;
  std::size_t point_count = 0;
};

/// Midpoint rule for the integral of f dvol_g over the quadrature region.
inline ScalarDensityReport integrate_density(std::span<const double> f, const ChartPtr& chart,
                                             const MetricField& metric, int margin = 0) {
  if (!same_chart(chart, metric.chart())) throw ChartMismatch("density and metric live on different charts");
  if (f.size() != chart->points()) throw ChartMismatch("density size does not match the chart");
  const double w = chart->cell_volume();
  std::size_t count = 0;
  for (std::size_t p = 0; p < chart->points(); ++p)
    if (chart->in_region(p, margin)) ++count;
  const double value = parallel::sum(chart->points(), [&](std::size_t p) {
    return chart->in_region(p, margin) ? f[p] * metric.sqrt_det(p) * w : 0.0;
  });
  return {value, "midpoint", count};
}

}  // namespace coneym
