#pragma once

// Parallel transport around lattice loops, the holonomy identity for
// cone-flat pairs, and classification of the period group of zeta.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "coneym/functional.hpp"

namespace coneym {

/// A closed lattice path: from `base`, each step moves one point along axis
/// |s| - 1 in the direction sign(s).
struct GridLoop {
  std::vector<std::size_t> base;
  std::vector<int> steps;

  GridLoop reversed() const {
    GridLoop out{base, {}};
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) out.steps.push_back(-*it);
    return out;
  }

  /// This loop followed by `next` (same base point).
  GridLoop then(const GridLoop& next) const {
    if (next.base != base) throw DomainError("loops have different base points");
    GridLoop out = *this;
    out.steps.insert(out.steps.end(), next.steps.begin(), next.steps.end());
    return out;
  }
};

namespace detail {

inline std::size_t point_of(const Chart& chart, const std::vector<std::size_t>& idx) {
  if (static_cast<int>(idx.size()) != chart.dim()) throw DomainError("base point has the wrong dimension");
  std::size_t p = 0;
  for (int a = 0; a < chart.dim(); ++a) {
    if (idx[a] >= chart.axis(a).size) throw DomainError("base point lies outside the chart");
    p += idx[a] * chart.stride(a);
  }
  return p;
}

/// One step; throws when leaving a non-periodic axis.
inline std::size_t step(const Chart& chart, std::size_t p, int s) {
  const int a = std::abs(s) - 1;
  if (s == 0 || a >= chart.dim()) throw DomainError("loop step names an invalid axis");
  const std::size_t i = chart.index(p, a);
  if (!chart.axis(a).periodic && ((s > 0 && i + 1 >= chart.axis(a).size) || (s < 0 && i == 0)))
    throw DomainError("loop leaves the chart");
  return chart.neighbor(p, a, s > 0 ? 1 : -1);
}

}  // namespace detail

/// Ordered product U_N ... U_1 of per-edge transports
/// U = exp(-h (A(p) + A(q)) / 2) along each step p -> q.
inline Matrix holonomy(const Form& A, const GridLoop& loop) {
  if (A.degree() != 1) throw DegreeError("holonomy needs a connection 1-form");
  const Chart& chart = *A.chart();
  const Algebra& g = *A.algebra();
  std::size_t p = detail::point_of(chart, loop.base);
  const std::size_t start = p;
  Matrix hol = Matrix::Identity(g.matrix_dim(), g.matrix_dim());
  for (int s : loop.steps) {
    const std::size_t q = detail::step(chart, p, s);
    const int a = std::abs(s) - 1;
    const double h = chart.axis(a).spacing * (s > 0 ? 1.0 : -1.0);
    Eigen::VectorXd mid(g.size());
    for (int x = 0; x < g.size(); ++x) mid[x] = -0.5 * h * (A.at(p, a)[x] + A.at(q, a)[x]);
    hol = expm(g.to_matrix(mid)) * hol;
    p = q;
  }
  if (p != start) throw DomainError("loop is not closed");
  return hol;
}

/// Oriented unit square spanned by axes a < b at `corner`.
struct Plaquette {
  std::size_t corner;
  int a;
  int b;
  int orientation = 1;
};

using Disk = std::vector<Plaquette>;

namespace detail {
using EdgeKey = std::pair<std::size_t, int>;  // (start point, axis)

inline std::map<EdgeKey, int> boundary_edges(const Chart& chart, const Disk& disk) {
  std::map<EdgeKey, int> edges;
  for (const auto& pq : disk) {
    const std::size_t pa = chart.neighbor(pq.corner, pq.a, 1);
    const std::size_t pb = chart.neighbor(pq.corner, pq.b, 1);
    edges[{pq.corner, pq.a}] += pq.orientation;
    edges[{pa, pq.b}] += pq.orientation;
    edges[{pb, pq.a}] -= pq.orientation;
    edges[{pq.corner, pq.b}] -= pq.orientation;
  }
  std::erase_if(edges, [](const auto& e) { return e.second == 0; });
  return edges;
}

inline std::map<EdgeKey, int> loop_edges(const Chart& chart, const GridLoop& loop) {
  std::map<EdgeKey, int> edges;
  std::size_t p = point_of(chart, loop.base);
  for (int s : loop.steps) {
    const std::size_t q = step(chart, p, s);
    const int a = std::abs(s) - 1;
    if (s > 0)
      edges[{p, a}] += 1;
    else
      edges[{q, a}] -= 1;
    p = q;
  }
  std::erase_if(edges, [](const auto& e) { return e.second == 0; });
  return edges;
}
}  // namespace detail

/// Whether the oriented boundary of the disk equals the loop as a 1-chain.
inline bool bounds(const Chart& chart, const Disk& disk, const GridLoop& loop) {
  return detail::boundary_edges(chart, disk) == detail::loop_edges(chart, loop);
}

/// Walks the oriented boundary of a disk starting at `base`, which must lie
/// on it. Suited to simply connected plaquette sets.
inline GridLoop boundary_loop(const Chart& chart, const Disk& disk, const std::vector<std::size_t>& base) {
  auto edges = detail::boundary_edges(chart, disk);
  GridLoop loop{base, {}};
  if (edges.empty()) return loop;
  // outgoing[p] lists the signed steps leaving p along the oriented boundary
  std::multimap<std::size_t, int> outgoing;
  for (const auto& [key, mult] : edges) {
    const auto [p, a] = key;
    for (int i = 0; i < std::abs(mult); ++i) {
      if (mult > 0)
        outgoing.emplace(p, a + 1);
      else
        outgoing.emplace(chart.neighbor(p, a, 1), -(a + 1));
    }
  }
  const std::size_t start = detail::point_of(chart, base);
  std::size_t p = start;
  while (!outgoing.empty()) {
    auto it = outgoing.find(p);
    if (it == outgoing.end()) throw DomainError("base point is not on the disk boundary");
    const int s = it->second;
    outgoing.erase(it);
    loop.steps.push_back(s);
    p = detail::step(chart, p, s);
    if (p == start && outgoing.find(p) == outgoing.end()) break;
  }
  if (!outgoing.empty()) throw DomainError("disk boundary is not a single loop");
  return loop;
}

/// Plaquettes of the w x h rectangle with lower corner `corner` in axes (a, b).
inline Disk rectangle_disk(const Chart& chart, const std::vector<std::size_t>& corner, std::size_t w, std::size_t h,
                           int a = 0, int b = 1) {
  Disk disk;
  const std::size_t p0 = detail::point_of(chart, corner);
  std::size_t row = p0;
  for (std::size_t j = 0; j < h; ++j) {
    std::size_t p = row;
    for (std::size_t i = 0; i < w; ++i) {
      disk.push_back({p, a, b, 1});
      p = chart.neighbor(p, a, 1);
    }
    row = chart.neighbor(row, b, 1);
  }
  return disk;
}

inline GridLoop rectangle_loop(const std::vector<std::size_t>& corner, std::size_t w, std::size_t h, int a = 0,
                               int b = 1) {
  GridLoop loop{corner, {}};
  loop.steps.insert(loop.steps.end(), w, a + 1);
  loop.steps.insert(loop.steps.end(), h, b + 1);
  loop.steps.insert(loop.steps.end(), w, -(a + 1));
  loop.steps.insert(loop.steps.end(), h, -(b + 1));
  return loop;
}

/// The same loop on a grid refined by `factor`: base indices scale and every
/// step is repeated.
inline GridLoop refine_loop(const GridLoop& loop, std::size_t factor) {
  GridLoop out{loop.base, {}};
  for (auto& i : out.base) i *= factor;
  for (int s : loop.steps) out.steps.insert(out.steps.end(), factor, s);
  return out;
}

/// Plaquettes enclosed by a contractible loop lying in one coordinate plane,
/// each weighted by its winding number, so that the result bounds the loop.
inline Disk enclosed_disk(const Chart& chart, const GridLoop& loop) {
  std::vector<int> axes;
  for (int s : loop.steps) {
    const int a = std::abs(s) - 1;
    if (std::find(axes.begin(), axes.end(), a) == axes.end()) axes.push_back(a);
  }
  if (axes.empty()) return {};
  if (axes.size() != 2) throw DomainError("loop must span exactly one coordinate plane");
  std::sort(axes.begin(), axes.end());
  const int a = axes[0];
  const int b = axes[1];
  // Unwrapped coordinates relative to the base; a horizontal edge above a
  // plaquette centre contributes minus its direction to the winding number.
  std::map<std::pair<long, long>, int> winding;
  long x = 0;
  long y = 0;
  for (int s : loop.steps) {
    const int ax = std::abs(s) - 1;
    const int dir = s > 0 ? 1 : -1;
    if (ax == a) {
      const long x0 = dir > 0 ? x : x - 1;
      winding[{x0, y}] += -dir;
      x += dir;
    } else {
      y += dir;
    }
  }
  if (x != 0 || y != 0) throw DomainError("loop is not contractible in its plane");
  // Sweep each column downward from the edges: winding of plaquette (i, j) is
  // the sum of edge contributions at column i with height > j.
  std::map<long, std::map<long, int>> columns;
  for (const auto& [key, w] : winding)
    if (w != 0) columns[key.first][key.second] += w;
  std::map<std::pair<std::size_t, std::size_t>, int> cells;
  const long na = static_cast<long>(chart.axis(a).size);
  const long nb = static_cast<long>(chart.axis(b).size);
  const long ia = static_cast<long>(loop.base[a]);
  const long ib = static_cast<long>(loop.base[b]);
  auto wrap = [&](long v, long n, int axis) {
    if (!chart.axis(axis).periodic && (v < 0 || v >= n)) throw DomainError("loop leaves the chart");
    return static_cast<std::size_t>(((v % n) + n) % n);
  };
  for (const auto& [i, col] : columns) {
    int acc = 0;
    for (auto it = col.rbegin(); it != col.rend(); ++it) {
      const long top = it->first;
      acc += it->second;
      auto next = std::next(it);
      const long bottom = next == col.rend() ? top : next->first;
      if (acc == 0) continue;
      for (long j = bottom; j < top; ++j) {
        cells[{wrap(ia + i, na, a), wrap(ib + j, nb, b)}] += acc;
      }
    }
  }
  Disk disk;
  for (const auto& [ij, w] : cells) {
    if (w == 0) continue;
    std::vector<std::size_t> idx = loop.base;
    idx[a] = ij.first;
    idx[b] = ij.second;
    disk.push_back({detail::point_of(chart, idx), a, b, w});
  }
  return disk;
}

/// Sum over plaquettes of zeta at the plaquette centre (mean of the four
/// corners) times the plaquette area.
inline double disk_integral(const RealTwoForm& zeta, const Disk& disk) {
  const Chart& chart = *zeta.chart();
  const auto& table = multi_indices(chart.dim());
  double total = 0.0;
  for (const auto& pq : disk) {
    const int comp = table.position(2, (1u << pq.a) | (1u << pq.b));
    const std::size_t pa = chart.neighbor(pq.corner, pq.a, 1);
    const std::size_t pb = chart.neighbor(pq.corner, pq.b, 1);
    const std::size_t pab = chart.neighbor(pa, pq.b, 1);
    const double v = 0.25 * (zeta.form().at(pq.corner, comp)[0] + zeta.form().at(pa, comp)[0] +
                             zeta.form().at(pb, comp)[0] + zeta.form().at(pab, comp)[0]);
    total += pq.orientation * v * chart.axis(pq.a).spacing * chart.axis(pq.b).spacing;
  }
  return total;
}

struct HolonomyCheck {
  double residual = 0.0;
  double zeta_integral = 0.0;
  double cone_flat_residual = 0.0;
  Matrix holonomy;
  Matrix predicted;
};

/// Compares hol(loop) with exp((integral of zeta over the disk) xi), xi the
/// value of B at the base point. The pair must be cone-flat to within 10 h^2;
/// F replaces the curvature of A when supplied.
inline HolonomyCheck verify_holonomy_lemma(const ConnectionPair& pair, const RealTwoForm& zeta, const MetricField& metric,
                                           const GridLoop& loop, const Disk& disk,
                                           const std::optional<Form>& F = std::nullopt) {
  const Chart& chart = *pair.chart();
  if (!bounds(chart, disk, loop)) throw DomainError("disk boundary does not match the loop");
  const ConeForm curv = F ? cone_curvature(pair, zeta, *F) : cone_curvature(pair, zeta);
  const double flat = std::max(norm(curv.eta(), metric), norm(curv.xi(), metric));
  const double h = chart.max_spacing();
  if (flat > 10.0 * h * h) throw DomainError("pair is not cone-flat at tolerance 10 h^2");
  HolonomyCheck out;
  out.cone_flat_residual = flat;
  out.zeta_integral = disk_integral(zeta, disk);
  out.holonomy = holonomy(pair.A, loop);
  const AlgebraElement xi = element_at(pair.B, detail::point_of(chart, loop.base));
  out.predicted = expm(out.zeta_integral * xi.matrix());
  out.residual = (out.holonomy - out.predicted).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Period group classification with exact arithmetic.

struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;

  Rational() = default;
  Rational(std::int64_t num, std::int64_t den) : p(num), q(den) {
    if (q == 0) throw DomainError("zero denominator");
    if (q < 0) {
      if (p == INT64_MIN || q == INT64_MIN) throw DomainError("rational overflow");
      p = -p;
      q = -q;
    }
    const std::int64_t g = std::gcd(p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
  }

  bool zero() const { return p == 0; }
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  std::string str() const { return q == 1 ? std::to_string(p) : std::to_string(p) + "/" + std::to_string(q); }
  bool operator==(const Rational&) const = default;
};

namespace detail {
inline std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(a, b);
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a / g, b, &out)) throw DomainError("rational overflow");
  return out;
}
}  // namespace detail

/// gcd of nonzero rationals: gcd(numerators) / lcm(denominators), positive.
inline Rational rational_gcd(const std::vector<Rational>& xs) {
  std::int64_t num = 0;
  std::int64_t den = 1;
  for (const auto& x : xs) {
    if (x.zero()) continue;
    if (x.p == INT64_MIN) throw DomainError("rational overflow");
    num = std::gcd(num, std::abs(x.p));
    den = detail::checked_lcm(den, x.q);
  }
  return Rational(num, den);
}

/// An exact period c * tag: a rational multiple of a declared real. An empty
/// tag is the unit; distinct tags are declared rationally independent.
struct Period {
  Rational coeff;
  std::string tag;

  std::string str() const {
    if (tag.empty()) return coeff.str();
    if (coeff == Rational(1, 1)) return tag;
    return coeff.str() + "*" + tag;
  }
};

namespace detail {
inline bool is_integer_text(const std::string& s) {
  std::size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline bool is_tag_text(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den))
    throw DomainError("'" + s + "' is not an exact rational; floating-point periods are rejected");
  try {
    return Rational(std::stoll(num), std::stoll(den));
  } catch (const std::out_of_range&) {
    throw DomainError("rational overflow in '" + s + "'");
  }
}
}  // namespace detail

/// Parses "p/q", "p", "tag", "-tag" or "p/q*tag".
inline Period parse_period(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw DomainError("empty period");
  const auto star = s.find('*');
  if (star != std::string::npos) {
    const std::string tag = s.substr(star + 1);
    if (!detail::is_tag_text(tag)) throw DomainError("'" + tag + "' is not a valid irrational tag");
    return {detail::parse_rational(s.substr(0, star)), tag};
  }
  const bool neg = s[0] == '-';
  const std::string body = (neg || s[0] == '+') ? s.substr(1) : s;
  if (detail::is_tag_text(body)) return {Rational(neg ? -1 : 1, 1), body};
  return {detail::parse_rational(s), ""};
}

struct PeriodGroupReport {
  enum class Classification { trivial, discrete, dense };

  std::vector<std::string> generators;
  Classification classification = Classification::trivial;
  std::optional<Period> minimal_generator;
  std::optional<std::pair<std::int64_t, std::int64_t>> rational_certificate;
  std::string extension;  // "R", "S1" or "none"
  bool cone_flat_implies_flat = false;
};

inline std::string to_string(PeriodGroupReport::Classification c) {
  switch (c) {
    case PeriodGroupReport::Classification::trivial:
      return "trivial";
    case PeriodGroupReport::Classification::discrete:
      return "discrete";
    case PeriodGroupReport::Classification::dense:
      return "dense";
  }
  return "unknown";
}

/// Trivial when every period vanishes; discrete when all nonzero periods are
/// rational multiples of one tag (minimal generator from the gcd); dense when
/// two nonzero periods carry different tags.
inline PeriodGroupReport classify_period_group(const std::vector<Period>& periods) {
  PeriodGroupReport report;
  std::map<std::string, std::vector<Rational>> by_tag;
  for (const auto& p : periods) {
    report.generators.push_back(p.str());
    if (!p.coeff.zero()) by_tag[p.tag].push_back(p.coeff);
  }
  if (by_tag.empty()) {
    report.classification = PeriodGroupReport::Classification::trivial;
    report.extension = "R";
  } else if (by_tag.size() == 1) {
    const auto& [tag, coeffs] = *by_tag.begin();
    const Rational g = rational_gcd(coeffs);
    report.classification = PeriodGroupReport::Classification::discrete;
    report.minimal_generator = Period{g, tag};
    report.rational_certificate = std::pair{g.p, g.q};
    report.extension = "S1";
  } else {
    report.classification = PeriodGroupReport::Classification::dense;
    report.extension = "none";
    report.cone_flat_implies_flat = true;
  }
  return report;
}

inline PeriodGroupReport classify_period_group(const std::vector<std::string>& periods) {
  std::vector<Period> parsed;
  for (const auto& s : periods) parsed.push_back(parse_period(s));
  return classify_period_group(parsed);
}

}  // namespace coneym
