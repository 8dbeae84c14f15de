#pragma once

// Binary and JSON encodings of forms, and report encodings for flows and
// refinement studies.
//
// Binary layout, little-endian:
//   "CYMF" | u32 version | u32 dim | per axis: u64 size, f64 spacing,
//   f64 origin, u8 periodic | u32 quadrature depth | u32 degree | u32 margin |
//   u32 name length | name bytes | u64 coefficient count | f64 payload
// The payload is point-major: ((point * components + component) * basis + a).

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "coneym/convergence.hpp"
#include "coneym/functional.hpp"
#include "coneym/holonomy.hpp"

namespace coneym {

static_assert(std::endian::native == std::endian::little, "binary form layout assumes a little-endian host");

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DomainError("truncated form data");
  return v;
}
}  // namespace detail

inline constexpr std::uint32_t kFormFormatVersion = 1;

inline void write_form(std::ostream& os, const Form& f) {
  os.write("CYMF", 4);
  detail::put<std::uint32_t>(os, kFormFormatVersion);
  const Chart& chart = *f.chart();
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(chart.dim()));
  for (const auto& ax : chart.axes()) {
    detail::put<std::uint64_t>(os, ax.size);
    detail::put<double>(os, ax.spacing);
    detail::put<double>(os, ax.origin);
    detail::put<std::uint8_t>(os, ax.periodic ? 1 : 0);
  }
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(chart.quadrature_depth()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.degree()));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.margin()));
  const std::string& name = f.algebra()->name();
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  detail::put<std::uint64_t>(os, f.data().size());
  os.write(reinterpret_cast<const char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double)));
}

/// Reads a form; the chart is rebuilt from the header.
inline Form read_form(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "CYMF", 4) != 0) throw DomainError("not a form file");
  if (detail::get<std::uint32_t>(is) != kFormFormatVersion) throw DomainError("unsupported form file version");
  const auto dim = detail::get<std::uint32_t>(is);
  if (dim < 1 || dim > kMaxDim) throw DomainError("bad chart dimension in form file");
  std::vector<Chart::Axis> axes;
  for (std::uint32_t a = 0; a < dim; ++a) {
    Chart::Axis ax{};
    ax.size = detail::get<std::uint64_t>(is);
    ax.spacing = detail::get<double>(is);
    ax.origin = detail::get<double>(is);
    ax.periodic = detail::get<std::uint8_t>(is) != 0;
    axes.push_back(ax);
  }
  const auto qdepth = detail::get<std::uint32_t>(is);
  const auto degree = detail::get<std::uint32_t>(is);
  const auto margin = detail::get<std::uint32_t>(is);
  const auto len = detail::get<std::uint32_t>(is);
  if (len > 64) throw DomainError("bad algebra name in form file");
  std::string name(len, '\0');
  if (!is.read(name.data(), len)) throw DomainError("truncated form data");
  Form f(std::make_shared<const Chart>(axes, static_cast<int>(qdepth)), algebras::by_name(name),
         static_cast<int>(degree), static_cast<int>(margin));
  if (detail::get<std::uint64_t>(is) != f.data().size()) throw DomainError("coefficient count does not match header");
  if (!is.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(double))))
    throw DomainError("truncated form data");
  return f;
}

inline void save_form(const std::string& path, const Form& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open '" + path + "' for writing");
  write_form(os, f);
}

inline Form load_form(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open '" + path + "'");
  return read_form(is);
}

using Json = nlohmann::ordered_json;

inline constexpr std::size_t kJsonFormPointLimit = 1u << 16;

inline Json chart_to_json(const Chart& chart) {
  Json axes = Json::array();
  for (const auto& ax : chart.axes())
    axes.push_back({{"size", ax.size}, {"spacing", ax.spacing}, {"origin", ax.origin}, {"periodic", ax.periodic}});
  return {{"axes", axes}, {"quadrature_depth", chart.quadrature_depth()}};
}

inline Json form_to_json(const Form& f) {
  if (f.chart()->points() > kJsonFormPointLimit) throw DomainError("grid too large for JSON; use the binary layout");
  return {{"chart", chart_to_json(*f.chart())},
          {"degree", f.degree()},
          {"margin", f.margin()},
          {"algebra", f.algebra()->name()},
          {"coefficients", f.data()}};
}

inline Form form_from_json(const Json& j) {
  std::vector<Chart::Axis> axes;
  for (const auto& a : j.at("chart").at("axes"))
    axes.push_back({a.at("size").get<std::size_t>(), a.at("spacing").get<double>(), a.at("origin").get<double>(),
                    a.at("periodic").get<bool>()});
  Form f(std::make_shared<const Chart>(axes, j.at("chart").at("quadrature_depth").get<int>()),
         algebras::by_name(j.at("algebra").get<std::string>()), j.at("degree").get<int>(), j.at("margin").get<int>());
  auto coeffs = j.at("coefficients").get<std::vector<double>>();
  if (coeffs.size() != f.data().size()) throw DomainError("coefficient count does not match the chart");
  f.data() = std::move(coeffs);
  return f;
}

inline Json flow_report_to_json(const FlowReport& r) {
  return {{"iterations", r.iterations},
          {"terminated_by", to_string(r.terminated_by)},
          {"tolerance", r.tolerance},
          {"final_energy", r.energy_trace.back()},
          {"final_residual", {{"norm_rA", r.final_residual.norm_rA}, {"norm_rB", r.final_residual.norm_rB}}},
          {"energy_trace", r.energy_trace},
          {"step_sizes", r.step_sizes}};
}

/// Round-trip-exact decimal text for a double.
inline std::string exact(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string flow_trace_csv(const FlowReport& r) {
  std::ostringstream os;
  os << "iter,energy,norm_rA,norm_rB,step\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i)
    os << i << ',' << exact(r.energy_trace[i]) << ',' << exact(r.norm_rA_trace[i]) << ','
       << exact(r.norm_rB_trace[i]) << ',' << exact(r.step_sizes[i]) << '\n';
  return os.str();
}

inline Json table_to_json(const ConvergenceTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = {{"h", r.h}, {"residual", r.name}, {"value", r.value}};
    row["observed_order"] = r.observed_order ? Json(*r.observed_order) : Json(nullptr);
    rows.push_back(row);
  }
  return rows;
}

inline std::string table_csv(const ConvergenceTable& t) {
  std::ostringstream os;
  os << "h,residual,value,observed_order\n";
  for (const auto& r : t.rows)
    os << exact(r.h) << ',' << r.name << ',' << exact(r.value) << ',' << (r.observed_order ? exact(*r.observed_order) : "")
       << '\n';
  return os.str();
}

inline Json outcomes_to_json(const std::vector<LawOutcome>& outcomes) {
  Json out = Json::array();
  for (const auto& o : outcomes)
    out.push_back({{"residual", o.name}, {"law", to_string(o.law)}, {"pass", o.pass}, {"detail", o.detail}});
  return out;
}

inline Json period_report_to_json(const PeriodGroupReport& r) {
  Json j = {{"generators", r.generators}, {"classification", to_string(r.classification)}};
  j["minimal"] = r.minimal_generator ? Json(r.minimal_generator->str()) : Json(nullptr);
  j["rational_certificate"] =
      r.rational_certificate ? Json::array({r.rational_certificate->first, r.rational_certificate->second}) : Json(nullptr);
  j["extension"] = r.extension;
  j["cone_flat_implies_flat"] = r.cone_flat_implies_flat;
  return j;
}

inline GridLoop loop_from_json(const Json& j) {
  return {j.at("base").get<std::vector<std::size_t>>(), j.at("steps").get<std::vector<int>>()};
}

inline Json loop_to_json(const GridLoop& l) { return {{"base", l.base}, {"steps", l.steps}}; }

}  // namespace coneym
