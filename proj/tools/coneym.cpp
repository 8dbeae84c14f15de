// coneym: config-driven experiment runner.
//
//   coneym <command> [--config path] [--key=value ...] [--threads N]
//
// Commands: verify, flow, convergence, holonomy, classify. Settings resolve
// as built-in defaults, then the JSON config document, then flags. The
// resolved settings are echoed into report.json.
//
// Exit codes: 0 pass, 1 a law or assertion failed, 2 configuration error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coneym/coneym.hpp"

namespace {

using coneym::Json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands{"verify", "flow", "convergence", "holonomy", "classify"};
const std::vector<std::string> kIntegerKeys{"seed", "max_iter", "resolution", "dim", "charge", "max_frequency"};

void add_example_keys(Json& j) {
  j["sign"] = "+";
  j["c"] = 0.0;
  j["charge"] = 1;
  j["c_prime"] = 0.0;
  j["c_dprime"] = 0.25;
  j["amp"] = 0.1;
  j["function"] = "sin_x_cos_y";
}

Json defaults(const std::string& command) {
  Json j = Json::object();
  if (command == "verify") {
    j["example"] = "";
    j["resolutions"] = nullptr;
    add_example_keys(j);
  } else if (command == "flow") {
    j["example"] = "abelian-2d";
    j["resolution"] = 32;
    j["perturb"] = 1e-2;
    j["seed"] = 7;
    j["max_iter"] = 500;
    j["tol"] = 0.0;
    j["initial_step"] = 1e-2;
    add_example_keys(j);
  } else if (command == "convergence") {
    j["identity"] = "leibniz";
    j["dim"] = 3;
    j["algebra"] = "su2";
    j["metric"] = "flat";
    j["resolutions"] = {16, 32, 64};
    j["seed"] = 7;
    j["max_frequency"] = 1;
  } else if (command == "holonomy") {
    j["example"] = "abelian-2d";
    j["resolutions"] = {16, 32, 64};
    j["loops"] = nullptr;
    add_example_keys(j);
  } else if (command == "classify") {
    j["periods"] = Json::array();
  }
  j["output"] = ".";
  j["format"] = "both";
  return j;
}

bool is_integer_key(const std::string& key) {
  return std::find(kIntegerKeys.begin(), kIntegerKeys.end(), key) != kIntegerKeys.end();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--" + key + " expects a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("--" + key + " expects a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--" + key + " expects an integer, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("--" + key + " expects an integer, got '" + text + "'");
  return v;
}

/// Converts flag text to the JSON type of the default it overrides.
Json flag_value(const std::string& key, const std::string& text, const Json& fallback) {
  if (key == "resolutions") {
    Json list = Json::array();
    for (const auto& item : split(text, ',')) list.push_back(parse_integer(key, item));
    return list;
  }
  if (key == "periods") {
    Json list = Json::array();
    for (const auto& item : split(text, ',')) list.push_back(item);
    return list;
  }
  if (key == "loops") {
    try {
      return Json::parse(text);
    } catch (const Json::exception& e) {
      throw ConfigError("--loops expects JSON: " + std::string(e.what()));
    }
  }
  if (is_integer_key(key)) return parse_integer(key, text);
  if (fallback.is_number()) return parse_number(key, text);
  return text;
}

/// Overlays a config document on the defaults with type checks.
void merge_document(Json& cfg, const Json& doc, const std::string& command) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") {
      if (value != command) throw ConfigError("config document is for command '" + value.dump() + "'");
      continue;
    }
    if (key == "threads") continue;
    if (!cfg.contains(key)) throw ConfigError("unknown key '" + key + "' for command " + command);
    const Json& current = cfg[key];
    bool ok = false;
    if (key == "sign")
      ok = value.is_string() || value.is_number_integer();
    else if (key == "periods")
      ok = value.is_array();
    else if (current.is_null())
      ok = value.is_array() || value.is_null();
    else if (is_integer_key(key))
      ok = value.is_number_integer();
    else if (current.is_number())
      ok = value.is_number();
    else if (current.is_string())
      ok = value.is_string();
    else if (current.is_array())
      ok = value.is_array();
    if (!ok) throw ConfigError("key '" + key + "' has the wrong type");
    cfg[key] = value;
  }
}

int parse_sign(const Json& v) {
  if (v.is_number_integer()) {
    const int s = v.get<int>();
    if (s == 1 || s == -1) return s;
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "+" || s == "+1" || s == "1") return 1;
    if (s == "-" || s == "-1") return -1;
  }
  throw ConfigError("sign must be + or -");
}

std::vector<int> resolutions_of(const Json& cfg) {
  std::vector<int> res;
  for (const auto& v : cfg.at("resolutions")) {
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 4096)
      throw ConfigError("resolutions must be positive integers");
    res.push_back(v.get<int>());
  }
  if (res.empty()) throw ConfigError("resolutions must not be empty");
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i] <= res[i - 1]) throw ConfigError("resolutions must be strictly increasing");
  return res;
}

std::map<std::string, double> example_params(const Json& cfg) {
  return {{"sign", parse_sign(cfg.at("sign"))}, {"c", cfg.at("c").get<double>()},
          {"charge", cfg.at("charge").get<double>()}, {"c_prime", cfg.at("c_prime").get<double>()},
          {"c_dprime", cfg.at("c_dprime").get<double>()}, {"amp", cfg.at("amp").get<double>()}};
}

void require_example(const std::string& name) {
  const auto names = coneym::configuration_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown example '" + name + "' (known: " + known + ")");
  }
}

std::vector<int> default_resolutions(const std::string& example) {
  if (example == "abelian-2d") return {16, 32, 64};
  return {8, 16, 32};
}

struct Outcome {
  Json results;
  bool pass = true;
  std::map<std::string, std::string> csv;
};

// ---------------------------------------------------------------------------

Outcome run_verify(Json& cfg) {
  const std::string example = cfg.at("example").get<std::string>();
  if (example.empty()) throw ConfigError("verify needs an example name");
  require_example(example);
  if (cfg.at("resolutions").is_null()) cfg["resolutions"] = default_resolutions(example);
  const auto res = resolutions_of(cfg);
  const auto params = example_params(cfg);
  const std::string function = cfg.at("function").get<std::string>();
  const auto study = coneym::refinement_study(
      [&](int n) { return coneym::make_configuration(example, params, function, n); }, res);
  Outcome out;
  out.results = {{"table", coneym::table_to_json(study.table)}, {"outcomes", coneym::outcomes_to_json(study.outcomes)}};
  out.pass = study.pass;
  out.csv["convergence.csv"] = coneym::table_csv(study.table);
  return out;
}

Outcome run_flow(Json& cfg) {
  const std::string example = cfg.at("example").get<std::string>();
  require_example(example);
  const int n = cfg.at("resolution").get<int>();
  if (n < 1) throw ConfigError("resolution must be positive");
  const long long seed = cfg.at("seed").get<long long>();
  if (seed < 0) throw ConfigError("seed must be non-negative");
  auto base = coneym::make_configuration(example, example_params(cfg), cfg.at("function").get<std::string>(), n);
  if (base.curvature)
    throw ConfigError("example '" + example + "' prescribes its curvature with these parameters; flow needs a potential");
  const double floor = coneym::energy(base.pair, base.zeta, *base.metric);
  coneym::FieldRng rng(static_cast<std::uint64_t>(seed));
  coneym::RandomFieldOptions ropts;
  ropts.scale = cfg.at("perturb").get<double>();
  const auto kick = coneym::random_pair(base.chart, base.pair.algebra(), rng, ropts);
  coneym::ConnectionPair start = base.pair;
  start.axpy(1.0, kick.A, kick.B);
  coneym::FlowOptions fopts;
  fopts.max_iter = cfg.at("max_iter").get<int>();
  fopts.tol = cfg.at("tol").get<double>();
  fopts.initial_step = cfg.at("initial_step").get<double>();
  if (fopts.max_iter < 0 || !(fopts.initial_step > 0.0)) throw ConfigError("max_iter and initial_step must be positive");
  const auto report = coneym::gradient_flow(std::move(start), base.zeta, *base.metric, fopts);
  bool monotone = true;
  for (std::size_t i = 1; i < report.energy_trace.size(); ++i)
    monotone = monotone && report.energy_trace[i] <= report.energy_trace[i - 1];
  const double final_energy = report.energy_trace.back();
  Outcome out;
  out.pass = monotone && final_energy <= 10.0 * floor;
  out.results = {{"floor_energy", floor},
                 {"start_energy", report.energy_trace.front()},
                 {"monotone", monotone},
                 {"within_floor", final_energy <= 10.0 * floor},
                 {"flow", coneym::flow_report_to_json(report)}};
  out.csv["flow_trace.csv"] = coneym::flow_trace_csv(report);
  return out;
}

// Operator identities on the unit torus with seeded random fields. The
// fields are continuum functions, so every resolution samples the same data.
double identity_value(const std::string& identity, int dim, const std::string& algebra, const std::string& metric_kind,
                      int n, std::uint64_t seed, const coneym::RandomFieldOptions& opts) {
  using namespace coneym;
  auto chart = Chart::torus(dim, static_cast<std::size_t>(n), 1.0);
  const MetricField metric = metric_kind == "flat"
                                 ? MetricField::euclidean(chart)
                                 : MetricField::conformal(chart, [](const auto& x) {
                                     return 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * x[0]);
                                   });
  FieldRng rng(seed);
  auto alg = algebras::by_name(algebra);
  if (identity == "adjointness") {
    const Form A = random_form(chart, alg, 1, rng, opts);
    const Form eta = random_form(chart, alg, 1, rng, opts);
    const Form omega = random_form(chart, alg, 2, rng, opts);
    return std::abs(inner_product(covariant_derivative(A, eta), omega, metric) -
                    inner_product(eta, codifferential(A, omega, metric), metric));
  }
  if (identity == "cone_adjointness") {
    const ConnectionPair pair = random_pair(chart, alg, rng, opts);
    const RealTwoForm zeta = random_closed_two_form(chart, rng, opts);
    const ConeForm c1 = random_cone_form(chart, alg, 1, rng, opts);
    const ConeForm c2 = random_cone_form(chart, alg, 2, rng, opts);
    return std::abs(cone_inner(cone_differential(pair, zeta, c1), c2, metric) -
                    cone_inner(c1, cone_codifferential(pair, zeta, c2, metric), metric));
  }
  if (identity == "d2") {
    const Form A = random_form(chart, alg, 1, rng, opts);
    const Form s = random_form(chart, alg, 0, rng, opts);
    Form r = covariant_derivative(A, covariant_derivative(A, s));
    r -= bracket_wedge(curvature(A), s);
    return norm(r, metric);
  }
  if (identity == "bianchi") {
    if (dim < 3) throw ConfigError("bianchi needs dim >= 3");
    const Form A = random_form(chart, alg, 1, rng, opts);
    return norm(covariant_derivative(A, curvature(A)), metric);
  }
  if (identity == "leibniz") {
    const Form a = random_form(chart, algebras::reals(), 1, rng, opts);
    const Form b = random_form(chart, algebras::reals(), 1, rng, opts);
    Form r = exterior_derivative(wedge(a, b));
    r -= wedge(exterior_derivative(a), b);
    r += wedge(a, exterior_derivative(b));
    return norm(r, metric);
  }
  throw ConfigError("unknown identity '" + identity + "' (adjointness, cone_adjointness, d2, bianchi, leibniz)");
}

Outcome run_convergence(Json& cfg) {
  const std::string identity = cfg.at("identity").get<std::string>();
  const int dim = cfg.at("dim").get<int>();
  if (dim < 2 || dim > 4) throw ConfigError("dim must be 2, 3 or 4");
  const std::string metric = cfg.at("metric").get<std::string>();
  if (metric != "flat" && metric != "conformal") throw ConfigError("metric must be flat or conformal");
  const long long seed = cfg.at("seed").get<long long>();
  if (seed < 0) throw ConfigError("seed must be non-negative");
  const std::string algebra = cfg.at("algebra").get<std::string>();
  try {
    coneym::algebras::by_name(algebra);
  } catch (const coneym::Error& e) {
    throw ConfigError(e.what());
  }
  const auto res = resolutions_of(cfg);
  coneym::RandomFieldOptions opts;
  opts.max_frequency = cfg.at("max_frequency").get<int>();
  if (opts.max_frequency < 1) throw ConfigError("max_frequency must be positive");
  std::vector<double> values;
  coneym::ConvergenceTable table;
  for (std::size_t i = 0; i < res.size(); ++i) {
    values.push_back(identity_value(identity, dim, algebra, metric, res[i], static_cast<std::uint64_t>(seed), opts));
    coneym::ConvergenceRow row{1.0 / res[i], identity, values.back(), std::nullopt};
    if (i > 0) row.observed_order = coneym::observed_order(values[i - 1], values[i], double(res[i]) / res[i - 1]);
    table.rows.push_back(row);
  }
  const auto outcome = coneym::judge(identity, {identity, coneym::Law::to_zero}, values);
  Outcome out;
  out.pass = outcome.pass;
  out.results = {{"table", coneym::table_to_json(table)}, {"outcomes", coneym::outcomes_to_json({outcome})}};
  out.csv["convergence.csv"] = coneym::table_csv(table);
  return out;
}

struct NamedLoop {
  std::string name;
  coneym::GridLoop loop;
};

/// Loops bounding disks of area 1/16, 1/4 and 1/2 of a square 2-torus with
/// n cells per side.
std::vector<NamedLoop> default_loops(std::size_t n) {
  if (n % 16 != 0) throw ConfigError("default loops need the coarsest resolution divisible by 16");
  const std::size_t u = n / 16;
  const std::vector<std::size_t> base{3 * u, 5 * u};
  auto run = [&](std::vector<int>& steps, int s, std::size_t len) { steps.insert(steps.end(), len * u, s); };
  std::vector<NamedLoop> loops;
  for (auto [name, side] : {std::pair<const char*, std::size_t>{"square_1_16", 4}, {"square_1_4", 8}}) {
    coneym::GridLoop l{base, {}};
    run(l.steps, 1, side);
    run(l.steps, 2, side);
    run(l.steps, -1, side);
    run(l.steps, -2, side);
    loops.push_back({name, l});
  }
  // [0, 1/2] x [0, 3/4] joined with [1/2, 3/4] x [0, 1/2], relative to the base
  coneym::GridLoop l{base, {}};
  run(l.steps, 1, 12);
  run(l.steps, 2, 8);
  run(l.steps, -1, 4);
  run(l.steps, 2, 4);
  run(l.steps, -1, 8);
  run(l.steps, -2, 12);
  loops.push_back({"l_shape_1_2", l});
  return loops;
}

std::vector<NamedLoop> configured_loops(const Json& spec) {
  if (!spec.is_array() || spec.empty()) throw ConfigError("loops must be a non-empty JSON array");
  std::vector<NamedLoop> loops;
  for (const auto& item : spec) {
    try {
      NamedLoop l{item.value("name", "loop" + std::to_string(loops.size())), coneym::loop_from_json(item)};
      loops.push_back(std::move(l));
    } catch (const Json::exception& e) {
      throw ConfigError("malformed loop: " + std::string(e.what()));
    }
  }
  return loops;
}

Outcome run_holonomy(Json& cfg) {
  const std::string example = cfg.at("example").get<std::string>();
  require_example(example);
  const auto res = resolutions_of(cfg);
  for (int n : res)
    if (n % res.front() != 0) throw ConfigError("holonomy resolutions must be multiples of the coarsest");
  const auto params = example_params(cfg);
  const std::string function = cfg.at("function").get<std::string>();
  std::vector<NamedLoop> loops;
  if (cfg.at("loops").is_null()) {
    if (example != "abelian-2d") throw ConfigError("no default loops for '" + example + "'; supply loops");
    loops = default_loops(static_cast<std::size_t>(res.front()));
    Json echo = Json::array();
    for (const auto& l : loops) {
      Json j = coneym::loop_to_json(l.loop);
      j["name"] = l.name;
      echo.push_back(j);
    }
    cfg["loops"] = echo;
  } else {
    loops = configured_loops(cfg.at("loops"));
  }
  std::map<std::string, std::vector<double>> values;
  Json details = Json::array();
  coneym::ConvergenceTable table;
  std::vector<double> hs;
  for (int n : res) {
    const auto c = coneym::make_configuration(example, params, function, n);
    hs.push_back(c.chart->max_spacing());
    for (const auto& l : loops) {
      const auto loop = coneym::refine_loop(l.loop, static_cast<std::size_t>(n / res.front()));
      const auto disk = coneym::enclosed_disk(*c.chart, loop);
      const auto check = coneym::verify_holonomy_lemma(c.pair, c.zeta, *c.metric, loop, disk, c.curvature);
      values[l.name].push_back(check.residual);
      details.push_back({{"loop", l.name},
                         {"resolution", n},
                         {"residual", check.residual},
                         {"zeta_integral", check.zeta_integral},
                         {"cone_flat_residual", check.cone_flat_residual}});
    }
  }
  Outcome out;
  std::vector<coneym::LawOutcome> outcomes;
  for (const auto& l : loops) {
    const auto& v = values[l.name];
    for (std::size_t i = 0; i < v.size(); ++i) {
      coneym::ConvergenceRow row{hs[i], l.name, v[i], std::nullopt};
      if (i > 0) row.observed_order = coneym::observed_order(v[i - 1], v[i], hs[i - 1] / hs[i]);
      table.rows.push_back(row);
    }
    outcomes.push_back(coneym::judge(l.name, {l.name, coneym::Law::to_zero}, v));
    out.pass = out.pass && outcomes.back().pass;
  }
  out.results = {{"table", coneym::table_to_json(table)},
                 {"outcomes", coneym::outcomes_to_json(outcomes)},
                 {"checks", details}};
  out.csv["holonomy.csv"] = coneym::table_csv(table);
  return out;
}

Outcome run_classify(Json& cfg) {
  std::vector<std::string> periods;
  for (const auto& v : cfg.at("periods")) {
    if (v.is_string())
      periods.push_back(v.get<std::string>());
    else if (v.is_number_integer())
      periods.push_back(std::to_string(v.get<long long>()));
    else
      throw ConfigError("periods must be exact: integers, \"p/q\" text or tagged irrationals");
  }
  coneym::PeriodGroupReport report;
  try {
    report = coneym::classify_period_group(periods);
  } catch (const coneym::Error& e) {
    throw ConfigError(e.what());
  }
  Outcome out;
  out.results = coneym::period_report_to_json(report);
  std::ostringstream csv;
  csv << "classification,minimal,extension,cone_flat_implies_flat\n"
      << coneym::to_string(report.classification) << ','
      << (report.minimal_generator ? report.minimal_generator->str() : "") << ',' << report.extension << ','
      << (report.cone_flat_implies_flat ? "true" : "false") << '\n';
  out.csv["classify.csv"] = csv.str();
  return out;
}

// ---------------------------------------------------------------------------

std::string build_hash() {
  std::ifstream is("/proc/self/exe", std::ios::binary);
  if (!is) return "unavailable";
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text)) throw std::runtime_error("cannot write " + path.string());
}

int execute(const std::string& command, Json cfg) {
  const std::string format = cfg.at("format").get<std::string>();
  if (format != "json" && format != "csv" && format != "both") throw ConfigError("format must be json, csv or both");
  Outcome out;
  try {
    if (command == "verify")
      out = run_verify(cfg);
    else if (command == "flow")
      out = run_flow(cfg);
    else if (command == "convergence")
      out = run_convergence(cfg);
    else if (command == "holonomy")
      out = run_holonomy(cfg);
    else
      out = run_classify(cfg);
  } catch (const coneym::Error& e) {
    throw ConfigError(e.what());
  }
  const std::filesystem::path dir = cfg.at("output").get<std::string>();
  std::filesystem::create_directories(dir);
  Json report = {{"command", command},
                 {"config", cfg},
                 {"build", build_hash()},
                 {"results", out.results},
                 {"pass", out.pass}};
  if (format != "csv") write_file(dir / "report.json", report.dump(2) + "\n");
  if (format != "json")
    for (const auto& [name, text] : out.csv) write_file(dir / name, text);
  std::cout << command << ": " << (out.pass ? "pass" : "FAIL") << " (" << (dir / "report.json").string() << ")\n";
  return out.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone Yang-Mills experiment runner"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_path;
  std::map<std::string, std::string> positional;
  unsigned threads = 0;
  for (const auto& command : kCommands) {
    CLI::App* sub = app.add_subcommand(command);
    sub->add_option("--config", config_path[command], "JSON config document");
    sub->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    if (command == "verify") sub->add_option("name", positional[command], "example name");
    const Json d = defaults(command);
    for (const auto& [key, value] : d.items()) {
      auto& slot = flags[command][key];
      sub->add_option("--" + key, slot, "default: " + value.dump());
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    for (const auto& command : kCommands) {
      CLI::App* sub = app.get_subcommand(command);
      if (!sub->parsed()) continue;
      Json cfg = defaults(command);
      if (!config_path[command].empty()) {
        std::ifstream is(config_path[command]);
        if (!is) throw ConfigError("cannot open config '" + config_path[command] + "'");
        Json doc;
        try {
          doc = Json::parse(is);
        } catch (const Json::exception& e) {
          throw ConfigError("malformed config: " + std::string(e.what()));
        }
        merge_document(cfg, doc, command);
      }
      if (!positional[command].empty()) cfg["example"] = positional[command];
      for (const auto& [key, text] : flags[command])
        if (sub->get_option("--" + key)->count() > 0) cfg[key] = flag_value(key, text, cfg[key]);
      coneym::parallel::set_threads(threads);
      return execute(command, std::move(cfg));
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
