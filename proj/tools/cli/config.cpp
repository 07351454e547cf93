#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "sipdyn/errors.hpp"

namespace sipdyn::cli {

namespace {

constexpr std::array<std::string_view, 7> kCommandNames = {
    "simulate", "equilibria", "sweep", "curve", "scan", "threshold", "percapita"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

// Reads keys off one JSON object and rejects whatever is left over.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void number(const std::string& key, double& out) {
    if (const Json* v = take(key)) out = as_number(*v, key);
  }

  void integer(const std::string& key, int& out) {
    if (const Json* v = take(key)) {
      if (!v->is_number_integer()) fail(path(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < -1000000000LL || x > 1000000000LL) fail(path(key), "integer out of range");
      out = static_cast<int>(x);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const Json* v = take(key)) {
      if (!v->is_boolean()) fail(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const Json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) out.push_back(as_number(e, key));
    return out;
  }

  template <std::size_t N>
  std::optional<std::array<double, N>> fixed(const std::string& key) {
    auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->size() != N) fail(path(key), "expected " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    std::copy(v->begin(), v->end(), out.begin());
    return out;
  }

  void range(const std::string& key, Range& out) {
    if (auto v = fixed<2>(key)) out = {(*v)[0], (*v)[1]};
  }

  void state(const std::string& key, State& out) {
    if (auto v = fixed<3>(key)) out = State::from(*v);
  }

  void param(const std::string& key, ParamId& out) {
    if (auto s = string(key)) {
      auto id = find_param(*s);
      if (!id) fail(path(key), "unknown parameter '" + *s + "'");
      out = *id;
    }
  }

  const Json* object(const std::string& key) {
    const Json* v = take(key);
    if (v && !v->is_object()) fail(path(key), "expected an object");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
    }
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

 private:
  const Json* take(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  double as_number(const Json& v, const std::string& key) const {
    if (!v.is_number()) fail(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path(key), "expected a finite number");
    return x;
  }

  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_sim(Reader& r, SimOptions& o) {
  r.number("t_end", o.t_end);
  r.number("rel_tol", o.rel_tol);
  r.number("abs_tol", o.abs_tol);
  r.number("extinction_threshold", o.extinction_threshold);
  r.number("convergence_window", o.convergence_window);
  r.number("convergence_tol", o.convergence_tol);
  r.boolean("stop_on_convergence", o.stop_on_convergence);
  r.number("min_step", o.min_step);
  r.number("max_step", o.max_step);
  r.number("initial_step", o.initial_step);
}

void write_sim(Json& j, const SimOptions& o) {
  j["t_end"] = o.t_end;
  j["rel_tol"] = o.rel_tol;
  j["abs_tol"] = o.abs_tol;
  j["extinction_threshold"] = o.extinction_threshold;
  j["convergence_window"] = o.convergence_window;
  j["convergence_tol"] = o.convergence_tol;
  j["stop_on_convergence"] = o.stop_on_convergence;
  j["min_step"] = o.min_step;
  j["max_step"] = o.max_step;
  j["initial_step"] = o.initial_step;
}

void check_ic(const State& x, const std::string& where) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(x[i] >= 0.0)) fail(where, "initial condition must be nonnegative");
  }
}

void check_positive(double v, const std::string& where) {
  if (!(v > 0.0)) fail(where, "must be positive");
}

void check_in_box(ParamId id, double v, const Parameters& p, const std::string& where) {
  try {
    validate(p.with(id, v));
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

SimulateConfig read_simulate(Reader& r) {
  SimulateConfig c;
  r.state("ic", c.ic);
  read_sim(r, c.sim);
  r.number("classification_tol", c.tol);
  check_ic(c.ic, r.path("ic"));
  check_positive(c.tol, r.path("classification_tol"));
  validate(c.sim);
  return c;
}

SweepConfig read_sweep(Reader& r, const Parameters& p) {
  SweepConfig c;
  r.param("parameter", c.parameter);
  r.range("range", c.range);
  r.integer("n", c.n);
  r.number("localize_tol", c.localize_tol);
  r.boolean("include_infeasible", c.include_infeasible);
  if (!(c.range.lo < c.range.hi)) fail(r.path("range"), "must be increasing");
  if (c.n < 3) fail(r.path("n"), "must be at least 3");
  check_positive(c.localize_tol, r.path("localize_tol"));
  check_in_box(c.parameter, c.range.lo, p, r.path("range"));
  check_in_box(c.parameter, c.range.hi, p, r.path("range"));
  return c;
}

CurveConfig read_curve(Reader& r, const Parameters& p) {
  CurveConfig c;
  c.trace.steps = 600;
  if (auto k = r.string("kind")) {
    if (*k == "fold") c.kind = CurveKind::fold;
    else if (*k == "hopf") c.kind = CurveKind::hopf;
    else fail(r.path("kind"), "expected \"fold\" or \"hopf\"");
  }
  r.param("p1", c.p1);
  r.param("p2", c.p2);
  if (auto s = r.fixed<2>("seed")) c.seed = *s;
  r.integer("steps", c.trace.steps);
  r.integer("direction", c.trace.direction);
  r.number("h_init", c.trace.h_init);
  r.number("h_min", c.trace.h_min);
  r.number("h_max", c.trace.h_max);
  r.number("localize_tol", c.trace.localize_tol);
  if (auto s = r.fixed<3>("state_seed")) c.trace.state_seed = State::from(*s);
  c.boundary_zero_hopf_seed = r.fixed<2>("boundary_zero_hopf_seed");

  if (c.p1 == c.p2) fail(r.path("p2"), "must differ from p1");
  if (c.trace.steps < 1) fail(r.path("steps"), "must be positive");
  if (c.trace.direction != 1 && c.trace.direction != -1) fail(r.path("direction"), "must be 1 or -1");
  check_positive(c.trace.h_min, r.path("h_min"));
  if (!(c.trace.h_min <= c.trace.h_init && c.trace.h_init <= c.trace.h_max)) {
    fail(r.path("h_init"), "must satisfy h_min <= h_init <= h_max");
  }
  check_positive(c.trace.localize_tol, r.path("localize_tol"));
  try {
    validate(p.with(c.p1, c.seed[0]).with(c.p2, c.seed[1]));
  } catch (const ValidationError& e) {
    fail(r.path("seed"), e.what());
  }
  if (c.trace.state_seed) check_ic(*c.trace.state_seed, r.path("state_seed"));
  return c;
}

ScanConfig read_scan(Reader& r, const Parameters& p) {
  ScanConfig c;
  r.range("L_range", c.L);
  r.range("r_range", c.r);
  r.integer("nL", c.nL);
  r.integer("nr", c.nr);
  r.state("ic", c.ic);
  read_sim(r, c.sim);
  r.number("classification_tol", c.tol);
  if (c.nL < 1) fail(r.path("nL"), "must be positive");
  if (c.nr < 1) fail(r.path("nr"), "must be positive");
  if (!(c.L.lo <= c.L.hi) || (c.nL > 1 && !(c.L.lo < c.L.hi))) fail(r.path("L_range"), "must be increasing");
  if (!(c.r.lo <= c.r.hi) || (c.nr > 1 && !(c.r.lo < c.r.hi))) fail(r.path("r_range"), "must be increasing");
  for (double l : {c.L.lo, c.L.hi}) check_in_box(ParamId::L, l, p, r.path("L_range"));
  for (double x : {c.r.lo, c.r.hi}) check_in_box(ParamId::r, x, p, r.path("r_range"));
  check_ic(c.ic, r.path("ic"));
  check_positive(c.tol, r.path("classification_tol"));
  validate(c.sim);
  return c;
}

ThresholdConfig read_threshold(Reader& r) {
  ThresholdConfig c;
  r.number("tol", c.tol);
  r.integer("samples", c.samples);
  check_positive(c.tol, r.path("tol"));
  if (c.samples < 2) fail(r.path("samples"), "must be at least 2");
  return c;
}

PercapitaConfig read_percapita(Reader& r, const Parameters& p) {
  PercapitaConfig c;
  if (auto v = r.numbers("I_values")) c.I_values = *v;
  c.S = {p.K / 1000.0, p.K};
  r.range("S_range", c.S);
  r.integer("n", c.n);
  if (c.I_values.empty()) fail(r.path("I_values"), "must not be empty");
  for (double I : c.I_values) {
    if (!(I >= 0.0)) fail(r.path("I_values"), "must be nonnegative");
  }
  if (!(c.S.lo > 0.0 && c.S.lo < c.S.hi && c.S.hi <= p.K)) fail(r.path("S_range"), "must lie in (0, K]");
  if (c.n < 2) fail(r.path("n"), "must be at least 2");
  return c;
}

Json range_json(Range r) { return Json::array({r.lo, r.hi}); }
Json state_json(const State& x) { return Json::array({x.S, x.I, x.P}); }

struct OptionsWriter {
  Json& j;
  void operator()(const SimulateConfig& c) const {
    j["ic"] = state_json(c.ic);
    write_sim(j, c.sim);
    j["classification_tol"] = c.tol;
  }
  void operator()(const EquilibriaConfig&) const {}
  void operator()(const SweepConfig& c) const {
    j["parameter"] = param_name(c.parameter);
    j["range"] = range_json(c.range);
    j["n"] = c.n;
    j["localize_tol"] = c.localize_tol;
    j["include_infeasible"] = c.include_infeasible;
  }
  void operator()(const CurveConfig& c) const {
    j["kind"] = curve_name(c.kind);
    j["p1"] = param_name(c.p1);
    j["p2"] = param_name(c.p2);
    j["seed"] = Json::array({c.seed[0], c.seed[1]});
    j["steps"] = c.trace.steps;
    j["direction"] = c.trace.direction;
    j["h_init"] = c.trace.h_init;
    j["h_min"] = c.trace.h_min;
    j["h_max"] = c.trace.h_max;
    j["localize_tol"] = c.trace.localize_tol;
    if (c.trace.state_seed) j["state_seed"] = state_json(*c.trace.state_seed);
    if (c.boundary_zero_hopf_seed) {
      j["boundary_zero_hopf_seed"] =
          Json::array({(*c.boundary_zero_hopf_seed)[0], (*c.boundary_zero_hopf_seed)[1]});
    }
  }
  void operator()(const ScanConfig& c) const {
    j["L_range"] = range_json(c.L);
    j["r_range"] = range_json(c.r);
    j["nL"] = c.nL;
    j["nr"] = c.nr;
    j["ic"] = state_json(c.ic);
    write_sim(j, c.sim);
    j["classification_tol"] = c.tol;
  }
  void operator()(const ThresholdConfig& c) const {
    j["tol"] = c.tol;
    j["samples"] = c.samples;
  }
  void operator()(const PercapitaConfig& c) const {
    j["I_values"] = c.I_values;
    j["S_range"] = range_json(c.S);
    j["n"] = c.n;
  }
};

}  // namespace

std::string_view command_name(Command c) noexcept {
  return kCommandNames[static_cast<std::size_t>(c)];
}

Command parse_command(std::string_view name) {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
    if (kCommandNames[i] == name) return static_cast<Command>(i);
  }
  throw ValidationError("unknown command '" + std::string(name) + "'");
}

Json params_json(const Parameters& p) {
  Json j = Json::object();
  for (ParamId id : kAllParams) j[std::string(param_name(id))] = p.get(id);
  return j;
}

RunConfig parse_config(const Json& doc_in, Command command) {
  const Json* doc = &doc_in;
  if (doc->is_object() && doc->value("schema", "") == kSummarySchema) {
    if (!doc->contains("config")) fail("summary", "has no config block");
    doc = &(*doc)["config"];
  }

  Reader top(*doc, "config");
  const auto schema = top.string("schema");
  if (!schema) fail("config", "missing \"schema\"");
  if (*schema != kConfigSchema) {
    fail("config.schema", "expected \"" + std::string(kConfigSchema) + "\", got \"" + *schema + "\"");
  }
  if (auto c = top.string("command"); c && parse_command(*c) != command) {
    fail("config.command", "config is for '" + *c + "', not '" + std::string(command_name(command)) + "'");
  }

  RunConfig cfg;
  cfg.command = command;
  if (const Json* pj = top.object("parameters")) {
    Reader pr(*pj, "config.parameters");
    for (ParamId id : kAllParams) pr.number(std::string(param_name(id)), cfg.params.ref(id));
    pr.finish();
  }
  try {
    validate(cfg.params);
  } catch (const ValidationError& e) {
    fail("config.parameters", e.what());
  }

  static const Json empty = Json::object();
  const Json* oj = top.object("options");
  Reader r(oj ? *oj : empty, "config.options");
  switch (command) {
    case Command::simulate: cfg.options = read_simulate(r); break;
    case Command::equilibria: cfg.options = EquilibriaConfig{}; break;
    case Command::sweep: cfg.options = read_sweep(r, cfg.params); break;
    case Command::curve: cfg.options = read_curve(r, cfg.params); break;
    case Command::scan: cfg.options = read_scan(r, cfg.params); break;
    case Command::threshold: cfg.options = read_threshold(r); break;
    case Command::percapita: cfg.options = read_percapita(r, cfg.params); break;
  }
  r.finish();
  top.finish();
  return cfg;
}

RunConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, command);
}

Json to_json(const RunConfig& c) {
  Json j = Json::object();
  j["schema"] = kConfigSchema;
  j["command"] = command_name(c.command);
  j["parameters"] = params_json(c.params);
  Json opts = Json::object();
  std::visit(OptionsWriter{opts}, c.options);
  j["options"] = std::move(opts);
  return j;
}

}  // namespace sipdyn::cli
