#include "cli/run.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "cli/csv.hpp"
#include "sipdyn/codim1.hpp"
#include "sipdyn/codim2.hpp"
#include "sipdyn/equilibria.hpp"
#include "sipdyn/errors.hpp"
#include "sipdyn/integrate.hpp"
#include "sipdyn/scan.hpp"
#include "sipdyn/version.hpp"

namespace sipdyn::cli {

namespace {

const std::vector<std::string> kEigenColumns = {"re1", "im1", "re2", "im2", "re3", "im3"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Json point_json(const State& x) { return Json{{"S", x.S}, {"I", x.I}, {"P", x.P}}; }

Json eigen_json(const EigenTriple& e) {
  Json j = Json::array();
  for (const cplx& v : e) j.push_back(Json::array({v.real(), v.imag()}));
  return j;
}

void eigen_cells(CsvWriter& w, const EigenTriple& e) {
  for (const cplx& v : e) w.cell(v.real()).cell(v.imag());
}

void nan_cells(CsvWriter& w, int n) {
  for (int i = 0; i < n; ++i) w.cell(std::nan(""));
}

std::string_view event_label(EventKind k) {
  switch (k) {
    case EventKind::saddle_node: return "SN";
    case EventKind::hopf: return "H";
    case EventKind::transcritical: break;
  }
  return "TC";
}

struct Executor {
  const RunConfig& cfg;
  unsigned threads;
  Artifacts& out;

  void add(std::string name, const CsvWriter& w) { out.files.emplace_back(std::move(name), w.text()); }
  Json& results() { return out.summary["results"]; }

  void operator()(const SimulateConfig& c) {
    const Parameters& p = cfg.params;
    const Trajectory tr = simulate(p, c.ic, c.sim);
    const Outcome oc = asymptotic_state(tr, all_equilibria(p), c.tol);

    CsvWriter traj({"t", "S", "I", "P"});
    for (const Sample& s : tr.samples) {
      traj.cell(s.t).cell(s.x.S).cell(s.x.I).cell(s.x.P);
      traj.end_row();
    }
    CsvWriter events({"component", "time"});
    Json ev = Json::array();
    for (const ExtinctionEvent& e : tr.events) {
      events.cell(component_name(e.component)).cell(e.time);
      events.end_row();
      ev.push_back({{"component", component_name(e.component)}, {"time", e.time}});
    }
    add("trajectory.csv", traj);
    add("events.csv", events);

    Json& r = results();
    r["outcome"] = outcome_name(oc.kind);
    r["kind"] = oc.equilibrium ? Json(kind_name(*oc.equilibrium)) : Json(nullptr);
    r["distance"] = oc.distance;
    r["amplitude"] = oc.amplitude;
    r["termination"] = termination_name(tr.reason);
    r["final_time"] = tr.samples.back().t;
    r["final_state"] = point_json(tr.final_state());
    r["events"] = std::move(ev);
    r["samples"] = tr.samples.size();
  }

  void operator()(const EquilibriaConfig&) {
    const Parameters& p = cfg.params;
    CsvWriter w(concat({"kind", "S", "I", "P", "feasible", "verdict"},
                       concat(kEigenColumns, {"omega1", "omega2", "omega3"})));
    Json list = Json::array();
    for (const Equilibrium& eq : all_equilibria(p)) {
      w.cell(kind_name(eq.kind)).cell(eq.point.S).cell(eq.point.I).cell(eq.point.P).cell(eq.feasible);
      Json e = {{"kind", kind_name(eq.kind)}, {"point", point_json(eq.point)}, {"feasible", eq.feasible}};
      std::optional<StabilityReport> rep;
      if (eq.point.S > 0.0) rep = analyze(eq, p);
      if (rep) {
        w.cell(verdict_name(rep->verdict));
        eigen_cells(w, rep->eigenvalues);
        w.cell(rep->coefficients.omega1).cell(rep->coefficients.omega2).cell(rep->coefficients.omega3);
        e["verdict"] = verdict_name(rep->verdict);
        e["eigenvalues"] = eigen_json(rep->eigenvalues);
        e["coefficients"] = Json::array(
            {rep->coefficients.omega1, rep->coefficients.omega2, rep->coefficients.omega3});
        Json conds = Json::array();
        for (const auto& f : rep->conditions) {
          conds.push_back({{"name", f.name}, {"value", f.value}, {"holds", f.holds}});
        }
        e["conditions"] = std::move(conds);
      } else {
        // Jacobian undefined at S <= 0
        w.cell("singular");
        nan_cells(w, 9);
        e["verdict"] = "singular";
      }
      w.end_row();
      list.push_back(std::move(e));
    }
    add("equilibria.csv", w);
    results()["equilibria"] = std::move(list);
  }

  void operator()(const SweepConfig& c) {
    const Parameters& p = cfg.params;
    SweepOptions so;
    so.threads = threads;
    so.localize_tol = c.localize_tol;
    so.include_infeasible = c.include_infeasible;
    const SweepResult res = sweep(p, c.parameter, c.range.lo, c.range.hi, c.n, so);

    CsvWriter br({"param", "S", "I", "P", "stable", "branch_id"});
    Json branches = Json::array();
    for (const Branch& b : res.branches) {
      for (const BranchSample& s : b.samples) {
        br.cell(s.value).cell(s.eq.point.S).cell(s.eq.point.I).cell(s.eq.point.P)
            .cell(s.report.verdict == Verdict::stable).cell(b.id);
        br.end_row();
      }
      branches.push_back({{"id", b.id}, {"kind", kind_name(b.kind)}, {"samples", b.samples.size()}});
    }

    CsvWriter ev({"kind", "label", "param", "S", "I", "P", "equilibrium", "branch_id",
                  "test_value", "first_lyapunov"});
    Json events = Json::array();
    for (const BifurcationEvent& e : res.events) {
      const double l1 = e.first_lyapunov.value_or(std::nan(""));
      ev.cell(event_name(e.kind)).cell(event_label(e.kind)).cell(e.value).cell(e.eq.point.S)
          .cell(e.eq.point.I).cell(e.eq.point.P).cell(kind_name(e.eq.kind)).cell(e.branch_id)
          .cell(e.test_value).cell(l1);
      ev.end_row();

      Json j = {{"kind", event_name(e.kind)},
                {"label", event_label(e.kind)},
                {"parameter", param_name(e.parameter)},
                {"value", e.value},
                {"equilibrium", kind_name(e.eq.kind)},
                {"point", point_json(e.eq.point)},
                {"branch_id", e.branch_id},
                {"eigenvalues", eigen_json(e.eigenvalues)},
                {"test_value", e.test_value}};
      j["first_lyapunov"] = e.first_lyapunov ? Json(*e.first_lyapunov) : Json(nullptr);
      try {
        Json t = Json::object();
        for (const auto& q : transversality_report(e, p).quantities) t[q.name] = q.value;
        j["transversality"] = std::move(t);
      } catch (const NumericalError& err) {
        j["transversality"] = nullptr;
        j["transversality_error"] = err.what();
      }
      events.push_back(std::move(j));
    }
    add("branches.csv", br);
    add("events.csv", ev);
    results()["parameter"] = param_name(res.parameter);
    results()["branches"] = std::move(branches);
    results()["events"] = std::move(events);
  }

  void operator()(const CurveConfig& c) {
    const Parameters& p = cfg.params;
    const CurveResult res = trace_curve(p, c.kind, c.p1, c.p2, c.seed, c.trace);

    CsvWriter cv({"p1", "p2", "S", "I", "P", "test", "cusp", "bt", "zh", "gh"});
    for (const CurvePoint& q : res.points) {
      cv.cell(q.p1).cell(q.p2).cell(q.x.S).cell(q.x.I).cell(q.x.P).cell(q.test).cell(q.cusp)
          .cell(q.bt).cell(q.zh).cell(q.gh);
      cv.end_row();
    }

    std::vector<std::pair<std::string, Codim2Point>> special;
    for (const Codim2Point& s : res.special) special.emplace_back("curve", s);
    if (c.boundary_zero_hopf_seed) {
      special.emplace_back("boundary", solve_zh_on_boundary(p, c.p1, c.p2, *c.boundary_zero_hopf_seed));
    }

    CsvWriter sp(concat({"kind", "source", "p1", "p2", "S", "I", "P", "feasible", "monitor"}, kEigenColumns));
    Json list = Json::array();
    for (const auto& [source, s] : special) {
      sp.cell(codim2_name(s.kind)).cell(source).cell(s.p1).cell(s.p2).cell(s.x.S).cell(s.x.I)
          .cell(s.x.P).cell(s.feasible).cell(s.monitor);
      eigen_cells(sp, s.eigenvalues);
      sp.end_row();
      list.push_back({{"kind", codim2_name(s.kind)},
                      {"source", source},
                      {param_name(c.p1), s.p1},
                      {param_name(c.p2), s.p2},
                      {"point", point_json(s.x)},
                      {"feasible", s.feasible},
                      {"monitor", s.monitor},
                      {"eigenvalues", eigen_json(s.eigenvalues)}});
    }
    add("curve.csv", cv);
    add("special_points.csv", sp);
    Json& r = results();
    r["curve"] = curve_name(res.kind);
    r["p1"] = param_name(res.p1);
    r["p2"] = param_name(res.p2);
    r["points"] = res.points.size();
    r["stop_reason"] = res.stop_reason;
    r["special_points"] = std::move(list);
  }

  void operator()(const ScanConfig& c) {
    ScanOptions so;
    so.threads = threads;
    so.tol = c.tol;
    const RegionGrid g = region_grid(cfg.params, c.L, c.r, c.nL, c.nr, c.ic, c.sim, so);
    CsvWriter w({"L", "r", "label"});
    for (std::size_t j = 0; j < g.r.size(); ++j) {
      for (std::size_t i = 0; i < g.L.size(); ++i) {
        w.cell(g.L[i]).cell(g.r[j]).cell(label_name(g.at(i, j)));
        w.end_row();
      }
    }
    add("regions.csv", w);
    Json counts = Json::object();
    for (RegionLabel l : {RegionLabel::coexistence, RegionLabel::infection_free, RegionLabel::collapse,
                          RegionLabel::undecided}) {
      counts[std::string(label_name(l))] = g.count(l);
    }
    results()["cells"] = g.labels.size();
    results()["counts"] = std::move(counts);
  }

  void operator()(const ThresholdConfig& c) {
    const Parameters& p = cfg.params;
    const auto res = critical_aggregation(p, c.tol);
    Range span{1e-6, 1.0 - 1e-6};
    if (res) span = res->feasible;
    CsvWriter w({"r", "h"});
    for (int i = 0; i < c.samples; ++i) {
      const double r = i == c.samples - 1 ? span.hi : span.lo + (span.hi - span.lo) * i / (c.samples - 1);
      w.cell(r).cell(threshold_function(r, p));
      w.end_row();
    }
    add("threshold.csv", w);
    Json& out_r = results();
    out_r["found"] = res.has_value();
    if (!res) return;
    out_r["r_star"] = res->r_star ? Json(*res->r_star) : Json(nullptr);
    out_r["value"] = res->value;
    out_r["boundary_only"] = res->boundary_only;
    out_r["feasible_interval"] = Json::array({res->feasible.lo, res->feasible.hi});
    out_r["r_feasibility_boundary"] =
        res->r_feasibility_boundary ? Json(*res->r_feasibility_boundary) : Json(nullptr);
    // infected prey dies out for r above r_star
    out_r["extinction_side"] = "above";
  }

  void operator()(const PercapitaConfig& c) {
    const Parameters& p = cfg.params;
    std::vector<std::string> header{"S"};
    for (double I : c.I_values) header.push_back("I=" + format_short(I));
    CsvWriter w(header);
    for (int k = 0; k < c.n; ++k) {
      const double S = k == c.n - 1 ? c.S.hi : c.S.lo + (c.S.hi - c.S.lo) * k / (c.n - 1);
      w.cell(S);
      for (double I : c.I_values) w.cell(per_capita_growth(S, I, p));
      w.end_row();
    }
    add("percapita.csv", w);
    results()["columns"] = header;
  }
};

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

Artifacts execute(const RunConfig& cfg, unsigned threads) {
  Artifacts a;
  a.summary = Json::object();
  a.summary["schema"] = kSummarySchema;
  a.summary["tool"] = "sip-dyn";
  a.summary["version"] = kVersion;
  a.summary["command"] = command_name(cfg.command);
  a.summary["parameters"] = params_json(cfg.params);
  a.summary["config"] = to_json(cfg);
  a.summary["results"] = Json::object();
  std::visit(Executor{cfg, threads, a}, cfg.options);
  Json files = Json::array();
  for (const auto& f : a.files) files.push_back(f.first);
  a.summary["files"] = std::move(files);
  return a;
}

void write_artifacts(const Artifacts& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&dir](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  };
  for (const auto& [name, text] : a.files) put(name, text);
  put("summary.json", a.summary.dump(2) + "\n");
}

unsigned resolve_threads(std::optional<int> flag, const char* env) {
  if (flag) {
    if (*flag < 1) throw ValidationError("--threads must be positive");
    return static_cast<unsigned>(*flag);
  }
  if (env && *env) {
    const std::string_view s(env);
    int n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n < 1) {
      throw ValidationError("SIP_DYN_THREADS must be a positive integer, got '" + std::string(s) + "'");
    }
    return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Susceptible/infected prey and predator dynamics", "sip-dyn"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string command, config, outdir;
  std::optional<int> threads;
  std::vector<std::string> names;
  for (int i = 0; i <= static_cast<int>(Command::percapita); ++i) {
    names.emplace_back(command_name(static_cast<Command>(i)));
  }
  app.add_option("command", command, "Analysis to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config, "JSON config file")->required();
  app.add_option("--out", outdir, "Output directory")->required();
  app.add_option("--threads", threads, "Worker threads (default: SIP_DYN_THREADS, then all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "sip-dyn: error: " << one_line(e.what()) << '\n';
    return 1;
  }

  try {
    const unsigned n = resolve_threads(threads, std::getenv("SIP_DYN_THREADS"));
    const RunConfig cfg = load_config(config, parse_command(command));
    const Artifacts a = execute(cfg, n);
    try {
      write_artifacts(a, outdir);
    } catch (const std::exception& e) {
      err << "sip-dyn: error: " << one_line(e.what()) << '\n';
      return 1;
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "sip-dyn: invalid input: " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "sip-dyn: numerical failure: " << one_line(e.what()) << '\n';
    return 2;
  }
}

}  // namespace sipdyn::cli
