#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sipdyn/codim1.hpp"
#include "sipdyn/codim2.hpp"
#include "sipdyn/equilibria.hpp"
#include "sipdyn/integrate.hpp"
#include "sipdyn/scan.hpp"
#include "support/oracles.hpp"
#include "support/properties.hpp"

using namespace sipdyn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (!failed_.empty()) failed_ += "; ";
    failed_ += what;
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += s;
  }
  bool pass() const { return pass_; }
  std::string detail() const {
    if (pass_) return notes_;
    return notes_.empty() ? failed_ : failed_ + " | " + notes_;
  }

 private:
  bool pass_ = true;
  std::string failed_, notes_;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool near(const State& x, const State& want, double tol) {
  return std::abs(x.S - want.S) < tol && std::abs(x.I - want.I) < tol &&
         std::abs(x.P - want.P) < tol;
}

std::string str(const State& x) {
  std::ostringstream s;
  s << "(" << x.S << ", " << x.I << ", " << x.P << ")";
  return s.str();
}

const BifurcationEvent* nearest(const SweepResult& s, EventKind k, double v) {
  const BifurcationEvent* best = nullptr;
  for (const auto& e : s.events) {
    if (e.kind != k) continue;
    if (!best || std::abs(e.value - v) < std::abs(best->value - v)) best = &e;
  }
  return best;
}

const Codim2Point* nearest(const CurveResult& c, Codim2Kind k, double p1, double p2) {
  const Codim2Point* best = nullptr;
  for (const auto& s : c.special) {
    if (s.kind != k) continue;
    if (!best || std::hypot(s.p1 - p1, s.p2 - p2) < std::hypot(best->p1 - p1, best->p2 - p2)) best = &s;
  }
  return best;
}

std::vector<double> magnitudes(const EigenTriple& e) {
  std::vector<double> m;
  for (const cplx& v : e) m.push_back(std::abs(v));
  std::sort(m.begin(), m.end());
  return m;
}

SweepResult L_sweep() { return sweep(Parameters{}, ParamId::L, -0.6, 0.6, 1201); }
SweepResult r_sweep() { return sweep(Parameters{}, ParamId::r, 0.3, 0.95, 651); }

void criterion1(Check& c) {
  const auto t0 = Clock::now();
  const auto a = interior_equilibria(Parameters{}.with(ParamId::L, -0.5));
  const auto b = interior_equilibria(Parameters{}.with(ParamId::L, -0.1));
  const double t = seconds_since(t0);
  c.expect(a.size() == 1, "L=-0.5: " + std::to_string(a.size()) + " interior equilibria");
  if (a.size() == 1) c.expect(near(a[0].point, {2.6134, 0.7875, 2.7887}, 1e-3), "L=-0.5 at " + str(a[0].point));
  c.expect(b.size() == 2, "L=-0.1: " + std::to_string(b.size()) + " interior equilibria");
  if (b.size() == 2) {
    const State hi = {2.4296, 0.8310, 2.5524}, lo = {0.9578, 1.2660, 0.6600};
    const bool ok = (near(b[0].point, hi, 1e-3) && near(b[1].point, lo, 1e-3)) ||
                    (near(b[0].point, lo, 1e-3) && near(b[1].point, hi, 1e-3));
    c.expect(ok, "L=-0.1 at " + str(b[0].point) + " " + str(b[1].point));
  }
  c.expect(t < 1.0, fmt("runtime %.3g s", t));
  c.note(fmt("%.3g s", t));
}

void criterion2(Check& c) {
  auto t0 = Clock::now();
  const SweepResult s = L_sweep();
  const double tL = seconds_since(t0);
  t0 = Clock::now();
  const SweepResult sr = r_sweep();
  const double tr = seconds_since(t0);

  const auto* sn = nearest(s, EventKind::saddle_node, 0.2396);
  c.expect(sn && std::abs(sn->value - 0.2396) < 0.005, "SN missing or misplaced");
  if (sn) {
    c.expect(near(sn->eq.point, {1.8642, 0.9760, 1.8254}, 1e-2), "SN at " + str(sn->eq.point));
    c.note(fmt("SN L=%.6g", sn->value));
  }
  const auto* h = nearest(s, EventKind::hopf, 0.2184);
  c.expect(h && std::abs(h->value - 0.2184) < 0.005, "H missing or misplaced");
  if (h) {
    c.expect(near(h->eq.point, {1.6746, 1.0295, 1.5817}, 1e-2), "H at " + str(h->eq.point));
    c.note(fmt("H L=%.6g", h->value));
  }
  const auto* tc = nearest(s, EventKind::transcritical, -0.4312);
  c.expect(tc && std::abs(tc->value + 0.4312) < 0.005, "TC in L missing or misplaced");
  if (tc) {
    c.expect(near(tc->eq.point, {0.4444, 1.5, 0.0}, 1e-3), "TC at " + str(tc->eq.point));
    c.note(fmt("TC L=%.6g", tc->value));
  }
  const auto* tcr = nearest(sr, EventKind::transcritical, 0.7641);
  c.expect(tcr && std::abs(tcr->value - 0.7641) < 0.005, "TC in r missing or misplaced");
  if (tcr) c.note(fmt("TC r=%.6g", tcr->value));
  c.expect(tL < 10.0 && tr < 10.0, "sweep runtime");
  c.note(fmt("L-sweep %.3g s", tL) + fmt(", r-sweep %.3g s", tr));
}

void criterion3(Check& c) {
  const SweepResult s = L_sweep();
  const auto* h = nearest(s, EventKind::hopf, 0.2184);
  if (!h) {
    c.expect(false, "no Hopf point");
    return;
  }
  const Parameters p = Parameters{}.with(ParamId::L, h->value);
  const double l1 = first_lyapunov(h->eq.point, p);
  c.expect(l1 > 0.0, "l1 is not positive");
  c.note(fmt("l1 = %.6g", l1) + fmt(" at L = %.6g", h->value));
}

void criterion4(Check& c) {
  auto t0 = Clock::now();
  const Codim2Point z = solve_zh_on_boundary(Parameters{}, ParamId::L, ParamId::a0, {-1.5, 1.3});
  c.expect(std::abs(z.p1 + 1.6111) < 0.02 && std::abs(z.p2 - 1.2780) < 0.02,
           fmt("ZH at L=%.5g", z.p1) + fmt(", a0=%.5g", z.p2));
  const EigenTriple ev = eig3(jacobian(z.x, Parameters{}.with(ParamId::L, z.p1).with(ParamId::a0, z.p2)));
  int zero = 0, pair = 0;
  for (const cplx& v : ev) {
    if (std::abs(v) < 1e-3) ++zero;
    else if (std::abs(v.real()) < 1e-3 && std::abs(std::abs(v.imag()) - 0.9665) < 0.01) ++pair;
  }
  c.expect(zero == 1 && pair == 2, "ZH eigenvalues");
  c.note(fmt("ZH (%.5g", z.p1) + fmt(", %.5g)", z.p2));

  TraceOptions o;
  o.steps = 600;
  t0 = Clock::now();
  const CurveResult hc = trace_curve(Parameters{}, CurveKind::hopf, ParamId::L, ParamId::a0, {0.2184, 3.0}, o);
  const double th = seconds_since(t0);
  const auto* gh = nearest(hc, Codim2Kind::generalized_hopf, -1.6507, 1.2485);
  c.expect(gh && std::abs(gh->p1 + 1.6507) < 0.05 && std::abs(gh->p2 - 1.2485) < 0.05, "GH missing or misplaced");
  if (gh) c.note(fmt("GH (%.5g", gh->p1) + fmt(", %.5g)", gh->p2));

  t0 = Clock::now();
  const CurveResult fc = trace_curve(Parameters{}, CurveKind::fold, ParamId::L, ParamId::e0, {0.2396, 0.9}, o);
  const double tf = seconds_since(t0);
  const auto* cp = nearest(fc, Codim2Kind::cusp, 2.5747, 0.1349);
  c.expect(cp && std::abs(cp->p1 - 2.5747) < 0.05 && std::abs(cp->p2 - 0.1349) < 0.05, "CP missing or misplaced");
  if (cp) c.note(fmt("CP (%.5g", cp->p1) + fmt(", %.5g)", cp->p2));
  const auto* bt = nearest(fc, Codim2Kind::bogdanov_takens, 4.4253, 0.1704);
  c.expect(bt && std::abs(bt->p1 - 4.4253) < 0.05 && std::abs(bt->p2 - 0.1704) < 0.05, "BT missing or misplaced");
  if (bt) {
    const auto m = magnitudes(bt->eigenvalues);
    c.expect(m[0] < 1e-3 && m[1] < 1e-3, "BT eigenvalues");
    c.note(fmt("BT (%.5g", bt->p1) + fmt(", %.5g)", bt->p2));
  }
  c.expect(th < 60.0 && tf < 60.0, "curve runtime");
  c.note(fmt("Hopf curve %.3g s", th) + fmt(", fold curve %.3g s", tf));
}

void criterion5(Check& c) {
  SimOptions o;
  o.t_end = 500;
  o.stop_on_convergence = false;
  auto t0 = Clock::now();
  const Trajectory a = simulate(Parameters{}, {2, 1, 3}, o);
  const double ta = seconds_since(t0);
  c.expect(near(a.final_state(), {2.61341, 0.787546, 2.78867}, 1e-2), "r=0.5 ends at " + str(a.final_state()));
  t0 = Clock::now();
  const Trajectory b = simulate(Parameters{}.with(ParamId::r, 0.8), {2, 1, 3}, o);
  const double tb = seconds_since(t0);
  const State x = b.final_state();
  c.expect(b.samples.back().t == 500.0, "r=0.8 did not reach t=500");
  c.expect(x.I < 1e-6, fmt("I(500) = %.3g", x.I));
  c.expect(std::abs(x.S - 3.4077) < 1e-2 && std::abs(x.P - 5.5457) < 1e-2, "r=0.8 ends at " + str(x));
  c.expect(ta < 2.0 && tb < 2.0, "run time");
  c.note(fmt("%.3g s", ta) + fmt(", %.3g s", tb));
}

void criterion6(Check& c) {
  const State ic{1, 1, 0.52};
  const Parameters a = oracle::fig7(-0.8);
  const Trajectory ta = simulate(a, ic);
  const Outcome oa = asymptotic_state(ta, all_equilibria(a), 1e-3);
  c.expect(oa.kind == OutcomeKind::converged, "L=-0.8 outcome " + std::string(outcome_name(oa.kind)));
  c.expect(near(ta.final_state(), {1.06, 0.494, 0.792}, 1e-2), "L=-0.8 ends at " + str(ta.final_state()));

  const Parameters b = oracle::fig7(0.0);
  const Outcome ob = asymptotic_state(simulate(b, ic), all_equilibria(b), 1e-3);
  c.expect(ob.kind == OutcomeKind::oscillatory || ob.kind == OutcomeKind::undecided,
           "L=0 outcome " + std::string(outcome_name(ob.kind)));
  c.note("L=0 " + std::string(outcome_name(ob.kind)));

  const Parameters p = oracle::fig7(0.1);
  const Trajectory tc = simulate(p, ic);
  const auto tS = tc.event_time(Component::S);
  c.expect(tS && std::abs(*tS - 6.2) <= 0.5, "S extinction time");
  if (tS) c.note(fmt("S extinct at t=%.4g", *tS));
  State x100 = tc.final_state();
  for (const Sample& s : tc.samples) {
    if (s.t >= 100) {
      x100 = s.x;
      break;
    }
  }
  c.expect(x100.I < 1e-4 && x100.P < 1e-4, "I, P at t=100: " + str(x100));

  const Trajectory td = simulate(p, {0.05, 1, 0.52});
  c.expect(td.event_time(Component::S).has_value(), "S(0)=0.05 gives no S extinction");
}

void criterion7(Check& c) {
  const auto res = critical_aggregation(Parameters{});
  if (!res || !res->r_star) {
    c.expect(false, "no threshold found");
    return;
  }
  const double rs = *res->r_star;
  c.expect(std::abs(rs - 0.7641) < 0.01, fmt("r* = %.6g", rs));
  c.note(fmt("r* = %.8g", rs));
  const auto* tc = nearest(r_sweep(), EventKind::transcritical, rs);
  c.expect(tc && std::abs(tc->value - rs) < 1e-3, "r-sweep TC disagrees");
  SimOptions o;
  o.t_end = 500;
  o.stop_on_convergence = false;
  const State below = simulate(Parameters{}.with(ParamId::r, rs - 0.05), {2, 1, 3}, o).final_state();
  const State above = simulate(Parameters{}.with(ParamId::r, rs + 0.05), {2, 1, 3}, o).final_state();
  c.expect(below.I > 1e-3, fmt("I below r* = %.3g", below.I));
  c.expect(above.I < 1e-6, fmt("I above r* = %.3g", above.I));
  c.note(fmt("I(500) below %.4g", below.I) + fmt(", above %.3g", above.I));
}

void criterion8(Check& c) {
  ScanOptions s;
  s.threads = 4;
  const State ic{2, 1, 3};
  const auto t0 = Clock::now();
  const RegionGrid g = region_grid(Parameters{}, {-1, 1}, {0.05, 0.95}, 61, 61, ic, SimOptions{}, s);
  const double t = seconds_since(t0);
  auto cell = [&g](double L, double r) {
    std::size_t i = 0, j = 0;
    for (std::size_t k = 0; k < g.L.size(); ++k)
      if (std::abs(g.L[k] - L) < std::abs(g.L[i] - L)) i = k;
    for (std::size_t k = 0; k < g.r.size(); ++k)
      if (std::abs(g.r[k] - r) < std::abs(g.r[j] - r)) j = k;
    return g.at(i, j);
  };
  for (RegionLabel l : {RegionLabel::coexistence, RegionLabel::infection_free, RegionLabel::collapse})
    c.expect(g.count(l) > 0, "no " + std::string(label_name(l)) + " cells");
  c.expect(cell(-0.5, 0.5) == RegionLabel::coexistence, "(-0.5, 0.5) is " + std::string(label_name(cell(-0.5, 0.5))));
  c.expect(cell(-0.5, 0.8) == RegionLabel::infection_free, "(-0.5, 0.8) is " + std::string(label_name(cell(-0.5, 0.8))));
  c.expect(cell(0.9, 0.5) == RegionLabel::collapse, "(0.9, 0.5) is " + std::string(label_name(cell(0.9, 0.5))));
  const CellResult own = classify_cell(Parameters{}.with(ParamId::L, 0.9), ic, SimOptions{});
  c.expect(own.label == RegionLabel::collapse && own.s_extinct_time.has_value(), "collapse cell has no S extinction");
  const double undecided = static_cast<double>(g.count(RegionLabel::undecided)) / g.labels.size();
  c.expect(undecided <= 0.02, fmt("%.3g%% undecided", 100 * undecided));
  c.expect(t < 300.0, "grid runtime");
  c.note(fmt("%.0f coexistence", g.count(RegionLabel::coexistence)) +
         fmt(", %.0f infection_free", g.count(RegionLabel::infection_free)) +
         fmt(", %.0f collapse", g.count(RegionLabel::collapse)) +
         fmt(", %.0f undecided", g.count(RegionLabel::undecided)) + fmt(", %.3g s", t));
}

void criterion9(Check& c) {
  auto sub = [&c](const char* tag, const props::Result& r) {
    c.expect(r.ok(), std::string(tag) + " " + r.first_failure);
    std::printf("  9%s %s %d/%d%s%s\n", tag, r.ok() ? "PASS" : "FAIL", r.cases - r.failures, r.cases,
                r.ok() ? "" : ": ", r.first_failure.c_str());
  };
  sub("(a)", props::nonnegativity(100));
  sub("(b)", props::boundedness(100));
  sub("(c)", props::jacobian_fd(100));
  sub("(d)", props::equilibrium_residuals(100));
  sub("(e)", props::routh_hurwitz_agreement(1000));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void(Check&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 9; ++i) which.push_back(i);

  int failed = 0;
  for (int n : which) {
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "acceptance: no criterion %d\n", n);
      return 2;
    }
    Check c;
    try {
      criteria[n - 1](c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s\n", n, c.pass() ? "PASS" : "FAIL", c.detail().c_str());
    std::fflush(stdout);
    if (!c.pass()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
