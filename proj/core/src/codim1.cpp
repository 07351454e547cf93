#include "sipdyn/codim1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

constexpr double kLinkScale = 0.25;
constexpr double kEventFeasibility = -1e-9;
constexpr double kEigenZero = 1e-6;

struct GridPoint {
  double value = 0.0;
  std::vector<Equilibrium> boundary;
  std::vector<Equilibrium> interior;
};

double state_distance(const State& a, const State& b) {
  return std::max({std::abs(a.S - b.S), std::abs(a.I - b.I), std::abs(a.P - b.P)});
}

double state_scale(const State& a) {
  return std::max({std::abs(a.S), std::abs(a.I), std::abs(a.P)});
}

bool usable(const Equilibrium& e) {
  return e.point.S > 0.0 && std::isfinite(e.point.S) && std::isfinite(e.point.I) &&
         std::isfinite(e.point.P);
}

bool event_feasible(const State& x) {
  return x.S > 0.0 && x.I >= kEventFeasibility && x.P >= kEventFeasibility;
}

std::optional<BranchSample> sample_at(EquilibriumKind kind, const State& guess, ParamId which,
                                      double v, const Parameters& base) {
  const Parameters p = base.with(which, v);
  auto eq = locate(kind, guess, p);
  if (!eq || !usable(*eq)) return std::nullopt;
  return BranchSample{v, *eq, analyze(*eq, p)};
}

double fold_test(const BranchSample& s) { return s.report.coefficients.omega3; }
double hopf_test(const BranchSample& s) { return hopf_margin(s.report.coefficients); }

// Bisection on a test function along one branch between two samples.
std::optional<BranchSample> localize_on_branch(const Branch& br, const BranchSample& a,
                                               const BranchSample& b, double (*test)(const BranchSample&),
                                               const Parameters& base, double tol) {
  BranchSample lo = a, hi = b;
  double flo = test(lo);
  while (std::abs(hi.value - lo.value) > tol) {
    const double v = 0.5 * (lo.value + hi.value);
    const double w = (v - lo.value) / (hi.value - lo.value);
    const State guess{lo.eq.point.S + w * (hi.eq.point.S - lo.eq.point.S),
                      lo.eq.point.I + w * (hi.eq.point.I - lo.eq.point.I),
                      lo.eq.point.P + w * (hi.eq.point.P - lo.eq.point.P)};
    auto mid = sample_at(br.kind, guess, br.parameter, v, base);
    if (!mid) return std::nullopt;
    const double fm = test(*mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = *mid;
      flo = fm;
    } else {
      hi = *mid;
    }
  }
  return std::abs(test(lo)) < std::abs(test(hi)) ? lo : hi;
}

BifurcationEvent make_event(EventKind kind, const Branch& br, const BranchSample& s) {
  BifurcationEvent ev;
  ev.kind = kind;
  ev.parameter = br.parameter;
  ev.value = s.value;
  ev.eq = s.eq;
  ev.branch_id = br.id;
  ev.eigenvalues = s.report.eigenvalues;
  ev.coefficients = s.report.coefficients;
  ev.test_value = kind == EventKind::hopf ? hopf_test(s) : fold_test(s);
  return ev;
}

bool has_zero_real_eigenvalue(const EigenTriple& ev) {
  return std::any_of(ev.begin(), ev.end(), [](const cplx& l) {
    return l.imag() == 0.0 && std::abs(l.real()) < kEigenZero;
  });
}

bool has_imaginary_pair(const EigenTriple& ev) {
  return std::any_of(ev.begin(), ev.end(), [](const cplx& l) {
    return l.imag() > 1e-4 && std::abs(l.real()) < kEigenZero;
  });
}

// Two interior roots merging: Newton on {g(S; v) = 0, Omega3 = 0}.
std::optional<BranchSample> localize_fold(const Parameters& base, ParamId which, double S0,
                                          double v0, double vlo, double vhi) {
  auto eval = [&](double S, double v) -> std::optional<std::array<double, 2>> {
    if (!(S > 0.0)) return std::nullopt;
    const Parameters p = base.with(which, v);
    const State x = interior_point(S, p);
    if (!(x.S > 0.0)) return std::nullopt;
    return std::array<double, 2>{interior_residual(S, p), char_coeffs(jacobian(x, p)).omega3};
  };
  double S = S0, v = v0;
  const double span = vhi - vlo;
  for (int it = 0; it < 50; ++it) {
    auto F = eval(S, v);
    if (!F) return std::nullopt;
    const double hS = 1e-7 * (1.0 + std::abs(S));
    const double hv = 1e-7 * (1.0 + std::abs(v));
    auto FSp = eval(S + hS, v), FSm = eval(S - hS, v);
    auto Fvp = eval(S, v + hv), Fvm = eval(S, v - hv);
    if (!FSp || !FSm || !Fvp || !Fvm) return std::nullopt;
    std::array<std::array<double, 2>, 2> A{};
    for (int i = 0; i < 2; ++i) {
      A[i][0] = ((*FSp)[i] - (*FSm)[i]) / (2 * hS);
      A[i][1] = ((*Fvp)[i] - (*Fvm)[i]) / (2 * hv);
    }
    auto d = solve<double, 2>(A, {-(*F)[0], -(*F)[1]});
    if (!d) return std::nullopt;
    double lam = 1.0;
    const double cap = 0.05 * (1.0 + std::abs(S));
    if (std::abs((*d)[0]) > cap) lam = cap / std::abs((*d)[0]);
    if (std::abs(lam * (*d)[1]) > span) lam = span / std::abs((*d)[1]);
    S += lam * (*d)[0];
    v += lam * (*d)[1];
    if (std::abs((*d)[0]) < 1e-13 * (1.0 + std::abs(S)) &&
        std::abs((*d)[1]) < 1e-13 * (1.0 + std::abs(v)))
      break;
  }
  if (v < vlo - span || v > vhi + span) return std::nullopt;
  const Parameters p = base.with(which, v);
  const State x = interior_point(S, p);
  if (std::abs(interior_residual(S, p)) > 1e-9) return std::nullopt;
  Equilibrium eq{EquilibriumKind::E4, x, x.S > 0 && x.I > 0 && x.P > 0};
  BranchSample s{v, eq, analyze(eq, p)};
  if (std::abs(s.report.coefficients.omega3) > 1e-6) return std::nullopt;
  return s;
}

// Fallback: bisection on the root count.
BranchSample localize_fold_by_count(const Parameters& base, ParamId which, double v_with,
                                    double v_without, std::size_t n_with, const State& near,
                                    double tol) {
  auto count = [&](double v) { return interior_equilibria(base.with(which, v)).size(); };
  while (std::abs(v_with - v_without) > tol) {
    const double m = 0.5 * (v_with + v_without);
    if (count(m) >= n_with) v_with = m; else v_without = m;
  }
  const Parameters p = base.with(which, v_with);
  auto eqs = interior_equilibria(p);
  // the merging pair: the two roots closest to `near`
  std::sort(eqs.begin(), eqs.end(), [&](const Equilibrium& a, const Equilibrium& b) {
    return state_distance(a.point, near) < state_distance(b.point, near);
  });
  State x = eqs.front().point;
  if (eqs.size() >= 2) {
    x = {0.5 * (eqs[0].point.S + eqs[1].point.S), 0.5 * (eqs[0].point.I + eqs[1].point.I),
         0.5 * (eqs[0].point.P + eqs[1].point.P)};
  }
  Equilibrium eq{EquilibriumKind::E4, x, true};
  return {v_with, eq, analyze(eq, p)};
}

}  // namespace

std::string_view event_name(EventKind k) noexcept {
  switch (k) {
    case EventKind::saddle_node: return "saddle_node";
    case EventKind::hopf: return "hopf";
    case EventKind::transcritical: break;
  }
  return "transcritical";
}

SweepResult sweep(const Parameters& p, ParamId which, double lo, double hi, int n,
                  const SweepOptions& opts) {
  if (!(lo < hi)) throw ValidationError("sweep range must satisfy lo < hi");
  if (n < 3) throw ValidationError("sweep needs at least 3 grid points");
  validate(p.with(which, lo));
  validate(p.with(which, hi));

  SweepResult out;
  out.parameter = which;
  out.grid.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.grid[k] = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
  }

  std::vector<GridPoint> pts(out.grid.size());
  detail::parallel_for(pts.size(), opts.threads, [&](std::size_t k) {
    const Parameters q = p.with(which, out.grid[k]);
    pts[k].value = out.grid[k];
    pts[k].boundary = boundary_equilibria(q);
    pts[k].interior = interior_equilibria(q);
  });

  // boundary branches, including infeasible stretches so exchanges of
  // stability at feasibility boundaries are visible
  int next_id = 0;
  for (EquilibriumKind kind : {EquilibriumKind::E1_K, EquilibriumKind::E1_L, EquilibriumKind::E2,
                               EquilibriumKind::E3}) {
    Branch br{next_id++, kind, which, {}};
    for (const auto& gp : pts) {
      for (const auto& e : gp.boundary) {
        if (e.kind == kind && usable(e)) {
          br.samples.push_back({gp.value, e, analyze(e, p.with(which, gp.value))});
        }
      }
    }
    out.branches.push_back(std::move(br));
  }

  // interior branches by nearest-neighbour linking
  struct Open {
    std::size_t branch;
    std::size_t last_grid;
  };
  std::vector<Open> open;
  std::vector<std::size_t> first_grid(out.branches.size(), 0), last_grid(out.branches.size(), 0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& roots = pts[k].interior;
    std::vector<bool> used_root(roots.size(), false), used_open(open.size(), false);
    struct Pair {
      double d;
      std::size_t o, r;
    };
    std::vector<Pair> pairs;
    for (std::size_t o = 0; o < open.size(); ++o) {
      const State& prev = out.branches[open[o].branch].samples.back().eq.point;
      for (std::size_t r = 0; r < roots.size(); ++r) {
        const double d = state_distance(prev, roots[r].point);
        if (d < kLinkScale * (1.0 + state_scale(prev))) pairs.push_back({d, o, r});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<Open> next;
    for (const auto& pr : pairs) {
      if (used_open[pr.o] || used_root[pr.r]) continue;
      used_open[pr.o] = used_root[pr.r] = true;
      auto& br = out.branches[open[pr.o].branch];
      br.samples.push_back(
          {pts[k].value, roots[pr.r], analyze(roots[pr.r], p.with(which, pts[k].value))});
      last_grid[open[pr.o].branch] = k;
      next.push_back({open[pr.o].branch, k});
    }
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (used_root[r]) continue;
      Branch br{next_id++, EquilibriumKind::E4, which, {}};
      br.samples.push_back(
          {pts[k].value, roots[r], analyze(roots[r], p.with(which, pts[k].value))});
      out.branches.push_back(std::move(br));
      first_grid.push_back(k);
      last_grid.push_back(k);
      next.push_back({out.branches.size() - 1, k});
    }
    open = std::move(next);
  }

  // test functions along every branch
  for (const auto& br : out.branches) {
    for (std::size_t i = 0; i + 1 < br.samples.size(); ++i) {
      const auto& a = br.samples[i];
      const auto& b = br.samples[i + 1];
      if (br.kind != EquilibriumKind::E4 && (fold_test(a) < 0.0) != (fold_test(b) < 0.0)) {
        auto s = localize_on_branch(br, a, b, fold_test, p, opts.localize_tol);
        if (s && event_feasible(s->eq.point) && has_zero_real_eigenvalue(s->report.eigenvalues)) {
          out.events.push_back(make_event(EventKind::transcritical, br, *s));
        }
      }
      const bool guard = a.report.coefficients.omega2 > 0.0 && b.report.coefficients.omega2 > 0.0;
      if (guard && (hopf_test(a) < 0.0) != (hopf_test(b) < 0.0)) {
        auto s = localize_on_branch(br, a, b, hopf_test, p, opts.localize_tol);
        if (s && event_feasible(s->eq.point) && has_imaginary_pair(s->report.eigenvalues)) {
          auto ev = make_event(EventKind::hopf, br, *s);
          try {
            ev.first_lyapunov = first_lyapunov(s->eq.point, p.with(which, s->value));
          } catch (const NumericalError&) {
          }
          out.events.push_back(std::move(ev));
        }
      }
    }
  }

  // folds: two interior branches that end (or start) between the same grid
  // points with nearby end states
  const std::size_t nb = out.branches.size();
  for (std::size_t a = 4; a < nb; ++a) {
    for (std::size_t b = a + 1; b < nb; ++b) {
      const auto& A = out.branches[a];
      const auto& B = out.branches[b];
      for (int side = 0; side < 2; ++side) {
        const bool ends = side == 0;
        const std::size_t ka = ends ? last_grid[a] : first_grid[a];
        const std::size_t kb = ends ? last_grid[b] : first_grid[b];
        if (ka != kb) continue;
        if (ends && ka + 1 >= pts.size()) continue;
        if (!ends && ka == 0) continue;
        const State& xa = ends ? A.samples.back().eq.point : A.samples.front().eq.point;
        const State& xb = ends ? B.samples.back().eq.point : B.samples.front().eq.point;
        if (state_distance(xa, xb) > kLinkScale * (1.0 + state_scale(xa))) continue;
        const double v_with = pts[ka].value;
        const double v_without = ends ? pts[ka + 1].value : pts[ka - 1].value;
        const State mid{0.5 * (xa.S + xb.S), 0.5 * (xa.I + xb.I), 0.5 * (xa.P + xb.P)};
        auto s = localize_fold(p, which, mid.S, 0.5 * (v_with + v_without),
                               std::min(v_with, v_without), std::max(v_with, v_without));
        const BranchSample fs =
            s ? *s
              : localize_fold_by_count(p, which, v_with, v_without, pts[ka].interior.size(), mid,
                                       opts.localize_tol);
        if (event_feasible(fs.eq.point)) {
          out.events.push_back(make_event(EventKind::saddle_node, A, fs));
        }
      }
    }
  }

  std::sort(out.events.begin(), out.events.end(),
            [](const BifurcationEvent& x, const BifurcationEvent& y) { return x.value < y.value; });
  std::vector<BifurcationEvent> unique;
  for (auto& ev : out.events) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const BifurcationEvent& u) {
      return u.kind == ev.kind && std::abs(u.value - ev.value) < 1e-6 &&
             state_distance(u.eq.point, ev.eq.point) < 1e-6;
    });
    if (!dup) unique.push_back(std::move(ev));
  }
  out.events = std::move(unique);

  if (!opts.include_infeasible) {
    for (auto& br : out.branches) {
      std::erase_if(br.samples, [](const BranchSample& s) { return !s.eq.feasible; });
    }
  }
  return out;
}

const TransversalityQuantity* TransversalityReport::find(std::string_view name) const noexcept {
  for (const auto& q : quantities) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

}  // namespace sipdyn
