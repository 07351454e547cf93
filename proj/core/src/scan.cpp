#include "sipdyn/scan.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "sipdyn/equilibria.hpp"
#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

std::vector<double> axis(Range r, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? r.lo : (i == n - 1 ? r.hi : r.lo + (r.hi - r.lo) * i / (n - 1));
  }
  return v;
}

double p3_of(double r, const Parameters& p) {
  const double v = infection_free_P(p.with(ParamId::r, r));
  return std::isfinite(v) ? v : -1.0;
}

}  // namespace

std::string_view label_name(RegionLabel l) noexcept {
  switch (l) {
    case RegionLabel::coexistence: return "coexistence";
    case RegionLabel::infection_free: return "infection_free";
    case RegionLabel::collapse: return "collapse";
    case RegionLabel::undecided: break;
  }
  return "undecided";
}

std::size_t RegionGrid::count(RegionLabel l) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

CellResult classify_cell(const Parameters& p, const State& ic, const SimOptions& opts,
                         double tol) {
  const Trajectory traj = simulate(p, ic, opts);
  CellResult cell;
  cell.outcome = asymptotic_state(traj, all_equilibria(p), tol);
  cell.s_extinct_time = traj.event_time(Component::S);
  const double eps = traj.extinction_threshold;

  if (cell.s_extinct_time && cell.outcome.kind == OutcomeKind::collapsed) {
    cell.label = RegionLabel::collapse;
    return cell;
  }
  if (cell.outcome.kind == OutcomeKind::converged &&
      cell.outcome.equilibrium == EquilibriumKind::E4) {
    const State& x = traj.final_state();
    if (x.S > eps && x.I > eps && x.P > eps) {
      cell.label = RegionLabel::coexistence;
      return cell;
    }
  }
  // infection gone, susceptibles and predators persist over the final window
  const double t1 = traj.samples.back().t;
  const double tw = t1 - 0.2 * (t1 - traj.samples.front().t);
  bool free = true;
  for (auto it = traj.samples.rbegin(); it != traj.samples.rend() && it->t >= tw; ++it) {
    if (!(it->x.I < eps && it->x.S > tol && it->x.P > tol)) {
      free = false;
      break;
    }
  }
  cell.label = free ? RegionLabel::infection_free : RegionLabel::undecided;
  return cell;
}

RegionGrid region_grid(const Parameters& p, Range L, Range r, int nL, int nr, const State& ic,
                       const SimOptions& opts, const ScanOptions& scan) {
  if (nL < 1 || nr < 1) throw ValidationError("grid counts must be positive");
  if (!(L.lo <= L.hi) || !(r.lo <= r.hi)) throw ValidationError("grid ranges must be increasing");
  if ((nL > 1 && !(L.lo < L.hi)) || (nr > 1 && !(r.lo < r.hi))) {
    throw ValidationError("grid axes must be strictly increasing");
  }
  for (double l : {L.lo, L.hi}) {
    for (double rr : {r.lo, r.hi}) validate(p.with(ParamId::L, l).with(ParamId::r, rr));
  }
  validate(opts);

  RegionGrid grid;
  grid.L = axis(L, nL);
  grid.r = axis(r, nr);
  grid.ic = ic;
  grid.t_end = opts.t_end;
  grid.labels.assign(grid.L.size() * grid.r.size(), RegionLabel::undecided);
  detail::parallel_for(grid.labels.size(), scan.threads, [&](std::size_t k) {
    const std::size_t i = k % grid.L.size(), j = k / grid.L.size();
    const Parameters q = p.with(ParamId::L, grid.L[i]).with(ParamId::r, grid.r[j]);
    grid.labels[k] = classify_cell(q, ic, opts, scan.tol).label;
  });
  return grid;
}

double threshold_function(double r, const Parameters& p) noexcept {
  const Parameters q = p.with(ParamId::r, r);
  return q.e0 * infection_free_S(q) - q.d1 * infection_free_P(q) - q.a1;
}

std::optional<ThresholdResult> critical_aggregation(const Parameters& p, double tol) {
  constexpr int n = 2001;
  constexpr double edge = 1e-6;
  std::vector<double> rs(n);
  for (int i = 0; i < n; ++i) rs[i] = edge + (1.0 - 2 * edge) * i / (n - 1);

  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    const bool ok = p3_of(rs[i], p) > 0.0;
    if (ok && first < 0) first = i;
    if (ok) last = i;
    if (!ok && first >= 0) break;
  }
  if (first < 0) return std::nullopt;

  auto p3 = [&p](double r) { return p3_of(r, p); };
  ThresholdResult res;
  res.feasible.lo = first == 0 ? rs[0] : bisect(p3, rs[first - 1], rs[first], tol);
  res.feasible.hi = last == n - 1 ? rs[n - 1] : bisect(p3, rs[last], rs[last + 1], tol);
  if (p.a2 / p.d2 > 1.0 && p.K > 1.0) res.r_feasibility_boundary = std::log(p.a2 / p.d2) / std::log(p.K);

  const double span = res.feasible.hi - res.feasible.lo;
  const double a = res.feasible.lo + 1e-9 * span, b = res.feasible.hi - 1e-9 * span;
  auto h = [&p](double r) { return threshold_function(r, p); };
  const auto roots = bracketed_roots(h, a, b, n, tol);
  if (!roots.empty()) {
    res.r_star = roots.front();
    res.value = roots.front();
    return res;
  }
  if (h(0.5 * (a + b)) < 0.0) {
    res.boundary_only = true;
    res.value = res.r_feasibility_boundary.value_or(res.feasible.lo);
    return res;
  }
  return std::nullopt;
}

}  // namespace sipdyn
