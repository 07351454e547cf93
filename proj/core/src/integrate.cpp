#include "sipdyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Hairer's dense output
constexpr double dd1 = -12715105075.0 / 11282082432, dd3 = 87487479700.0 / 32700410799,
                 dd4 = -10690763975.0 / 1880347072, dd5 = 701980252875.0 / 199316789632,
                 dd6 = -1453857185.0 / 822651844, dd7 = 69997945.0 / 29380423;

constexpr double kEventTimeTol = 1e-7;

Vec3 field(const Vec3& y, const Parameters& p) {
  return rhs(Vec3{std::max(y[0], 0.0), std::max(y[1], 0.0), std::max(y[2], 0.0)}, p);
}

Vec3 axpy(const Vec3& y, double h, std::initializer_list<std::pair<double, const Vec3*>> terms) {
  Vec3 out = y;
  for (const auto& [c, k] : terms) {
    for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

double inf_norm(const Vec3& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

struct Dense {
  Vec3 y0, r2, r3, r4, r5;

  Vec3 at(double th) const {
    Vec3 out{};
    for (int i = 0; i < 3; ++i) {
      out[i] = y0[i] + th * (r2[i] + (1 - th) * (r3[i] + th * (r4[i] + (1 - th) * r5[i])));
    }
    return out;
  }
};

}  // namespace

void validate(const SimOptions& o) {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("simulation option ") + name + " must be positive");
    }
  };
  pos(o.t_end, "t_end");
  pos(o.rel_tol, "rel_tol");
  pos(o.abs_tol, "abs_tol");
  pos(o.extinction_threshold, "extinction_threshold");
  pos(o.convergence_window, "convergence_window");
  pos(o.convergence_tol, "convergence_tol");
  pos(o.min_step, "min_step");
  pos(o.max_step, "max_step");
  pos(o.initial_step, "initial_step");
  if (o.extinction_threshold < o.abs_tol) {
    throw ValidationError("extinction_threshold must be at least abs_tol");
  }
}

std::string_view component_name(Component c) noexcept {
  switch (c) {
    case Component::S: return "S";
    case Component::I: return "I";
    case Component::P: break;
  }
  return "P";
}

std::string_view termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::t_end: return "t_end";
    case Termination::all_extinct: return "all_extinct";
    case Termination::converged: break;
  }
  return "converged";
}

std::string_view outcome_name(OutcomeKind k) noexcept {
  switch (k) {
    case OutcomeKind::converged: return "converged";
    case OutcomeKind::oscillatory: return "oscillatory";
    case OutcomeKind::collapsed: return "collapsed";
    case OutcomeKind::undecided: break;
  }
  return "undecided";
}

bool Trajectory::has_event(Component c) const noexcept { return event_time(c).has_value(); }

std::optional<double> Trajectory::event_time(Component c) const noexcept {
  for (const auto& e : events) {
    if (e.component == c) return e.time;
  }
  return std::nullopt;
}

Trajectory simulate(const Parameters& p, const State& ic, const SimOptions& opts) {
  validate(opts);
  for (int i = 0; i < 3; ++i) {
    if (!(ic[i] >= 0.0) || !std::isfinite(ic[i])) {
      throw ValidationError("initial condition must be finite and nonnegative");
    }
  }
  const double eps = opts.extinction_threshold;
  Trajectory traj;
  traj.extinction_threshold = eps;

  double t = 0.0;
  Vec3 y = ic.vec();
  std::array<bool, 3> dead{};
  for (int i = 0; i < 3; ++i) {
    if (y[i] < eps) {
      if (y[i] > 0.0) traj.events.push_back({static_cast<Component>(i), t});
      y[i] = 0.0;
      dead[i] = true;
    }
  }
  traj.samples.push_back({t, State::from(y)});

  auto all_dead = [&dead] { return dead[0] && dead[1] && dead[2]; };
  auto finish_extinct = [&] {
    if (t < opts.t_end) traj.samples.push_back({opts.t_end, State{}});
    traj.reason = Termination::all_extinct;
    return traj;
  };
  if (all_dead()) return finish_extinct();

  Vec3 k1 = field(y, p);
  double h = std::min(opts.initial_step, opts.max_step);
  double calm_since = -1.0;

  while (t < opts.t_end) {
    const double remaining = opts.t_end - t;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    h = std::min(h, opts.max_step);
    if (h < opts.min_step && !last) throw StepUnderflowError(t, h);

    const Vec3 k2 = field(axpy(y, h, {{a21, &k1}}), p);
    const Vec3 k3 = field(axpy(y, h, {{a31, &k1}, {a32, &k2}}), p);
    const Vec3 k4 = field(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), p);
    const Vec3 k5 = field(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), p);
    const Vec3 k6 =
        field(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), p);
    const Vec3 y1 = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec3 k7 = field(y1, p);

    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / 3.0);
    if (!std::isfinite(err)) err = 1e10;

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < opts.min_step) throw StepUnderflowError(t, h);
      continue;
    }

    const double grow = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);

    int first = -1;
    double first_th = 2.0;
    Dense dense{};
    bool have_dense = false;
    for (int i = 0; i < 3; ++i) {
      if (dead[i] || y1[i] >= eps) continue;
      if (!have_dense) {
        have_dense = true;
        Vec3 r2{}, r3{}, r4{}, r5{};
        for (int j = 0; j < 3; ++j) {
          r2[j] = y1[j] - y[j];
          r3[j] = h * k1[j] - r2[j];
          r4[j] = r2[j] - h * k7[j] - r3[j];
          r5[j] = h * (dd1 * k1[j] + dd3 * k3[j] + dd4 * k4[j] + dd5 * k5[j] + dd6 * k6[j] +
                       dd7 * k7[j]);
        }
        dense = Dense{y, r2, r3, r4, r5};
      }
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * h > kEventTimeTol) {
        const double mid = 0.5 * (lo + hi);
        if (dense.at(mid)[i] < eps) hi = mid; else lo = mid;
      }
      if (hi < first_th) {
        first_th = hi;
        first = i;
      }
    }

    if (first >= 0) {
      Vec3 ys = dense.at(first_th);
      t += first_th * h;
      for (int i = 0; i < 3; ++i) {
        if (dead[i]) {
          ys[i] = 0.0;
        } else if (i == first || ys[i] < eps) {
          ys[i] = 0.0;
          dead[i] = true;
          traj.events.push_back({static_cast<Component>(i), t});
        }
      }
      y = ys;
      k1 = field(y, p);
      traj.samples.push_back({t, State::from(y)});
      if (all_dead()) return finish_extinct();
    } else {
      t = last ? opts.t_end : t + h;
      y = y1;
      for (int i = 0; i < 3; ++i) {
        if (dead[i]) y[i] = 0.0;
      }
      k1 = k7;
      traj.samples.push_back({t, State::from(y)});
    }
    h *= grow;

    if (opts.stop_on_convergence) {
      if (inf_norm(k1) < opts.convergence_tol) {
        if (calm_since < 0.0) calm_since = t;
        if (t - calm_since >= opts.convergence_window) {
          traj.reason = Termination::converged;
          return traj;
        }
      } else {
        calm_since = -1.0;
      }
    }
  }
  traj.reason = Termination::t_end;
  return traj;
}

Outcome asymptotic_state(const Trajectory& traj, const std::vector<Equilibrium>& eqs, double tol,
                         double window_fraction) {
  Outcome out;
  if (traj.samples.empty()) return out;
  const double eps = traj.extinction_threshold;
  const State& last = traj.final_state();
  if (last.S < eps && last.I < eps && last.P < eps) {
    out.kind = OutcomeKind::collapsed;
    return out;
  }
  const double t0 = traj.samples.front().t;
  const double t1 = traj.samples.back().t;
  const double tw = t1 - window_fraction * (t1 - t0);
  auto first = std::lower_bound(traj.samples.begin(), traj.samples.end(), tw,
                                [](const Sample& s, double t) { return s.t < t; });
  if (first == traj.samples.end()) first = std::prev(traj.samples.end());
  const std::vector<Sample> window(first, traj.samples.end());

  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : eqs) {
    if (!e.feasible) continue;
    double worst = 0.0;
    for (const auto& s : window) {
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(s.x[i] - e.point[i]));
    }
    if (worst < best) {
      best = worst;
      out.equilibrium = e.kind;
    }
  }
  if (best <= tol) {
    out.kind = OutcomeKind::converged;
    out.distance = best;
    return out;
  }
  out.equilibrium.reset();

  auto amplitude = [](auto b, auto e) {
    double amp = 0.0;
    if (b == e) return amp;
    for (int i = 0; i < 3; ++i) {
      auto [lo, hi] = std::minmax_element(b, e, [i](const Sample& x, const Sample& y) {
        return x.x[i] < y.x[i];
      });
      amp = std::max(amp, hi->x[i] - lo->x[i]);
    }
    return amp;
  };
  const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
  out.amplitude = amplitude(window.begin(), window.end());
  const double early = amplitude(window.begin(), mid);
  const double late = amplitude(mid, window.end());
  if (std::isfinite(out.amplitude) && out.amplitude > 10.0 * tol && late >= 0.8 * early) {
    out.kind = OutcomeKind::oscillatory;
  }
  return out;
}

}  // namespace sipdyn
