#include "sipdyn/codim2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sipdyn/codim1.hpp"
#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

using Z = std::array<double, 5>;
using F4 = std::array<double, 4>;
using J45 = std::array<Z, 4>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFeasible = -1e-6;

template <std::size_t N>
double det(std::array<std::array<double, N>, N> A) {
  double d = 1.0;
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i) {
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    }
    if (A[piv][k] == 0.0) return 0.0;
    if (piv != k) {
      std::swap(A[piv], A[k]);
      d = -d;
    }
    d *= A[k][k];
    for (std::size_t i = k + 1; i < N; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < N; ++j) A[i][j] -= f * A[k][j];
    }
  }
  return d;
}

double znorm(const Z& z) {
  double s = 0.0;
  for (double c : z) s += c * c;
  return std::sqrt(s);
}

double zdot(const Z& a, const Z& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += a[i] * b[i];
  return s;
}

bool params_ok(const Parameters& p) {
  for (ParamId id : kAllParams) {
    const double v = p.get(id);
    if (!std::isfinite(v)) return false;
    if (id != ParamId::L && id != ParamId::r && !(v > 0.0)) return false;
  }
  return p.r > 0.0 && p.r < 1.0;
}

// Which of the two null directions of the Jacobian to follow.
struct Orientation {
  Vec3 U{}, V{};
  bool set = false;
};

class Curve {
 public:
  Curve(const Parameters& base, CurveKind kind, ParamId p1, ParamId p2)
      : base_(base), kind_(kind), p1_(p1), p2_(p2) {}

  Parameters params(const Z& z) const { return base_.with(p1_, z[3]).with(p2_, z[4]); }

  std::optional<F4> F(const Z& z) const {
    if (!(z[0] > 0.0)) return std::nullopt;
    const Parameters p = params(z);
    if (!params_ok(p)) return std::nullopt;
    const State x{z[0], z[1], z[2]};
    const Vec3 f = rhs(x, p);
    const auto c = char_coeffs(jacobian(x, p));
    const double t = kind_ == CurveKind::fold ? c.omega3 : hopf_margin(c);
    // f2 / I and f3 / P: without the trivial factors the interior locus
    // crosses the invariant planes I = 0, P = 0 without a branch point
    const double g2 = -p.a1 + p.e0 * x.S - p.d1 * x.P;
    const double g3 = -p.a2 + p.d2 * pow_r(x.S, p.r) + p.d3 * x.I;
    return F4{f[0], g2, g3, t};
  }

  std::optional<J45> jac(const Z& z) const {
    J45 J{};
    for (std::size_t j = 0; j < 5; ++j) {
      const double h = 1e-7 * (1.0 + std::abs(z[j]));
      Z zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      auto fp = F(zp), fm = F(zm);
      if (!fp || !fm) return std::nullopt;
      for (std::size_t i = 0; i < 4; ++i) J[i][j] = ((*fp)[i] - (*fm)[i]) / (2 * h);
    }
    return J;
  }

  // Kernel of the 4x5 Jacobian via signed 4x4 minors.
  static Z kernel(const J45& J) {
    Z t{};
    for (std::size_t j = 0; j < 5; ++j) {
      std::array<std::array<double, 4>, 4> M{};
      for (std::size_t i = 0; i < 4; ++i) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < 5; ++k) {
          if (k != j) M[i][c++] = J[i][k];
        }
      }
      t[j] = (j % 2 == 0 ? 1.0 : -1.0) * det(M);
    }
    const double n = znorm(t);
    for (double& c : t) c /= n;
    return t;
  }

  // Newton on {F(z) = 0, d.(z - z_pred) = 0}.
  std::optional<Z> correct(const Z& z_pred, const Z& d) const {
    Z z = z_pred;
    auto residual = [&](const Z& w) -> std::optional<double> {
      auto f = F(w);
      if (!f) return std::nullopt;
      Z diff{};
      for (std::size_t i = 0; i < 5; ++i) diff[i] = w[i] - z_pred[i];
      double r = std::abs(zdot(d, diff));
      for (double v : *f) r = std::max(r, std::abs(v));
      return r;
    };
    auto r0 = residual(z);
    if (!r0) return std::nullopt;
    for (int it = 0; it < 30; ++it) {
      auto f = F(z);
      auto J = jac(z);
      if (!f || !J) return std::nullopt;
      std::array<Z, 5> A{};
      Z b{};
      for (std::size_t i = 0; i < 4; ++i) {
        A[i] = (*J)[i];
        b[i] = -(*f)[i];
      }
      A[4] = d;
      Z diff{};
      for (std::size_t i = 0; i < 5; ++i) diff[i] = z[i] - z_pred[i];
      b[4] = -zdot(d, diff);
      auto dz = solve<double, 5>(A, b);
      if (!dz) return std::nullopt;
      double lam = 1.0;
      Z trial{};
      std::optional<double> r;
      for (int k = 0; k < 8; ++k, lam *= 0.5) {
        for (std::size_t i = 0; i < 5; ++i) trial[i] = z[i] + lam * (*dz)[i];
        r = residual(trial);
        if (r && *r < *r0 * (1.0 - 1e-4 * lam) + 1e-15) break;
      }
      if (!r) return std::nullopt;
      z = trial;
      r0 = r;
      if (lam * znorm(*dz) < 1e-12 * (1.0 + znorm(z)) || *r0 < 1e-13) {
        if (*r0 < 1e-10) return z;
      }
    }
    if (r0 && *r0 < 1e-10) return z;
    return std::nullopt;
  }

  CurvePoint evaluate(const Z& z, Orientation& o) const {
    const Parameters p = params(z);
    const State x{z[0], z[1], z[2]};
    const Matrix3 J = jacobian(x, p);
    const auto c = char_coeffs(J);
    CurvePoint cp;
    cp.p1 = z[3];
    cp.p2 = z[4];
    cp.x = x;
    cp.eigenvalues = cubic_roots(c);
    cp.zh = c.omega1;
    cp.bt = c.omega2;
    if (kind_ == CurveKind::fold) {
      cp.test = c.omega3;
      cp.gh = kNaN;
      Vec3 U = null_vector<double>(J);
      Vec3 V = null_vector<double>(transpose(J));
      const double nu = norm(U), nv = norm(V);
      if (nu > 0 && nv > 0) {
        for (double& v : U) v /= nu;
        for (double& v : V) v /= nv;
        if (o.set && dot(U, o.U) < 0) for (double& v : U) v = -v;
        if (o.set && dot(V, o.V) < 0) for (double& v : V) v = -v;
        o = {U, V, true};
        cp.cusp = dot(V, bilinear<double>(second_derivatives(x, p), U, U));
      } else {
        cp.cusp = kNaN;
      }
    } else {
      cp.test = hopf_margin(c);
      cp.cusp = kNaN;
      try {
        cp.gh = c.omega2 > 0.0 ? first_lyapunov(x, p) : kNaN;
      } catch (const Error&) {
        cp.gh = kNaN;
      }
    }
    return cp;
  }

  CurveKind kind() const { return kind_; }

 private:
  Parameters base_;
  CurveKind kind_;
  ParamId p1_, p2_;
};

Z to_z(const CurvePoint& c) { return {c.x.S, c.x.I, c.x.P, c.p1, c.p2}; }

using Monitor = double (*)(const CurvePoint&);
double m_cusp(const CurvePoint& c) { return c.cusp; }
double m_bt(const CurvePoint& c) { return c.bt; }
double m_zh(const CurvePoint& c) { return c.zh; }
double m_gh(const CurvePoint& c) { return c.gh; }

bool sign_change(double a, double b) {
  return std::isfinite(a) && std::isfinite(b) && ((a < 0.0) != (b < 0.0));
}

// Bisection (then regula falsi) along the chord between two curve points.
std::optional<CurvePoint> localize(const Curve& curve, const CurvePoint& a, const CurvePoint& b,
                                   const Orientation& at_a, Monitor m, double tol) {
  const Z za = to_z(a), zb = to_z(b);
  Z d{};
  for (std::size_t i = 0; i < 5; ++i) d[i] = zb[i] - za[i];
  const double len = znorm(d);
  if (len == 0.0) return std::nullopt;
  for (double& c : d) c /= len;

  auto at = [&](double s) -> std::optional<CurvePoint> {
    Z zp{};
    for (std::size_t i = 0; i < 5; ++i) zp[i] = za[i] + s * (zb[i] - za[i]);
    auto z = curve.correct(zp, d);
    if (!z) return std::nullopt;
    Orientation o = at_a;
    return curve.evaluate(*z, o);
  };

  double slo = 0.0, shi = 1.0;
  double mlo = m(a), mhi = m(b);
  CurvePoint best = std::abs(mlo) < std::abs(mhi) ? a : b;
  for (int it = 0; it < 200 && (shi - slo) * len > tol; ++it) {
    const double s = 0.5 * (slo + shi);
    auto c = at(s);
    if (!c || !std::isfinite(m(*c))) return std::nullopt;
    if ((m(*c) < 0.0) == (mlo < 0.0)) {
      slo = s;
      mlo = m(*c);
    } else {
      shi = s;
      mhi = m(*c);
    }
    best = *c;
  }
  for (int it = 0; it < 12 && std::abs(m(best)) > 1e-13 && mhi != mlo; ++it) {
    const double s = slo - mlo * (shi - slo) / (mhi - mlo);
    if (!(s > slo && s < shi)) break;
    auto c = at(s);
    if (!c || !std::isfinite(m(*c))) break;
    if ((m(*c) < 0.0) == (mlo < 0.0)) {
      slo = s;
      mlo = m(*c);
    } else {
      shi = s;
      mhi = m(*c);
    }
    best = *c;
  }
  return best;
}

Codim2Point make_special(Codim2Kind kind, const CurvePoint& c, double monitor) {
  Codim2Point sp;
  sp.kind = kind;
  sp.p1 = c.p1;
  sp.p2 = c.p2;
  sp.x = c.x;
  sp.eigenvalues = c.eigenvalues;
  sp.feasible = c.x.S >= kFeasible && c.x.I >= kFeasible && c.x.P >= kFeasible;
  sp.monitor = monitor;
  return sp;
}

Z seed_point(const Curve& curve, const Parameters& base, CurveKind kind, ParamId p1,
             ParamId p2, std::array<double, 2> seed, const std::optional<State>& guess) {
  const Parameters ps = base.with(p1, seed[0]).with(p2, seed[1]);
  State x0;
  if (guess) {
    x0 = *guess;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : interior_equilibria(ps)) {
      const auto c = char_coeffs(jacobian(e.point, ps));
      if (kind == CurveKind::hopf && !(c.omega2 > 0.0)) continue;
      const double t = std::abs(kind == CurveKind::fold ? c.omega3 : hopf_margin(c));
      if (t < best) {
        best = t;
        x0 = e.point;
      }
    }
    if (!std::isfinite(best)) {
      throw SeedError("no interior equilibrium near the seed to start the " +
                      std::string(curve_name(kind)) + " curve from");
    }
  }
  // p2 fixed: the arclength row pins z[4]
  Z z{x0.S, x0.I, x0.P, seed[0], seed[1]};
  const Z pin{0, 0, 0, 0, 1};
  auto zc = curve.correct(z, pin);
  if (!zc) {
    throw SeedError("seed (" + std::to_string(seed[0]) + ", " + std::to_string(seed[1]) +
                    ") does not converge onto a " + std::string(curve_name(kind)) + " point");
  }
  return *zc;
}

}  // namespace

std::string_view curve_name(CurveKind k) noexcept {
  return k == CurveKind::fold ? "fold" : "hopf";
}

std::string_view codim2_name(Codim2Kind k) noexcept {
  switch (k) {
    case Codim2Kind::cusp: return "cusp";
    case Codim2Kind::bogdanov_takens: return "bogdanov_takens";
    case Codim2Kind::zero_hopf: return "zero_hopf";
    case Codim2Kind::generalized_hopf: break;
  }
  return "generalized_hopf";
}

CurveResult trace_curve(const Parameters& p, CurveKind kind, ParamId p1, ParamId p2,
                        std::array<double, 2> seed, const TraceOptions& opts) {
  if (p1 == p2) throw ValidationError("curve parameters must differ");
  if (opts.steps < 1) throw ValidationError("curve needs at least one step");
  if (!(opts.h_min > 0.0 && opts.h_min <= opts.h_init && opts.h_init <= opts.h_max)) {
    throw ValidationError("curve step sizes must satisfy 0 < h_min <= h_init <= h_max");
  }
  Curve curve(p, kind, p1, p2);
  CurveResult out;
  out.kind = kind;
  out.p1 = p1;
  out.p2 = p2;

  Z z = seed_point(curve, p, kind, p1, p2, seed, opts.state_seed);
  auto J0 = curve.jac(z);
  if (!J0) throw SeedError("curve Jacobian undefined at the seed");
  Z dir = Curve::kernel(*J0);
  if (dir[4] * opts.direction < 0.0)
    for (double& c : dir) c = -c;

  Orientation orient;
  out.points.push_back(curve.evaluate(z, orient));
  if (kind == CurveKind::hopf && !(out.points.back().bt > 0.0)) {
    throw SeedError("seed is not a Hopf point (Omega2 <= 0)");
  }
  double h = opts.h_init;
  out.stop_reason = "steps";

  for (int step = 0; step < opts.steps; ++step) {
    std::optional<Z> zn;
    while (true) {
      Z zp{};
      for (std::size_t i = 0; i < 5; ++i) zp[i] = z[i] + h * dir[i];
      zn = curve.correct(zp, dir);
      if (zn) {
        Z diff{};
        for (std::size_t i = 0; i < 5; ++i) diff[i] = (*zn)[i] - z[i];
        if (znorm(diff) < 2.0 * h && zdot(diff, dir) > 0.0) break;
      }
      h *= 0.5;
      if (h < opts.h_min) break;
    }
    if (h < opts.h_min) {
      out.stop_reason = "corrector_failure";
      break;
    }
    const Orientation before = orient;
    const CurvePoint& prev = out.points.back();
    CurvePoint cur = curve.evaluate(*zn, orient);

    std::vector<Codim2Point> found;
    auto check = [&](Monitor m, Codim2Kind k, bool guard) {
      if (!guard || !sign_change(m(prev), m(cur))) return;
      auto c = localize(curve, prev, cur, before, m, opts.localize_tol);
      if (!c) return;
      const double mv = m(*c);
      // a sign change through a pole is not a zero
      if (std::abs(mv) > std::min(std::abs(m(prev)), std::abs(m(cur)))) return;
      found.push_back(make_special(k, *c, mv));
    };
    bool stop = false;
    if (kind == CurveKind::fold) {
      check(m_cusp, Codim2Kind::cusp, true);
      check(m_bt, Codim2Kind::bogdanov_takens, true);
      check(m_zh, Codim2Kind::zero_hopf, prev.bt > 0.0 && cur.bt > 0.0);
    } else {
      check(m_zh, Codim2Kind::zero_hopf, true);
      check(m_gh, Codim2Kind::generalized_hopf, true);
      if (!(cur.bt > 0.0)) {
        check(m_bt, Codim2Kind::bogdanov_takens, true);
        stop = true;
      }
    }
    std::sort(found.begin(), found.end(), [&](const Codim2Point& a, const Codim2Point& b) {
      const double da = std::hypot(a.p1 - prev.p1, a.p2 - prev.p2);
      const double db = std::hypot(b.p1 - prev.p1, b.p2 - prev.p2);
      return da < db;
    });
    for (auto& f : found) out.special.push_back(std::move(f));
    if (stop) {
      out.stop_reason = "bogdanov_takens";
      break;
    }

    Z sec{};
    for (std::size_t i = 0; i < 5; ++i) sec[i] = (*zn)[i] - z[i];
    const double sn = znorm(sec);
    for (std::size_t i = 0; i < 5; ++i) dir[i] = sec[i] / sn;
    z = *zn;
    out.points.push_back(std::move(cur));
    h = std::min(h * 1.3, opts.h_max);
  }
  return out;
}

Codim2Point solve_zh_on_boundary(const Parameters& base, ParamId p1, ParamId p2,
                                 std::array<double, 2> seed) {
  if (p1 == p2) throw ValidationError("zero-Hopf parameters must differ");
  auto G = [&](double u, double w) -> std::optional<std::array<double, 2>> {
    const Parameters p = base.with(p1, u).with(p2, w);
    if (!params_ok(p)) return std::nullopt;
    const State x{predator_free_S(p), predator_free_I(p), 0.0};
    if (!(x.S > 0.0) || !std::isfinite(x.I)) return std::nullopt;
    const Matrix3 J = jacobian(x, p);
    return std::array<double, 2>{J[0][0], J[2][2]};
  };
  double u = seed[0], w = seed[1];
  auto g = G(u, w);
  if (!g) throw NumericalError("zero-Hopf seed is outside the parameter domain");
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double hu = 1e-7 * (1.0 + std::abs(u)), hw = 1e-7 * (1.0 + std::abs(w));
    auto gup = G(u + hu, w), gum = G(u - hu, w), gwp = G(u, w + hw), gwm = G(u, w - hw);
    if (!gup || !gum || !gwp || !gwm) break;
    std::array<std::array<double, 2>, 2> A{};
    for (int i = 0; i < 2; ++i) {
      A[i][0] = ((*gup)[i] - (*gum)[i]) / (2 * hu);
      A[i][1] = ((*gwp)[i] - (*gwm)[i]) / (2 * hw);
    }
    auto d = solve<double, 2>(A, {-(*g)[0], -(*g)[1]});
    if (!d) break;
    const double r0 = std::max(std::abs((*g)[0]), std::abs((*g)[1]));
    double lam = 1.0;
    std::optional<std::array<double, 2>> gn;
    for (int k = 0; k < 12; ++k, lam *= 0.5) {
      gn = G(u + lam * (*d)[0], w + lam * (*d)[1]);
      if (gn && std::max(std::abs((*gn)[0]), std::abs((*gn)[1])) < r0) break;
    }
    if (!gn) break;
    u += lam * (*d)[0];
    w += lam * (*d)[1];
    g = gn;
    if (std::max(std::abs((*g)[0]), std::abs((*g)[1])) < 1e-13 ||
        std::abs(lam * (*d)[0]) + std::abs(lam * (*d)[1]) < 1e-15) {
      converged = std::max(std::abs((*g)[0]), std::abs((*g)[1])) < 1e-10;
      break;
    }
  }
  if (!converged) throw NumericalError("zero-Hopf Newton iteration on the E2 branch diverged");
  const Parameters p = base.with(p1, u).with(p2, w);
  const State x{predator_free_S(p), predator_free_I(p), 0.0};
  const Matrix3 J = jacobian(x, p);
  if (!(-J[0][1] * J[1][0] > 0.0)) {
    throw NumericalError("no imaginary pair at the E2 zero-Hopf candidate (-C12*C21 <= 0)");
  }
  Codim2Point sp;
  sp.kind = Codim2Kind::zero_hopf;
  sp.p1 = u;
  sp.p2 = w;
  sp.x = x;
  sp.eigenvalues = eig3(J);
  sp.feasible = x.I > 0.0;
  sp.monitor = J[0][0];
  return sp;
}

}  // namespace sipdyn
