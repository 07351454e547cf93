#include <algorithm>
#include <cmath>

#include "sipdyn/codim1.hpp"
#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

using CVec = Vec3T<cplx>;
using CMat = std::array<CVec, 3>;

cplx inner(const CVec& a, const CVec& b) {
  cplx s{};
  for (int i = 0; i < 3; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

CVec conj(const CVec& v) { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }

CMat shifted(const Matrix3& A, cplx shift) {
  CMat M{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) M[i][j] = A[i][j];
    M[i][i] -= shift;
  }
  return M;
}

Vec3 unit(Vec3 v, const char* what) {
  const double n = norm(v);
  if (n < 1e-12) throw DegenerateEigenvectorError(std::string(what) + " null vector is degenerate");
  for (double& c : v) c /= n;
  return v;
}

double fd_step(double v) { return 1e-4 * (1.0 + std::abs(v)); }

}  // namespace

double first_lyapunov(const State& x, const Parameters& p) { return first_lyapunov(x, p, 1.0); }

double first_lyapunov(const State& x, const Parameters& p, double q_scale) {
  const Matrix3 A = jacobian(x, p);
  const EigenTriple ev = eig3(A);
  const auto it = std::max_element(ev.begin(), ev.end(),
                                   [](const cplx& a, const cplx& b) { return a.imag() < b.imag(); });
  const double omega = it->imag();
  if (!(omega > 1e-8) || std::abs(it->real()) > 1e-6 * std::max(1.0, omega)) {
    throw NotHopfPointError("no purely imaginary eigenvalue pair at this point");
  }
  const cplx iw(0.0, omega);

  CVec q = null_vector<cplx>(shifted(A, iw));
  const double qn = std::sqrt(inner(q, q).real());
  if (qn < 1e-300) throw DegenerateEigenvectorError("critical eigenvector is degenerate");
  for (auto& c : q) c *= q_scale / qn;

  CVec pv = null_vector<cplx>(shifted(transpose(A), -iw));
  const cplx pq = inner(pv, q);
  if (std::abs(pq) < 1e-300) throw DegenerateEigenvectorError("adjoint eigenvector is degenerate");
  for (auto& c : pv) c /= std::conj(pq);

  const SecondDerivatives H = second_derivatives(x, p);
  const ThirdDerivatives T = third_derivatives(x, p);
  const CVec qb = conj(q);

  CMat Ac{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Ac[i][j] = A[i][j];
  auto a = solve<cplx, 3>(Ac, bilinear<cplx>(H, q, qb));
  auto b = solve<cplx, 3>(shifted(A, 2.0 * iw), bilinear<cplx>(H, q, q));
  if (!a || !b) throw NumericalError("singular system in the Lyapunov coefficient");
  // shifted() gives A - 2iw; the formula needs 2iw - A
  for (auto& c : *b) c = -c;

  const cplx c1 = inner(pv, trilinear<cplx>(T, q, q, qb)) -
                  2.0 * inner(pv, bilinear<cplx>(H, q, *a)) + inner(pv, bilinear<cplx>(H, qb, *b));
  return c1.real() / (2.0 * omega);
}

Vec3 second_difference(const State& x, const Parameters& p, const Vec3& u) {
  const double h = 1e-4 * (1.0 + std::max({std::abs(x.S), std::abs(x.I), std::abs(x.P)}));
  const Vec3 c = x.vec();
  Vec3 xp{}, xm{};
  for (int i = 0; i < 3; ++i) {
    xp[i] = c[i] + h * u[i];
    xm[i] = c[i] - h * u[i];
  }
  const Vec3 fp = rhs(xp, p), f0 = rhs(c, p), fm = rhs(xm, p);
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = (fp[i] - 2 * f0[i] + fm[i]) / (h * h);
  return out;
}

TransversalityReport transversality_report(const BifurcationEvent& ev, const Parameters& base) {
  TransversalityReport rep;
  rep.kind = ev.kind;
  const ParamId which = ev.parameter;
  const Parameters p = base.with(which, ev.value);
  const State& x = ev.eq.point;
  auto add = [&rep](std::string name, double v) {
    rep.quantities.push_back({std::move(name), v, std::abs(v) > 1e-6});
  };

  if (ev.kind == EventKind::hopf) {
    const double dv = fd_step(ev.value);
    auto pair_re = [&](double v) -> std::optional<std::pair<double, double>> {
      const Parameters q = base.with(which, v);
      auto eq = locate(ev.eq.kind, x, q);
      if (!eq) return std::nullopt;
      const Matrix3 J = jacobian(eq->point, q);
      const auto c = char_coeffs(J);
      const auto e = cubic_roots(c);
      const auto top = std::max_element(
          e.begin(), e.end(), [](const cplx& a, const cplx& b) { return a.imag() < b.imag(); });
      return std::pair{top->real(), hopf_margin(c)};
    };
    auto up = pair_re(ev.value + dv), dn = pair_re(ev.value - dv);
    if (!up || !dn) throw NumericalError("cannot follow the equilibrium across the Hopf point");
    add("dRe_lambda_d" + std::string(param_name(which)), (up->first - dn->first) / (2 * dv));
    const auto& c = ev.coefficients;
    const double dm = (up->second - dn->second) / (2 * dv);
    add("dRe_lambda_d" + std::string(param_name(which)) + "_from_omega",
        -dm / (2.0 * (c.omega1 * c.omega1 + c.omega2)));
    return rep;
  }

  const Matrix3 J = jacobian(x, p);
  const Vec3 U = unit(null_vector<double>(J), "right");
  const Vec3 V = unit(null_vector<double>(transpose(J)), "left");
  add("VT_F" + std::string(param_name(which)), dot(V, parameter_derivative(x, p, which)));
  if (ev.kind == EventKind::transcritical) {
    // derivative of J along the boundary branch, which moves with the parameter
    const double dv = fd_step(ev.value);
    auto follow = [&](double v) {
      const Parameters q = base.with(which, v);
      auto eq = locate(ev.eq.kind, x, q);
      if (!eq) throw NumericalError("cannot follow the boundary branch across the transcritical");
      return jacobian(eq->point, q);
    };
    const Matrix3 Jp = follow(ev.value + dv);
    const Matrix3 Jm = follow(ev.value - dv);
    Matrix3 dJ{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dJ[i][j] = (Jp[i][j] - Jm[i][j]) / (2 * dv);
    add("VT_DF" + std::string(param_name(which)) + "_U", dot(V, matvec(dJ, U)));
  }
  add("VT_D2F_UU", dot(V, second_difference(x, p, U)));
  return rep;
}

}  // namespace sipdyn
