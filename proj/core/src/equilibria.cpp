#include "sipdyn/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

ConditionFlag negative(std::string name, double v) { return {std::move(name), v, v < 0.0}; }
ConditionFlag positive(std::string name, double v) { return {std::move(name), v, v > 0.0}; }

bool strictly_positive(const State& x) { return x.S > 0.0 && x.I > 0.0 && x.P > 0.0; }

}  // namespace

std::string_view kind_name(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::E0: return "E0";
    case EquilibriumKind::E1_K: return "E1_K";
    case EquilibriumKind::E1_L: return "E1_L";
    case EquilibriumKind::E2: return "E2";
    case EquilibriumKind::E3: return "E3";
    case EquilibriumKind::E4: break;
  }
  return "E4";
}

bool is_boundary(EquilibriumKind k) noexcept { return k != EquilibriumKind::E4; }

bool StabilityReport::conditions_hold() const noexcept {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionFlag& f) { return f.holds; });
}

double predator_free_S(const Parameters& p) noexcept { return p.a1 / p.e0; }

double predator_free_I(const Parameters& p) noexcept {
  const double a0 = p.a0, a1 = p.a1, e0 = p.e0, K = p.K, L = p.L;
  return -a0 * (a1 - e0 * K) * (a1 - e0 * L) / (e0 * (-a0 * e0 * L + a0 * a1 + e0 * e0 * K));
}

double infection_free_S(const Parameters& p) noexcept { return std::pow(p.a2 / p.d2, 1.0 / p.r); }

double infection_free_P(const Parameters& p) noexcept {
  const double S3 = infection_free_S(p);
  return -p.a0 * std::pow(S3, 1.0 - p.r) * (S3 - p.K) * (S3 - p.L) / (p.d0 * p.K);
}

double interior_I(double S, const Parameters& p) noexcept {
  return (p.a2 - p.d2 * pow_r(S, p.r)) / p.d3;
}

double interior_P(double S, const Parameters& p) noexcept { return (p.e0 * S - p.a1) / p.d1; }

State interior_point(double S, const Parameters& p) noexcept {
  return {S, interior_I(S, p), interior_P(S, p)};
}

double interior_residual(double S, const Parameters& p) noexcept {
  const double I = interior_I(S, p);
  const double P = interior_P(S, p);
  return p.a0 * (1.0 - (S + I) / p.K) * (S - p.L) - p.d0 * std::pow(S, p.r - 1.0) * P - p.e0 * I;
}

std::vector<Equilibrium> boundary_equilibria(const Parameters& p) {
  std::vector<Equilibrium> out;
  out.push_back({EquilibriumKind::E0, {0, 0, 0}, true});
  out.push_back({EquilibriumKind::E1_K, {p.K, 0, 0}, true});
  out.push_back({EquilibriumKind::E1_L, {p.L, 0, 0}, p.L > 0.0});
  const double I2 = predator_free_I(p);
  out.push_back({EquilibriumKind::E2, {predator_free_S(p), I2, 0}, std::isfinite(I2) && I2 > 0.0});
  const double P3 = infection_free_P(p);
  out.push_back(
      {EquilibriumKind::E3, {infection_free_S(p), 0, P3}, std::isfinite(P3) && P3 > 0.0});
  return out;
}

std::vector<Equilibrium> interior_equilibria(const Parameters& p) {
  std::vector<Equilibrium> out;
  const double S2 = predator_free_S(p);
  const double S3 = infection_free_S(p);
  if (!(S2 > 0.0 && S2 < S3) || std::isnan(S3)) return out;
  // Past max(K, L) every term of the residual is negative, so the scan can
  // stop there; this keeps the grid fine when S3 is huge (small r).
  const double hi = std::min(S3, std::max(p.K, p.L));
  if (!(S2 < hi)) return out;
  const double delta = 1e-9 * (hi - S2);
  const double top = hi < S3 ? hi : S3 - delta;
  const auto roots = bracketed_roots([&p](double S) { return interior_residual(S, p); },
                                     S2 + delta, top, kInteriorGrid, kInteriorTol);
  for (double S : roots) {
    const State x = interior_point(S, p);
    if (strictly_positive(x)) out.push_back({EquilibriumKind::E4, x, true});
  }
  return out;
}

std::vector<Equilibrium> all_equilibria(const Parameters& p) {
  auto out = boundary_equilibria(p);
  for (auto& e : interior_equilibria(p)) out.push_back(e);
  return out;
}

std::optional<Equilibrium> locate(EquilibriumKind kind, const State& guess, const Parameters& p) {
  if (kind != EquilibriumKind::E4) {
    for (const auto& e : boundary_equilibria(p)) {
      if (e.kind == kind) return e;
    }
    return std::nullopt;
  }
  double S = guess.S;
  for (int it = 0; it < 60; ++it) {
    if (!(S > 0.0)) return std::nullopt;
    const double g = interior_residual(S, p);
    const double h = 1e-7 * (1.0 + std::abs(S));
    const double dg = (interior_residual(S + h, p) - interior_residual(S - h, p)) / (2 * h);
    if (dg == 0.0 || !std::isfinite(dg)) return std::nullopt;
    double step = g / dg;
    // keep Newton from jumping onto another root
    const double cap = 0.1 * (1.0 + std::abs(S));
    step = std::clamp(step, -cap, cap);
    S -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(S))) break;
  }
  if (!(S > 0.0) || std::abs(interior_residual(S, p)) > 1e-9) return std::nullopt;
  const State x = interior_point(S, p);
  return Equilibrium{EquilibriumKind::E4, x, strictly_positive(x)};
}

CubicCoefficients interior_char_coeffs(const Matrix3& F) noexcept {
  const double F11 = F[0][0], F12 = F[0][1], F13 = F[0][2];
  const double F21 = F[1][0], F23 = F[1][2];
  const double F31 = F[2][0], F32 = F[2][1];
  return {-F11, -(F23 * F32 + F12 * F21 + F13 * F31),
          F11 * F23 * F32 - F12 * F23 * F31 - F13 * F21 * F32};
}

StabilityReport analyze(const Equilibrium& eq, const Parameters& p) {
  if (eq.kind == EquilibriumKind::E0 || !(eq.point.S > 0.0)) {
    throw SingularStateError(
        "equilibrium with S=0 cannot be analyzed through the Jacobian (S^(r-1) is singular)");
  }
  const Matrix3 J = jacobian(eq.point, p);
  StabilityReport rep;
  rep.coefficients = char_coeffs(J);
  rep.eigenvalues = cubic_roots(rep.coefficients);
  const auto rh = routh_hurwitz(rep.coefficients);
  rep.verdict = rh.verdict;
  rep.margins = rh.margins;
  switch (eq.kind) {
    case EquilibriumKind::E1_K:
    case EquilibriumKind::E1_L:
      // triangular Jacobian: eigenvalues are the diagonal
      rep.conditions = {negative("J11<0", J[0][0]), negative("J22<0", J[1][1]),
                        negative("J33<0", J[2][2])};
      break;
    case EquilibriumKind::E2:
      rep.conditions = {negative("C11<0", J[0][0]), negative("C33<0", J[2][2]),
                        negative("C12*C21<0", J[0][1] * J[1][0])};
      break;
    case EquilibriumKind::E3:
      rep.conditions = {negative("H11<0", J[0][0]), negative("H22<0", J[1][1])};
      break;
    case EquilibriumKind::E4: {
      const auto& c = rep.coefficients;
      rep.conditions = {positive("Omega1>0", c.omega1), positive("Omega3>0", c.omega3),
                        positive("Omega1*Omega2-Omega3>0", hopf_margin(c))};
      break;
    }
    case EquilibriumKind::E0: break;
  }
  return rep;
}

StabilityReport classify(const Equilibrium& eq, const Parameters& p) {
  if (eq.kind != EquilibriumKind::E0 && !eq.feasible) {
    throw InfeasibleEquilibriumError("cannot classify infeasible equilibrium " +
                                     std::string(kind_name(eq.kind)));
  }
  return analyze(eq, p);
}

double residual_norm(const State& x, const Parameters& p) noexcept {
  const Vec3 f = rhs(x, p);
  return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
}

}  // namespace sipdyn
