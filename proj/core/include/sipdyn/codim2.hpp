#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sipdyn/equilibria.hpp"
#include "sipdyn/model.hpp"
#include "sipdyn/numerics.hpp"

namespace sipdyn {

enum class CurveKind { fold, hopf };
std::string_view curve_name(CurveKind k) noexcept;

struct CurvePoint {
  double p1 = 0.0;
  double p2 = 0.0;
  State x;
  double test = 0.0;  // Omega3 on folds, Omega1*Omega2 - Omega3 on Hopf curves
  // Monitors; NaN where not defined for the curve kind.
  double cusp = 0.0;  // V^T D^2f(U, U), unit null vectors oriented continuously
  double bt = 0.0;    // Omega2
  double zh = 0.0;    // Omega1
  double gh = 0.0;    // first Lyapunov coefficient
  EigenTriple eigenvalues;
};

enum class Codim2Kind { cusp, bogdanov_takens, zero_hopf, generalized_hopf };
std::string_view codim2_name(Codim2Kind k) noexcept;

struct Codim2Point {
  Codim2Kind kind = Codim2Kind::cusp;
  double p1 = 0.0;
  double p2 = 0.0;
  State x;
  EigenTriple eigenvalues;
  bool feasible = true;  // all state coordinates >= -1e-6
  double monitor = 0.0;  // value of the vanishing monitor at the located point
};

struct TraceOptions {
  int steps = 400;
  int direction = -1;  // sign of the initial change in p2
  double h_init = 0.02;
  double h_min = 1e-4;
  double h_max = 5e-2;
  double localize_tol = 1e-6;
  std::optional<State> state_seed;  // otherwise picked among interior equilibria
};

struct CurveResult {
  CurveKind kind = CurveKind::fold;
  ParamId p1 = ParamId::L;
  ParamId p2 = ParamId::a0;
  std::vector<CurvePoint> points;
  std::vector<Codim2Point> special;
  std::string stop_reason;
};

// Pseudo-arclength continuation of the fold or Hopf locus in the (p1, p2)
// plane. Throws SeedError when no codim-1 point of the requested kind can be
// found near the seed. A corrector failure ends the curve early and is
// reported in stop_reason.
CurveResult trace_curve(const Parameters& p, CurveKind kind, ParamId p1, ParamId p2,
                        std::array<double, 2> seed, const TraceOptions& opts = {});

// Zero-Hopf on the predator-free branch: {C11 = 0, C33 = 0} in (p1, p2).
// Throws NumericalError on divergence or when -C12*C21 <= 0.
Codim2Point solve_zh_on_boundary(const Parameters& p, ParamId p1, ParamId p2,
                                 std::array<double, 2> seed);

}  // namespace sipdyn
