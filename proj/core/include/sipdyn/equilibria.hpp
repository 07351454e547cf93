#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sipdyn/model.hpp"
#include "sipdyn/numerics.hpp"

namespace sipdyn {

enum class EquilibriumKind { E0, E1_K, E1_L, E2, E3, E4 };

// "E0", "E1_K", "E1_L", "E2", "E3", "E4"
std::string_view kind_name(EquilibriumKind k) noexcept;
bool is_boundary(EquilibriumKind k) noexcept;

struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::E0;
  State point;
  bool feasible = true;
};

struct ConditionFlag {
  std::string name;
  double value = 0.0;
  bool holds = false;
};

struct StabilityReport {
  EigenTriple eigenvalues;
  CubicCoefficients coefficients;
  Verdict verdict = Verdict::marginal;
  std::array<double, 3> margins{};
  // Sufficient stability conditions for this equilibrium kind, as diagnostics.
  // The eigenvalue verdict is authoritative.
  std::vector<ConditionFlag> conditions;

  bool conditions_hold() const noexcept;
};

inline constexpr int kInteriorGrid = 2001;
inline constexpr double kInteriorTol = 1e-12;

double predator_free_S(const Parameters& p) noexcept;       // S2 = a1/e0
double predator_free_I(const Parameters& p) noexcept;       // I2
double infection_free_S(const Parameters& p) noexcept;      // S3 = (a2/d2)^(1/r)
double infection_free_P(const Parameters& p) noexcept;      // P3

// I*(S), P*(S) on the two remaining nullclines
double interior_I(double S, const Parameters& p) noexcept;
double interior_P(double S, const Parameters& p) noexcept;
State interior_point(double S, const Parameters& p) noexcept;

// Susceptible nullcline after eliminating I and P.
double interior_residual(double S, const Parameters& p) noexcept;

// E0, E1_K, E1_L, E2, E3 in that order, infeasible ones flagged.
std::vector<Equilibrium> boundary_equilibria(const Parameters& p);
// Ascending in S.
std::vector<Equilibrium> interior_equilibria(const Parameters& p);
std::vector<Equilibrium> all_equilibria(const Parameters& p);

// The equilibrium of a given kind near `guess`: closed form for boundary
// kinds, Newton on the interior residual for E4. Empty if Newton fails.
std::optional<Equilibrium> locate(EquilibriumKind kind, const State& guess, const Parameters& p);

// Throws SingularStateError for E0 and InfeasibleEquilibriumError when
// eq.feasible is false.
StabilityReport classify(const Equilibrium& eq, const Parameters& p);
// Same, without the feasibility gate; used along branches that leave the
// feasible region.
StabilityReport analyze(const Equilibrium& eq, const Parameters& p);

// Characteristic coefficients from the interior Jacobian where F22 = F33 = 0.
CubicCoefficients interior_char_coeffs(const Matrix3& F) noexcept;

double residual_norm(const State& x, const Parameters& p) noexcept;

}  // namespace sipdyn
