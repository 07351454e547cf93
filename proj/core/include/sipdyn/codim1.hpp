#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sipdyn/equilibria.hpp"
#include "sipdyn/model.hpp"
#include "sipdyn/numerics.hpp"

namespace sipdyn {

struct BranchSample {
  double value = 0.0;
  Equilibrium eq;
  StabilityReport report;
};

struct Branch {
  int id = 0;
  EquilibriumKind kind = EquilibriumKind::E4;
  ParamId parameter = ParamId::L;
  std::vector<BranchSample> samples;
};

enum class EventKind { saddle_node, hopf, transcritical };
std::string_view event_name(EventKind k) noexcept;

struct BifurcationEvent {
  EventKind kind = EventKind::hopf;
  ParamId parameter = ParamId::L;
  double value = 0.0;
  Equilibrium eq;
  int branch_id = -1;
  EigenTriple eigenvalues;
  CubicCoefficients coefficients;
  // Omega3 (fold / transcritical) or Omega1*Omega2 - Omega3 (Hopf)
  double test_value = 0.0;
  std::optional<double> first_lyapunov;
};

struct SweepOptions {
  unsigned threads = 1;
  double localize_tol = 1e-8;
  bool include_infeasible = false;  // keep boundary samples outside the octant
};

struct SweepResult {
  ParamId parameter = ParamId::L;
  std::vector<double> grid;
  std::vector<Branch> branches;
  std::vector<BifurcationEvent> events;  // ascending in the parameter
};

// Throws ValidationError for lo >= hi, n < 3 or endpoints outside the
// parameter box.
SweepResult sweep(const Parameters& p, ParamId which, double lo, double hi, int n,
                  const SweepOptions& opts = {});

// Throws NotHopfPointError without an imaginary pair (|Re| <= 1e-6).
double first_lyapunov(const State& x, const Parameters& p);
// Same, with an extra positive factor on the normalized eigenvector; the
// sign of the result is independent of it.
double first_lyapunov(const State& x, const Parameters& p, double q_scale);

struct TransversalityQuantity {
  std::string name;
  double value = 0.0;
  bool nonzero = false;  // |value| > 1e-6
};

struct TransversalityReport {
  EventKind kind = EventKind::hopf;
  std::vector<TransversalityQuantity> quantities;

  const TransversalityQuantity* find(std::string_view name) const noexcept;
};

// Hopf: dRe_lambda_d<p>, and the same speed from the Omega derivatives.
// Fold: VT_F<p>, VT_D2F_UU. Transcritical adds VT_DF<p>_U, with the Jacobian
// differentiated along the boundary branch.
TransversalityReport transversality_report(const BifurcationEvent& ev, const Parameters& p);

// D^2 f(x)[u, u] by central differences with step 1e-4 (1 + |x|).
Vec3 second_difference(const State& x, const Parameters& p, const Vec3& u);

}  // namespace sipdyn
