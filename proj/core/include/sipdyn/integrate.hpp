#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "sipdyn/equilibria.hpp"
#include "sipdyn/model.hpp"

namespace sipdyn {

struct SimOptions {
  double t_end = 500.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double extinction_threshold = 1e-8;
  // stop once |rhs|_inf < convergence_tol has held for convergence_window
  double convergence_window = 50.0;
  double convergence_tol = 1e-10;
  bool stop_on_convergence = true;
  double min_step = 1e-14;
  double max_step = 1.0;
  double initial_step = 1e-3;
};

// Throws ValidationError.
void validate(const SimOptions& o);

enum class Component { S, I, P };
std::string_view component_name(Component c) noexcept;

struct ExtinctionEvent {
  Component component = Component::S;
  double time = 0.0;
};

enum class Termination { t_end, all_extinct, converged };
std::string_view termination_name(Termination t) noexcept;

struct Sample {
  double t = 0.0;
  State x;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<ExtinctionEvent> events;
  Termination reason = Termination::t_end;
  double extinction_threshold = 1e-8;

  const State& final_state() const { return samples.back().x; }
  bool has_event(Component c) const noexcept;
  std::optional<double> event_time(Component c) const noexcept;
};

// Dormand-Prince 5(4) with clamping at the extinction threshold.
// Throws ValidationError for a negative initial condition and
// StepUnderflowError when the step size collapses.
Trajectory simulate(const Parameters& p, const State& ic, const SimOptions& opts = {});

enum class OutcomeKind { converged, oscillatory, collapsed, undecided };
std::string_view outcome_name(OutcomeKind k) noexcept;

struct Outcome {
  OutcomeKind kind = OutcomeKind::undecided;
  std::optional<EquilibriumKind> equilibrium;  // set when converged
  double distance = 0.0;                       // to that equilibrium
  double amplitude = 0.0;                      // peak-to-peak over the window
};

// Looks at the trailing `window_fraction` of the time span.
Outcome asymptotic_state(const Trajectory& traj, const std::vector<Equilibrium>& eqs, double tol,
                         double window_fraction = 0.2);

}  // namespace sipdyn
