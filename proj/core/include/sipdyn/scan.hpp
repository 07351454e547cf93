#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "sipdyn/integrate.hpp"
#include "sipdyn/model.hpp"

namespace sipdyn {

enum class RegionLabel { coexistence, infection_free, collapse, undecided };
std::string_view label_name(RegionLabel l) noexcept;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScanOptions {
  unsigned threads = 1;
  double tol = 1e-3;  // classification tolerance handed to asymptotic_state
};

struct CellResult {
  RegionLabel label = RegionLabel::undecided;
  Outcome outcome;
  std::optional<double> s_extinct_time;
};

struct RegionGrid {
  std::vector<double> L;
  std::vector<double> r;
  // labels[j * L.size() + i] is the cell (L[i], r[j])
  std::vector<RegionLabel> labels;
  State ic;
  double t_end = 0.0;

  RegionLabel at(std::size_t i, std::size_t j) const { return labels[j * L.size() + i]; }
  std::size_t count(RegionLabel l) const noexcept;
};

CellResult classify_cell(const Parameters& p, const State& ic, const SimOptions& opts,
                         double tol = 1e-3);

// Throws ValidationError for ranges outside (-K, K) x (0, 1) or counts < 1.
RegionGrid region_grid(const Parameters& p, Range L, Range r, int nL, int nr, const State& ic,
                       const SimOptions& opts, const ScanOptions& scan = {});

struct ThresholdResult {
  std::optional<double> r_star;  // sign change of h on the feasible interval
  Range feasible;                // where E3 exists (P3 > 0)
  std::optional<double> r_feasibility_boundary;  // ln(a2/d2)/ln K when it applies
  // h < 0 across the whole feasible interval: the value reported is the
  // feasibility boundary, not a root
  bool boundary_only = false;
  double value = 0.0;  // r_star, or the boundary when boundary_only
};

// h(r) = e0*S3(r) - d1*P3(r) - a1
double threshold_function(double r, const Parameters& p) noexcept;

// Empty when E3 is never feasible or h keeps a positive sign.
std::optional<ThresholdResult> critical_aggregation(const Parameters& p, double tol = 1e-12);

}  // namespace sipdyn
