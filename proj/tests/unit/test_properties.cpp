#include "doctest.h"
#include "support/properties.hpp"

namespace {

void expect(const props::Result& r) {
  INFO(r.first_failure);
  CHECK(r.cases > 0);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("nonnegativity over random runs") { expect(props::nonnegativity(100)); }

TEST_CASE("boundedness over random runs with a strong Allee threshold") {
  expect(props::boundedness(100, 92, 0.0));
}

// Q vanishes as L -> -K while the equilibria do not, so the bound cannot
// hold deep in the weak Allee regime.
TEST_CASE("the total bound fails for L close to -K") {
  const sipdyn::Parameters p = sipdyn::Parameters{}.with(sipdyn::ParamId::L, -3.6).with(sipdyn::ParamId::r, 0.8);
  CHECK(p.d0 >= p.d2);
  CHECK(p.d1 >= p.d3);
  const auto tr = sipdyn::simulate(p, {2, 1, 3});
  const auto& x = tr.final_state();
  const double bound = std::max(6.0, props::bound_Q(p) / std::min(p.a1, p.a2)) + 1e-6;
  CHECK(x.S + x.I + x.P > bound);
  const auto e3 = sipdyn::boundary_equilibria(p)[4];
  REQUIRE(e3.feasible);
  CHECK(sipdyn::classify(e3, p).verdict == sipdyn::Verdict::stable);
  CHECK(e3.point.S + e3.point.P > bound);
}

TEST_CASE("jacobian against differences at random points") { expect(props::jacobian_fd(100)); }

TEST_CASE("equilibrium residuals over random draws") { expect(props::equilibrium_residuals(300)); }

TEST_CASE("eigenvalues agree with Routh-Hurwitz") { expect(props::routh_hurwitz_agreement(1000)); }

TEST_CASE("properties hold for other seeds") {
  expect(props::nonnegativity(30, 7));
  expect(props::boundedness(30, 8, 0.0));
  expect(props::routh_hurwitz_agreement(3000, 9));
}
