#include "sipdyn/model.hpp"

#include <cmath>
#include <string>

#include "sipdyn/errors.hpp"

namespace sipdyn {

namespace {

constexpr std::array<std::string_view, 11> kNames = {"a0", "a1", "a2", "d0", "d1", "d2",
                                                     "d3", "e0", "K",  "L",  "r"};

void require_positive_S(const State& x, const char* what) {
  if (!(x.S > 0.0)) {
    throw SingularStateError(std::string(what) +
                             ": S must be positive (the S^(r-1) terms are singular at S=0)");
  }
}

}  // namespace

std::string_view param_name(ParamId id) noexcept { return kNames[static_cast<std::size_t>(id)]; }

std::optional<ParamId> find_param(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllParams[i];
  }
  return std::nullopt;
}

ParamId parse_param(std::string_view name) {
  if (auto id = find_param(name)) return *id;
  throw ValidationError("unknown parameter name '" + std::string(name) + "'");
}

double Parameters::get(ParamId id) const noexcept {
  return const_cast<Parameters*>(this)->ref(id);
}

double& Parameters::ref(ParamId id) noexcept {
  switch (id) {
    case ParamId::a0: return a0;
    case ParamId::a1: return a1;
    case ParamId::a2: return a2;
    case ParamId::d0: return d0;
    case ParamId::d1: return d1;
    case ParamId::d2: return d2;
    case ParamId::d3: return d3;
    case ParamId::e0: return e0;
    case ParamId::K: return K;
    case ParamId::L: return L;
    case ParamId::r: break;
  }
  return r;
}

void validate(const Parameters& p) {
  for (ParamId id : kAllParams) {
    const double v = p.get(id);
    if (!std::isfinite(v)) {
      throw ValidationError("parameter " + std::string(param_name(id)) + " is not finite");
    }
    if (id == ParamId::L || id == ParamId::r) continue;
    if (!(v > 0.0)) {
      throw ValidationError("parameter " + std::string(param_name(id)) +
                            " must be positive, got " + std::to_string(v));
    }
  }
  if (!(p.r > 0.0 && p.r < 1.0)) {
    throw ValidationError("parameter r must lie in (0, 1), got " + std::to_string(p.r));
  }
  if (!(p.L > -p.K && p.L < p.K)) {
    throw ValidationError("parameter L must lie in (-K, K), got " + std::to_string(p.L));
  }
}

Vec3 rhs(const Vec3& x, const Parameters& p) noexcept {
  const double S = x[0], I = x[1], P = x[2];
  const double Sr = pow_r(S, p.r);
  return {p.a0 * S * (1.0 - (S + I) / p.K) * (S - p.L) - p.d0 * Sr * P - p.e0 * S * I,
          -p.a1 * I + p.e0 * S * I - p.d1 * I * P,
          -p.a2 * P + p.d2 * Sr * P + p.d3 * I * P};
}

Matrix3 jacobian(const State& x, const Parameters& p) {
  require_positive_S(x, "jacobian");
  const double S = x.S, I = x.I, P = x.P, K = p.K, L = p.L, r = p.r;
  const double Sr = std::pow(S, r);
  const double Sr1 = Sr / S;
  // h = S (K - S - I)(S - L)
  const double hS = 2 * K * S - K * L - 3 * S * S + 2 * L * S - 2 * S * I + L * I;
  const double hI = -S * S + L * S;
  const double c = p.a0 / K;
  Matrix3 J{};
  J[0] = {c * hS - p.d0 * r * Sr1 * P - p.e0 * I, c * hI - p.e0 * S, -p.d0 * Sr};
  J[1] = {p.e0 * I, -p.a1 + p.e0 * S - p.d1 * P, -p.d1 * I};
  J[2] = {r * p.d2 * Sr1 * P, p.d3 * P, -p.a2 + p.d2 * Sr + p.d3 * I};
  return J;
}

double per_capita_growth(double S, double I, const Parameters& p) noexcept {
  return p.a0 * (1.0 - (S + I) / p.K) * (S - p.L);
}

Vec3 parameter_derivative(const State& x, const Parameters& p, ParamId id) {
  const double S = x.S, I = x.I, P = x.P;
  const double Sr = pow_r(S, p.r);
  switch (id) {
    case ParamId::a0: return {S * (1.0 - (S + I) / p.K) * (S - p.L), 0, 0};
    case ParamId::a1: return {0, -I, 0};
    case ParamId::a2: return {0, 0, -P};
    case ParamId::d0: return {-Sr * P, 0, 0};
    case ParamId::d1: return {0, -I * P, 0};
    case ParamId::d2: return {0, 0, Sr * P};
    case ParamId::d3: return {0, 0, I * P};
    case ParamId::e0: return {-S * I, S * I, 0};
    case ParamId::K: return {p.a0 * S * (S + I) * (S - p.L) / (p.K * p.K), 0, 0};
    case ParamId::L: return {-p.a0 * S * (1.0 - (S + I) / p.K), 0, 0};
    case ParamId::r: {
      const double lnS = S > 0.0 ? std::log(S) : 0.0;
      return {-p.d0 * Sr * lnS * P, 0, p.d2 * Sr * lnS * P};
    }
  }
  return {0, 0, 0};
}

SecondDerivatives second_derivatives(const State& x, const Parameters& p) {
  require_positive_S(x, "second_derivatives");
  const double S = x.S, I = x.I, P = x.P, r = p.r, c = p.a0 / p.K;
  const double Sr1 = std::pow(S, r - 1.0);
  const double Sr2 = Sr1 / S;
  SecondDerivatives h{};
  h.f1_SS = c * (2 * p.K - 6 * S + 2 * p.L - 2 * I) - p.d0 * r * (r - 1) * Sr2 * P;
  h.f1_SI = c * (p.L - 2 * S) - p.e0;
  h.f1_SP = -p.d0 * r * Sr1;
  h.f2_SI = p.e0;
  h.f2_IP = -p.d1;
  h.f3_SS = p.d2 * r * (r - 1) * Sr2 * P;
  h.f3_SP = p.d2 * r * Sr1;
  h.f3_IP = p.d3;
  return h;
}

ThirdDerivatives third_derivatives(const State& x, const Parameters& p) {
  require_positive_S(x, "third_derivatives");
  const double S = x.S, P = x.P, r = p.r, c = p.a0 / p.K;
  const double Sr2 = std::pow(S, r - 2.0);
  const double Sr3 = Sr2 / S;
  ThirdDerivatives t{};
  t.f1_SSS = -6 * c - p.d0 * r * (r - 1) * (r - 2) * Sr3 * P;
  t.f1_SSI = -2 * c;
  t.f1_SSP = -p.d0 * r * (r - 1) * Sr2;
  t.f3_SSS = p.d2 * r * (r - 1) * (r - 2) * Sr3 * P;
  t.f3_SSP = p.d2 * r * (r - 1) * Sr2;
  return t;
}

}  // namespace sipdyn
