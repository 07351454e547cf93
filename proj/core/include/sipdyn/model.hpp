#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace sipdyn {

using Vec3 = std::array<double, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

template <class T>
using Vec3T = std::array<T, 3>;

enum class ParamId { a0, a1, a2, d0, d1, d2, d3, e0, K, L, r };

inline constexpr std::array<ParamId, 11> kAllParams = {
    ParamId::a0, ParamId::a1, ParamId::a2, ParamId::d0, ParamId::d1, ParamId::d2,
    ParamId::d3, ParamId::e0, ParamId::K,  ParamId::L,  ParamId::r};

std::string_view param_name(ParamId id) noexcept;
std::optional<ParamId> find_param(std::string_view name) noexcept;
// Throws ValidationError on an unknown name.
ParamId parse_param(std::string_view name);

// Model constants. Defaults are the baseline set used throughout the figures.
struct Parameters {
  double a0 = 3.0;
  double a1 = 0.4;
  double a2 = 0.8;
  double d0 = 0.4;
  double d1 = 0.7;
  double d2 = 0.3;
  double d3 = 0.4;
  double e0 = 0.9;
  double K = 4.0;
  double L = -0.5;
  double r = 0.5;

  double get(ParamId id) const noexcept;
  double& ref(ParamId id) noexcept;
  Parameters with(ParamId id, double value) const noexcept {
    Parameters out = *this;
    out.ref(id) = value;
    return out;
  }

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Rates positive, 0 < r < 1, -K < L < K. Throws ValidationError.
void validate(const Parameters& p);

struct State {
  double S = 0.0;
  double I = 0.0;
  double P = 0.0;

  Vec3 vec() const noexcept { return {S, I, P}; }
  static State from(const Vec3& v) noexcept { return {v[0], v[1], v[2]}; }
  double operator[](std::size_t i) const noexcept { return i == 0 ? S : (i == 1 ? I : P); }

  friend bool operator==(const State&, const State&) = default;
};

// S^r with 0^r := 0.
inline double pow_r(double S, double r) noexcept { return S > 0.0 ? std::pow(S, r) : 0.0; }

Vec3 rhs(const Vec3& x, const Parameters& p) noexcept;
inline Vec3 rhs(const State& x, const Parameters& p) noexcept { return rhs(x.vec(), p); }

// Throws SingularStateError when S <= 0.
Matrix3 jacobian(const State& x, const Parameters& p);

double per_capita_growth(double S, double I, const Parameters& p) noexcept;

// Partial derivative of the vector field with respect to one constant.
Vec3 parameter_derivative(const State& x, const Parameters& p, ParamId id);

// Nonzero second partials at a point, by component and variable pair.
struct SecondDerivatives {
  double f1_SS, f1_SI, f1_SP;
  double f2_SI, f2_IP;
  double f3_SS, f3_SP, f3_IP;
};

struct ThirdDerivatives {
  double f1_SSS, f1_SSI, f1_SSP;
  double f3_SSS, f3_SSP;
};

SecondDerivatives second_derivatives(const State& x, const Parameters& p);
ThirdDerivatives third_derivatives(const State& x, const Parameters& p);

// B(u, v) = D^2 f(x)[u, v]
template <class T>
Vec3T<T> bilinear(const SecondDerivatives& h, const Vec3T<T>& u, const Vec3T<T>& v) {
  const T uv00 = u[0] * v[0];
  const T uv01 = u[0] * v[1] + u[1] * v[0];
  const T uv02 = u[0] * v[2] + u[2] * v[0];
  const T uv12 = u[1] * v[2] + u[2] * v[1];
  return {h.f1_SS * uv00 + h.f1_SI * uv01 + h.f1_SP * uv02,
          h.f2_SI * uv01 + h.f2_IP * uv12,
          h.f3_SS * uv00 + h.f3_SP * uv02 + h.f3_IP * uv12};
}

// C(u, v, w) = D^3 f(x)[u, v, w]
template <class T>
Vec3T<T> trilinear(const ThirdDerivatives& c, const Vec3T<T>& u, const Vec3T<T>& v,
                   const Vec3T<T>& w) {
  const T sss = u[0] * v[0] * w[0];
  const T ssi = u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0];
  const T ssp = u[0] * v[0] * w[2] + u[0] * v[2] * w[0] + u[2] * v[0] * w[0];
  return {c.f1_SSS * sss + c.f1_SSI * ssi + c.f1_SSP * ssp, T{},
          c.f3_SSS * sss + c.f3_SSP * ssp};
}

}  // namespace sipdyn
