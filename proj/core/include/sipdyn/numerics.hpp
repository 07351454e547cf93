#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sipdyn/model.hpp"

namespace sipdyn {

using cplx = std::complex<double>;

// lambda^3 + omega1 lambda^2 + omega2 lambda + omega3
struct CubicCoefficients {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
};

// Sorted by descending real part, ties by descending imaginary part.
struct EigenTriple {
  std::array<cplx, 3> values{};

  const cplx& operator[](std::size_t i) const noexcept { return values[i]; }
  auto begin() const noexcept { return values.begin(); }
  auto end() const noexcept { return values.end(); }
};

enum class Verdict { stable, unstable, marginal };

std::string_view verdict_name(Verdict v) noexcept;

struct RouthHurwitz {
  Verdict verdict = Verdict::marginal;
  // omega1, omega3, omega1*omega2 - omega3
  std::array<double, 3> margins{};
};

inline constexpr double kMarginTolerance = 1e-9;

CubicCoefficients char_coeffs(const Matrix3& J) noexcept;
EigenTriple cubic_roots(const CubicCoefficients& c) noexcept;
EigenTriple eig3(const Matrix3& J) noexcept;
RouthHurwitz routh_hurwitz(const CubicCoefficients& c, double tau = kMarginTolerance) noexcept;

double hopf_margin(const CubicCoefficients& c) noexcept;

using ScalarFunction = std::function<double(double)>;

// Assumes f(a) and f(b) differ in sign (or one is zero).
double bisect(const ScalarFunction& f, double a, double b, double tol, int max_iter = 200);

std::vector<double> bracketed_roots(const ScalarFunction& f, double a, double b, int n, double tol);

double det3(const Matrix3& A) noexcept;
Matrix3 transpose(const Matrix3& A) noexcept;
Vec3 matvec(const Matrix3& A, const Vec3& x) noexcept;
double dot(const Vec3& a, const Vec3& b) noexcept;
double norm(const Vec3& a) noexcept;

// Null direction of a rank-2 matrix: the largest cross product of two rows.
// Works over any field, so also used for complex shifted matrices.
template <class T>
Vec3T<T> null_vector(const std::array<Vec3T<T>, 3>& M) {
  auto cross = [](const Vec3T<T>& a, const Vec3T<T>& b) {
    return Vec3T<T>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0]};
  };
  auto size2 = [](const Vec3T<T>& v) {
    double s = 0.0;
    for (const T& c : v) s += std::norm(c);
    return s;
  };
  Vec3T<T> best = cross(M[0], M[1]);
  for (const auto& c : {cross(M[0], M[2]), cross(M[1], M[2])}) {
    if (size2(c) > size2(best)) best = c;
  }
  return best;
}

// Gaussian elimination with partial pivoting. Empty on a singular system.
template <class T, std::size_t N>
std::optional<std::array<T, N>> solve(std::array<std::array<T, N>, N> A, std::array<T, N> b) {
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i) {
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    }
    if (std::abs(A[piv][k]) == 0.0) return std::nullopt;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < N; ++i) {
      const T f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < N; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::array<T, N> x{};
  for (std::size_t k = N; k-- > 0;) {
    T s = b[k];
    for (std::size_t j = k + 1; j < N; ++j) s -= A[k][j] * x[j];
    x[k] = s / A[k][k];
  }
  return x;
}

}  // namespace sipdyn
