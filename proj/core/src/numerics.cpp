#include "sipdyn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sipdyn {

namespace {

double eval_cubic(const CubicCoefficients& c, double x) noexcept {
  return ((x + c.omega1) * x + c.omega2) * x + c.omega3;
}

double polish_real(const CubicCoefficients& c, double x) noexcept {
  for (int it = 0; it < 4; ++it) {
    const double f = eval_cubic(c, x);
    const double df = (3 * x + 2 * c.omega1) * x + c.omega2;
    if (df == 0.0) break;
    const double nx = x - f / df;
    if (!std::isfinite(nx) || std::abs(eval_cubic(c, nx)) >= std::abs(f)) break;
    x = nx;
  }
  return x;
}

}  // namespace

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: break;
  }
  return "marginal";
}

CubicCoefficients char_coeffs(const Matrix3& J) noexcept {
  const double tr = J[0][0] + J[1][1] + J[2][2];
  const double minors = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) +
                        (J[0][0] * J[2][2] - J[0][2] * J[2][0]) +
                        (J[1][1] * J[2][2] - J[1][2] * J[2][1]);
  return {-tr, minors, -det3(J)};
}

EigenTriple cubic_roots(const CubicCoefficients& c) noexcept {
  const double a = c.omega1, b = c.omega2;
  // depressed cubic t^3 + p t + q with lambda = t - a/3
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c.omega3;
  const double disc = q * q / 4.0 + p * p * p / 27.0;

  std::array<cplx, 3> roots;
  if (disc < 0.0) {
    // three distinct real roots
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
      roots[k] = polish_real(c, t - shift);
    }
  } else {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 - std::copysign(sq, q == 0.0 ? 1.0 : q));
    const double t = u == 0.0 ? 0.0 : u - p / (3.0 * u);
    const double x = polish_real(c, t - shift);
    // deflate: lambda^2 + B lambda + C
    const double B = a + x;
    const double C = b + x * B;
    const double d = B * B / 4.0 - C;
    roots[0] = x;
    if (d >= 0.0) {
      const double s = std::sqrt(d);
      const double y1 = -B / 2.0 - std::copysign(s, B == 0.0 ? 1.0 : B);
      const double y2 = y1 != 0.0 ? C / y1 : 0.0;
      roots[1] = polish_real(c, y1);
      roots[2] = polish_real(c, y2);
    } else {
      const double im = std::sqrt(-d);
      roots[1] = cplx(-B / 2.0, im);
      roots[2] = cplx(-B / 2.0, -im);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const cplx& l, const cplx& r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
  });
  return EigenTriple{roots};
}

EigenTriple eig3(const Matrix3& J) noexcept { return cubic_roots(char_coeffs(J)); }

double hopf_margin(const CubicCoefficients& c) noexcept {
  return c.omega1 * c.omega2 - c.omega3;
}

RouthHurwitz routh_hurwitz(const CubicCoefficients& c, double tau) noexcept {
  RouthHurwitz out;
  out.margins = {c.omega1, c.omega3, hopf_margin(c)};
  const bool any_negative = std::any_of(out.margins.begin(), out.margins.end(),
                                        [tau](double m) { return m < -tau; });
  const bool any_small = std::any_of(out.margins.begin(), out.margins.end(),
                                     [tau](double m) { return std::abs(m) <= tau; });
  out.verdict = any_negative ? Verdict::unstable
                             : (any_small ? Verdict::marginal : Verdict::stable);
  return out;
}

double bisect(const ScalarFunction& f, double a, double b, double tol, int max_iter) {
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> bracketed_roots(const ScalarFunction& f, double a, double b, int n,
                                    double tol) {
  std::vector<double> roots;
  if (!(a < b) || n < 2) return roots;
  const double dx = (b - a) / (n - 1);
  double x0 = a;
  double f0 = f(x0);
  for (int i = 1; i < n; ++i) {
    const double x1 = i == n - 1 ? b : a + i * dx;
    const double f1 = f(x1);
    if (std::isfinite(f0) && std::isfinite(f1)) {
      if (f0 == 0.0) {
        roots.push_back(x0);
      } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
        roots.push_back(bisect(f, x0, x1, tol));
      }
    }
    x0 = x1;
    f0 = f1;
  }
  if (f0 == 0.0) roots.push_back(x0);
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || r - out.back() > 10.0 * tol) out.push_back(r);
  }
  return out;
}

double det3(const Matrix3& A) noexcept {
  return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
         A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
         A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
}

Matrix3 transpose(const Matrix3& A) noexcept {
  Matrix3 T{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) T[i][j] = A[j][i];
  return T;
}

Vec3 matvec(const Matrix3& A, const Vec3& x) noexcept {
  Vec3 y{};
  for (int i = 0; i < 3; ++i) y[i] = A[i][0] * x[0] + A[i][1] * x[1] + A[i][2] * x[2];
  return y;
}

double dot(const Vec3& a, const Vec3& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace sipdyn
