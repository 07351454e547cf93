#pragma once

// First Lyapunov coefficient from finite-difference multilinear forms,
// extended to complex arguments by multilinearity.

#include <complex>
#include <stdexcept>

#include "sipdyn/numerics.hpp"
#include "support/oracles.hpp"

namespace oracle {

using C = std::complex<double>;
using CV = std::array<C, 3>;

inline Vec3 re(const CV& v) { return {v[0].real(), v[1].real(), v[2].real()}; }
inline Vec3 im(const CV& v) { return {v[0].imag(), v[1].imag(), v[2].imag()}; }

inline Vec3 sum(std::initializer_list<Vec3> vs) {
  Vec3 out{};
  for (const Vec3& v : vs)
    for (int i = 0; i < 3; ++i) out[i] += v[i];
  return out;
}

// C(u, v, w) from the cubic form c(x) = C(x, x, x)
inline Vec3 fd_trilinear(const Vec3& x, const Parameters& p, const Vec3& u, const Vec3& v,
                         const Vec3& w) {
  auto c = [&](const Vec3& d) { return fd_cubic(x, p, d); };
  const Vec3 uvw = c(sum({u, v, w})), uv = c(sum({u, v})), uw = c(sum({u, w})), vw = c(sum({v, w}));
  const Vec3 cu = c(u), cv = c(v), cw = c(w);
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = (uvw[i] - uv[i] - uw[i] - vw[i] + cu[i] + cv[i] + cw[i]) / 6.0;
  return out;
}

inline CV complex_bilinear(const Vec3& x, const Parameters& p, const CV& a, const CV& b) {
  const Vec3 ar = re(a), ai = im(a), br = re(b), bi = im(b);
  const Vec3 rr = fd_bilinear(x, p, ar, br), ri = fd_bilinear(x, p, ar, bi);
  const Vec3 ir = fd_bilinear(x, p, ai, br), ii = fd_bilinear(x, p, ai, bi);
  CV out{};
  for (int i = 0; i < 3; ++i) out[i] = C(rr[i] - ii[i], ri[i] + ir[i]);
  return out;
}

inline CV complex_trilinear(const Vec3& x, const Parameters& p, const CV& a, const CV& b, const CV& c) {
  CV out{};
  const std::array<Vec3, 2> A{re(a), im(a)}, B{re(b), im(b)}, Cc{re(c), im(c)};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const C coef = std::pow(C(0, 1), i + j + k);
        const Vec3 t = fd_trilinear(x, p, A[i], B[j], Cc[k]);
        for (int n = 0; n < 3; ++n) out[n] += coef * t[n];
      }
  return out;
}

inline C herm(const CV& a, const CV& b) {
  C s{};
  for (int i = 0; i < 3; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline std::array<CV, 3> shifted(const Matrix3& A, C s) {
  std::array<CV, 3> M{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M[i][j] = A[i][j] - (i == j ? s : C{});
  return M;
}

inline double first_lyapunov(const Vec3& x, const Parameters& p) {
  const Matrix3 A = fd_jacobian(x, p, 1e-7);
  const auto ev = sipdyn::eig3(A);
  double omega = 0.0;
  for (const auto& v : ev) omega = std::max(omega, v.imag());
  if (omega <= 0) throw std::runtime_error("no complex pair");
  const C iw(0, omega);

  CV q = sipdyn::null_vector<C>(shifted(A, iw));
  const double qn = std::sqrt(herm(q, q).real());
  for (auto& c : q) c /= qn;
  Matrix3 At{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) At[i][j] = A[j][i];
  CV pv = sipdyn::null_vector<C>(shifted(At, -iw));
  const C pq = herm(pv, q);
  for (auto& c : pv) c /= std::conj(pq);

  CV qb{};
  for (int i = 0; i < 3; ++i) qb[i] = std::conj(q[i]);
  auto a = sipdyn::solve<C, 3>(shifted(A, 0.0), complex_bilinear(x, p, q, qb));
  auto b = sipdyn::solve<C, 3>(shifted(A, 2.0 * iw), complex_bilinear(x, p, q, q));
  if (!a || !b) throw std::runtime_error("singular");
  for (auto& c : *b) c = -c;
  const C c1 = herm(pv, complex_trilinear(x, p, q, q, qb)) - 2.0 * herm(pv, complex_bilinear(x, p, q, *a)) +
               herm(pv, complex_bilinear(x, p, qb, *b));
  return c1.real() / (2.0 * omega);
}

}  // namespace oracle
