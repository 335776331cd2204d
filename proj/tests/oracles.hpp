#pragma once

// Independent finite-difference oracles used by the test suite. These are
// deliberately implemented from scratch (central differences on the real
// coordinates) so they share no code with the library's symbolic
// differentiation.

#include <complex>
#include <functional>
#include <vector>

#include "exposelab/common.hpp"

namespace oracles {

using exposelab::cplx;
using exposelab::CMat;
using exposelab::CVec;
using exposelab::RMat;
using exposelab::RVec;

using RealFn = std::function<double(const CVec&)>;
using MapFn = std::function<CVec(const CVec&)>;

inline CVec unit_step(int n, int k, cplx h) {
  CVec e = CVec::Zero(n);
  e(k) = h;
  return e;
}

// Wirtinger gradient dF/dz_k = (dF/dx_k - i dF/dy_k) / 2 by central
// differences.
inline CVec fd_wirtinger_grad(const RealFn& f, const CVec& z, double h) {
  const int n = static_cast<int>(z.size());
  CVec g(n);
  for (int k = 0; k < n; ++k) {
    const double fx = (f(z + unit_step(n, k, h)) - f(z - unit_step(n, k, h))) /
                      (2.0 * h);
    const double fy =
        (f(z + unit_step(n, k, cplx(0.0, h))) -
         f(z - unit_step(n, k, cplx(0.0, h)))) /
        (2.0 * h);
    g(k) = cplx(fx, -fy) / 2.0;
  }
  return g;
}

// Real 2n x 2n Hessian in coordinates (x_1..x_n, y_1..y_n) by central
// second differences. Roundoff in second differences scales like
// eps_machine * |f| / h^2, so accurate results need a step much larger than
// first-derivative lore suggests; fd_real_hessian_rich below removes the
// resulting h^2 truncation term by Richardson extrapolation.
inline RMat fd_real_hessian(const RealFn& f, const CVec& z, double h) {
  const int n = static_cast<int>(z.size());
  auto step = [&](int a) {  // a in [0, 2n): x_k for a<n, y_{k-n} otherwise
    return a < n ? unit_step(n, a, h) : unit_step(n, a - n, cplx(0.0, h));
  };
  RMat hess(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = a; b < 2 * n; ++b) {
      double v;
      if (a == b) {
        v = (f(z + step(a)) - 2.0 * f(z) + f(z - step(a))) / (h * h);
      } else {
        v = (f(z + step(a) + step(b)) - f(z + step(a) - step(b)) -
             f(z - step(a) + step(b)) + f(z - step(a) - step(b))) /
            (4.0 * h * h);
      }
      hess(a, b) = v;
      hess(b, a) = v;
    }
  }
  return hess;
}

inline RMat fd_real_hessian_rich(const RealFn& f, const CVec& z, double h) {
  const RMat coarse = fd_real_hessian(f, z, h);
  const RMat fine = fd_real_hessian(f, z, h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

// Recover the holomorphic Hessian H_ij = d2/dz_i dz_j and the Levi matrix
// L_ij = d2/dz_i dzbar_j from a real Hessian in (x, y) block form, inverting
//   XX =  2 Re H + 2 Re L,   YY = -2 Re H + 2 Re L,
//   XY = -2 Im H + 2 Im L,   YX = -2 Im H - 2 Im L.
inline void wirtinger_from_real_hessian(const RMat& real_hess, CMat& holo_hess,
                                        CMat& levi) {
  const int n = static_cast<int>(real_hess.rows()) / 2;
  holo_hess.resize(n, n);
  levi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double xx = real_hess(i, j);
      const double yy = real_hess(n + i, n + j);
      const double xy = real_hess(i, n + j);
      const double yx = real_hess(n + i, j);
      holo_hess(i, j) = cplx((xx - yy) / 4.0, -(xy + yx) / 4.0);
      levi(i, j) = cplx((xx + yy) / 4.0, (xy - yx) / 4.0);
    }
  }
}

// Complex Jacobian dF_i/dz_j and conjugate part dF_i/dzbar_j of a map by
// central differences; the conjugate part measures holomorphy defect.
inline void fd_map_jacobian(const MapFn& F, const CVec& z, double h,
                            CMat& dz, CMat& dzbar) {
  const int n = static_cast<int>(z.size());
  const CVec base = F(z);
  const int m = static_cast<int>(base.size());
  dz.resize(m, n);
  dzbar.resize(m, n);
  for (int j = 0; j < n; ++j) {
    const CVec fx =
        (F(z + unit_step(n, j, h)) - F(z - unit_step(n, j, h))) / (2.0 * h);
    const CVec fy = (F(z + unit_step(n, j, cplx(0.0, h))) -
                     F(z - unit_step(n, j, cplx(0.0, h)))) /
                    (2.0 * h);
    dz.col(j) = (fx - cplx(0.0, 1.0) * fy) / 2.0;
    dzbar.col(j) = (fx + cplx(0.0, 1.0) * fy) / 2.0;
  }
}

inline bool close_rel(double got, double want, double rel_tol,
                      double floor = 1.0) {
  return std::abs(got - want) <=
         rel_tol * std::max(floor, std::abs(want));
}

inline double max_entry_error(const CMat& got, const CMat& want) {
  return (got - want).cwiseAbs().maxCoeff();
}

}  // namespace oracles
