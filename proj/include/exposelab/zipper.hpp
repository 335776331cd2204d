#pragma once
// Conformal mapping of a Jordan region by composed elementary slit maps
// ("geodesic zipper"): the region is described by an ordered counterclockwise
// node list; an opening square root sends the first two nodes to 0 and
// infinity, each later node is absorbed by a circular-arc slit closer, and a
// terminal corner map plus a Cayley transform land on the unit disk.
//
// The engine is built for regions whose Riemann map must be evaluated
// *extremely* close to one marked boundary node (far closer than machine
// epsilon allows in the plain representation).  Evaluation therefore takes the
// *gap* g and computes the image of 1 - g on a chart-by-chart basis, anchored
// at the marked node's tracked image in every intermediate chart, switching to
// plain arithmetic once the running gap is large enough to be representable.
//
// Everything is templated on the scalar so the same code runs in long double
// (default) or __float128 (for severely pinched regions).

#include <quadmath.h>

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "exposelab/common.hpp"

namespace exposelab {

// ---------------------------------------------------------------------------
// Scalar traits and a minimal complex type usable with __float128.
// ---------------------------------------------------------------------------
template <typename Real>
struct RealOps;

template <>
struct RealOps<double> {
  static double sqrt(double x) { return std::sqrt(x); }
  static double fabs(double x) { return std::fabs(x); }
  static double hypot(double x, double y) { return std::hypot(x, y); }
  static double exp(double x) { return std::exp(x); }
};

template <>
struct RealOps<long double> {
  static long double sqrt(long double x) { return std::sqrt(x); }
  static long double fabs(long double x) { return std::fabs(x); }
  static long double hypot(long double x, long double y) {
    return std::hypot(x, y);
  }
  static long double exp(long double x) { return std::exp(x); }
};

template <>
struct RealOps<__float128> {
  static __float128 sqrt(__float128 x) { return sqrtq(x); }
  static __float128 fabs(__float128 x) { return fabsq(x); }
  static __float128 hypot(__float128 x, __float128 y) { return hypotq(x, y); }
  static __float128 exp(__float128 x) { return expq(x); }
};

template <typename Real>
struct Cx {
  Real re{}, im{};

  Cx() = default;
  Cx(Real r, Real i) : re(r), im(i) {}
  explicit Cx(Real r) : re(r), im(Real(0)) {}
  explicit Cx(cplx z) : re(Real(z.real())), im(Real(z.imag())) {}

  cplx to_cplx() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

template <typename R>
inline Cx<R> operator+(Cx<R> a, Cx<R> b) {
  return {a.re + b.re, a.im + b.im};
}
template <typename R>
inline Cx<R> operator-(Cx<R> a, Cx<R> b) {
  return {a.re - b.re, a.im - b.im};
}
template <typename R>
inline Cx<R> operator-(Cx<R> a) {
  return {-a.re, -a.im};
}
template <typename R>
inline Cx<R> operator*(Cx<R> a, Cx<R> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <typename R>
inline Cx<R> operator*(R s, Cx<R> a) {
  return {s * a.re, s * a.im};
}
template <typename R>
inline Cx<R> operator*(Cx<R> a, R s) {
  return {a.re * s, a.im * s};
}
template <typename R>
inline Cx<R> operator+(R s, Cx<R> a) {
  return {s + a.re, a.im};
}
template <typename R>
inline Cx<R> operator-(R s, Cx<R> a) {
  return {s - a.re, -a.im};
}
template <typename R>
inline Cx<R> operator+(Cx<R> a, R s) {
  return {a.re + s, a.im};
}
template <typename R>
inline Cx<R> operator-(Cx<R> a, R s) {
  return {a.re - s, a.im};
}

// Smith's algorithm; keeps relative accuracy over the full exponent range.
template <typename R>
inline Cx<R> operator/(Cx<R> a, Cx<R> b) {
  if (RealOps<R>::fabs(b.re) >= RealOps<R>::fabs(b.im)) {
    const R r = b.im / b.re;
    const R den = b.re + b.im * r;
    return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
  }
  const R r = b.re / b.im;
  const R den = b.re * r + b.im;
  return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
}
template <typename R>
inline Cx<R> operator/(Cx<R> a, R s) {
  return {a.re / s, a.im / s};
}
template <typename R>
inline Cx<R> operator/(R s, Cx<R> b) {
  return Cx<R>(s) / b;
}

template <typename R>
inline Cx<R> conj(Cx<R> a) {
  return {a.re, -a.im};
}
template <typename R>
inline R norm2(Cx<R> a) {
  return a.re * a.re + a.im * a.im;
}
template <typename R>
inline R cabs(Cx<R> a) {
  return RealOps<R>::hypot(a.re, a.im);
}

// Principal square root (branch cut on the negative real axis).
template <typename R>
inline Cx<R> psqrt(Cx<R> z) {
  const R mag = cabs(z);
  if (mag == R(0)) return {R(0), R(0)};
  if (z.re >= R(0)) {
    const R x = RealOps<R>::sqrt((mag + z.re) / R(2));
    return {x, z.im / (R(2) * x)};
  }
  R y = RealOps<R>::sqrt((mag - z.re) / R(2));
  if (z.im < R(0)) y = -y;
  return {z.im / (R(2) * y), y};
}

// ---------------------------------------------------------------------------
// GeodesicZipper
// ---------------------------------------------------------------------------
template <typename Real>
class GeodesicZipper {
 public:
  using C = Cx<Real>;

  // Composed map evaluated at 1 - gap on the unit disk, with the rotation
  // pinned so that gap = 0 corresponds exactly to the marked anchor node.
  struct Eval {
    C value;   // image point in the region's plane
    C dvalue;  // derivative with respect to the gap
  };

  // nodes: counterclockwise boundary sample of a Jordan region;
  // anchor_index: the node at which near-boundary evaluation is anchored;
  // interior_ref: an interior point, sent to the disk center.
  static GeodesicZipper build(const std::vector<C>& nodes, int anchor_index,
                              C interior_ref) {
    GeodesicZipper zip;
    const int n = static_cast<int>(nodes.size());
    require(n >= 16, "geodesic zipper: need at least 16 nodes");
    require(anchor_index >= 3 && anchor_index <= n - 3,
            "geodesic zipper: anchor node too close to the opening seam");
    zip.nodes_ = nodes;
    zip.anchor_ = anchor_index;
    const C p0 = nodes[0], p1 = nodes[1];
    zip.p0_ = p0;
    zip.p1_ = p1;

    // Opening square root: p0 -> infinity, p1 -> 0; track one branch along
    // the remaining nodes by keeping consecutive images close.  The opened
    // boundary chain avoids the real axis (only the seam endpoints are
    // real), so by continuity it lies entirely in one half-plane; the
    // counterclockwise orientation picks the upper one, and the opened
    // region then sits in the upper half-plane as well.
    std::vector<C> live(n);
    for (int j = 2; j < n; ++j) {
      C s = psqrt((nodes[j] - p1) / (nodes[j] - p0));
      if (j > 2) {
        const C prev = live[j - 1];
        if (norm2(s - prev) > norm2(s + prev)) s = -s;
      }
      live[j] = s;
    }
    require(live[2].im != Real(0),
            "geodesic zipper: opened chain starts on the real axis");
    if (live[2].im < Real(0))
      for (int j = 2; j < n; ++j) live[j] = -live[j];
    C ref = psqrt((interior_ref - p1) / (interior_ref - p0));
    if (ref.im < Real(0)) ref = -ref;
    require(ref.im > Real(0),
            "geodesic zipper: interior reference opened onto the real axis");
    C dref = (p1 - p0) / ((interior_ref - p0) * (interior_ref - p0) *
                          (Real(2) * ref));

    zip.stages_.reserve(n - 2);
    C apex_cur = live[anchor_index];
    zip.s_anchor_ = apex_cur;
    bool e_finite = false;
    Real e_val = Real(0);

    for (int k = 2; k < n; ++k) {
      const C c = live[k];
      if (!(c.im > Real(0)))
        fail("geodesic zipper: a node image left the upper half-plane "
             "(node count or precision insufficient for this region)");
      Stage st;
      const Real c2 = norm2(c);
      if (RealOps<Real>::fabs(c.re) < Real(1e-14) * cabs(c)) {
        st.mobius_identity = true;
        st.x0 = Real(0);
        st.h = c.im;
      } else {
        st.x0 = c2 / (Real(2) * c.re);
        st.h = c2 / c.im;
      }

      // Anchor bookkeeping: the marked node's image before, between, and
      // after this stage (exact by construction at its own and the next
      // stage, where rounding would otherwise be amplified by the branch
      // point).
      if (k < anchor_index) {
        st.a_pre = apex_cur;
        const auto fwd = apply(st, apex_cur);
        st.a_mid = fwd.w;
        st.a_post = fwd.y;
        apex_cur = fwd.y;
      } else if (k == anchor_index) {
        st.a_pre = c;
        st.a_mid = C(Real(0), st.h);
        st.a_post = C(Real(0), Real(0));
        apex_cur = st.a_post;
      } else if (k == anchor_index + 1) {
        st.base_stage = true;
        st.a_pre = C(Real(0), Real(0));
        st.a_mid = C(Real(0), Real(0));
        st.a_post = C(-st.h, Real(0));
        apex_cur = st.a_post;
      } else {
        st.a_pre = apex_cur;
        const auto fwd = apply(st, apex_cur);
        st.a_mid = fwd.w;
        st.a_post = fwd.y;
        apex_cur = fwd.y;
      }

      for (int j = k + 1; j < n; ++j) live[j] = apply(st, live[j]).y;

      {
        const auto fwd = apply(st, ref);
        C factor = fwd.w / fwd.y;  // d s_h / dw = w / y
        if (!st.mobius_identity) {
          const C rfac = (Real(2) * st.x0) / (Real(2) * st.x0 - ref);
          factor = factor * (rfac * rfac);
        }
        dref = dref * factor;
        ref = fwd.y;
      }

      if (e_finite) {
        e_val = apply_real(st, e_val);
      } else if (!st.mobius_identity) {
        // The opening sent node 0 to infinity; the first non-degenerate
        // Moebius brings it to -2 x0, after which it rides the real axis.
        const Real w = -Real(2) * st.x0;
        e_val = w * RealOps<Real>::sqrt(Real(1) + (st.h / w) * (st.h / w));
        e_finite = true;
      }
      zip.stages_.push_back(st);
    }
    require(e_finite, "geodesic zipper: seam endpoint never left infinity");
    zip.E_ = e_val;

    // Terminal corner: Moebius sending the seam endpoint to infinity, then a
    // square; the sign puts the interior reference in the upper half-plane.
    const C wq_ref = ref * (e_val / (e_val - ref));
    if (!(wq_ref.im > Real(0)))
      fail("geodesic zipper: interior reference left the upper half-plane at "
           "the terminal stage");
    zip.sq_ = (wq_ref.re < Real(0)) ? Real(-1) : Real(1);
    const C vref = zip.sq_ * (wq_ref * wq_ref);
    if (!(vref.im > Real(0)))
      fail("geodesic zipper: terminal corner map failed to open the region");
    {
      const C efac = e_val / (e_val - ref);
      dref = dref * (zip.sq_ * Real(2)) * wq_ref * (efac * efac);
    }
    zip.q_ = vref;

    const Real a_last = apex_cur.re;  // real after its own stage
    zip.a_last_ = a_last;
    zip.a_q_ = a_last * (e_val / (e_val - a_last));
    zip.w_apex_ = zip.sq_ * zip.a_q_ * zip.a_q_;

    const C w_apex_c{zip.w_apex_, Real(0)};
    zip.zeta_a_ = (w_apex_c - zip.q_) / (w_apex_c - conj(zip.q_));
    zip.one_minus_zeta_a_ =
        C(Real(0), Real(2) * zip.q_.im) / (w_apex_c - conj(zip.q_));

    // After the terminal stage the reference sits at q, so the Cayley factor
    // is exactly C'(q) = 1 / (2 i Im q).
    dref = dref / C(Real(0), Real(2) * zip.q_.im);
    zip.deriv0_ = zip.zeta_a_ / dref;
    return zip;
  }

  // Image of 1 - gap under the map normalized by (interior_ref -> 0,
  // anchor node -> 1).  gap = 0 returns the anchor node bit-exactly.
  Eval eval_at_gap(C gap, bool want_derivative) const {
    Eval out;
    C dacc{Real(1), Real(0)};

    if (gap.re == Real(0) && gap.im == Real(0)) {
      out.value = nodes_[anchor_];
      out.dvalue = C(Real(0), Real(0));
      if (want_derivative)
        out.dvalue = eval_at_gap(C(Real(1e-30), Real(0)), true).dvalue;
      return out;
    }

    // Cayley inverse, anchored at the marked node's boundary image.
    const C w_apex_c{w_apex_, Real(0)};
    const C one_minus_zeta = one_minus_zeta_a_ + zeta_a_ * gap;
    C gamma = -(zeta_a_ * gap) * (w_apex_c - conj(q_)) / one_minus_zeta;
    if (want_derivative) {
      dacc = -(zeta_a_ * C(Real(0), Real(2) * q_.im)) /
             (one_minus_zeta * one_minus_zeta);
    }

    bool anchored = true;
    C cur{};  // plain-mode running point

    // Terminal corner inverse.
    {
      const Real aq2 = a_q_ * a_q_;
      const C eta = (sq_ / aq2) * gamma;
      C wq_pt;
      if (anchored && cabs(eta) <= Real(0.25)) {
        const C root = psqrt(Real(1) + eta);
        const C gq = a_q_ * (eta / (Real(1) + root));
        wq_pt = a_q_ + gq;
        // Factored to keep intermediates at the chart scale (the raw
        // products overflow once the half-plane charts grow huge).
        const C d1 = E_ + a_q_ + gq;
        const Real d2 = E_ + a_q_;
        gamma = gq * (E_ / d1) * (E_ / d2);
      } else {
        const C v = w_apex_c + gamma;
        wq_pt = (sq_ > Real(0)) ? psqrt(v) : -psqrt(-v);
        cur = wq_pt * (E_ / (E_ + wq_pt));
        anchored = false;
      }
      if (want_derivative) {
        const C efac = E_ / (E_ + wq_pt);
        dacc = dacc * (sq_ / (Real(2) * wq_pt)) * (efac * efac);
      }
    }

    // Slit closers, last to first.
    for (int t = static_cast<int>(stages_.size()) - 1; t >= 0; --t) {
      const Stage& st = stages_[t];
      C y_pt, w_pt;
      if (anchored) {
        y_pt = st.a_post + gamma;
        bool ok;
        C gmid;
        if (st.base_stage) {
          // Branch point of the previous slit: gap shrinks quadratically.
          const C ga = gamma / st.h;
          const C gb = (Real(2) * st.a_post + gamma) / st.h;
          const C prod = ga * gb;
          ok = cabs(prod) <= Real(0.09);
          if (ok) gmid = (-st.h) * psqrt(prod);
        } else {
          const C eta =
              (gamma / st.a_mid) * ((Real(2) * st.a_post + gamma) / st.a_mid);
          ok = cabs(eta) <= Real(0.25);
          if (ok) {
            const C root = psqrt(Real(1) + eta);
            gmid = st.a_mid * (eta / (Real(1) + root));
          }
        }
        if (ok) {
          w_pt = st.a_mid + gmid;
          if (st.mobius_identity) {
            gamma = gmid;
          } else {
            const C d1 = Real(2) * st.x0 + st.a_mid + gmid;
            const C d2 = Real(2) * st.x0 + st.a_mid;
            gamma = gmid * ((Real(2) * st.x0) / d1) * ((Real(2) * st.x0) / d2);
          }
        } else {
          anchored = false;
          cur = y_pt;
        }
      }
      if (!anchored) {
        C y = cur;
        // The exact path stays in the open upper half-plane; keep rounding
        // noise from crossing the slit chart's branch cut.
        if (y.im <= Real(0)) y.im = Real(2) * eps() * cabs(y);
        const C r = C(st.h, Real(0)) / y;
        const C w = y * psqrt(Real(1) - r * r);
        y_pt = y;
        w_pt = w;
        cur = st.mobius_identity
                  ? w
                  : w * ((Real(2) * st.x0) / (Real(2) * st.x0 + w));
      }
      if (want_derivative) {
        C factor = y_pt / w_pt;
        if (!st.mobius_identity) {
          const C rfac = (Real(2) * st.x0) / (Real(2) * st.x0 + w_pt);
          factor = factor * (rfac * rfac);
        }
        dacc = dacc * factor;
      }
    }

    // Opening inverse.
    const C s = anchored ? (s_anchor_ + gamma) : cur;
    const C s2 = s * s;
    const C one_minus_s2 = Real(1) - s2;
    out.value = (p1_ - p0_ * s2) / one_minus_s2;
    if (want_derivative) {
      const C dz_ds =
          Real(2) * s * (p1_ - p0_) / (one_minus_s2 * one_minus_s2);
      dacc = dacc * dz_ds;
    }
    out.dvalue = dacc;
    return out;
  }

  // Derivative of the normalized disk map at the disk center.
  C derivative_at_center() const { return deriv0_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<C>& nodes() const { return nodes_; }
  int anchor_index() const { return anchor_; }
  // Diagnostics: seam endpoint image and the disk-center image in the final
  // half-plane chart.  Useful for scale/health checks in tests.
  Real seam_image() const { return E_; }
  C center_image() const { return q_; }

 private:
  static Real eps() {
    if constexpr (sizeof(Real) == sizeof(double) &&
                  std::is_same_v<Real, double>) {
      return Real(2.3e-16);
    } else if constexpr (std::is_same_v<Real, long double>) {
      return Real(1.1e-19);
    } else {
      return Real(1.93e-34);
    }
  }

  struct Stage {
    Real x0{}, h{};
    bool mobius_identity = false;
    bool base_stage = false;
    C a_pre{}, a_mid{}, a_post{};
  };

  struct FwdOut {
    C w, y;
  };

  static FwdOut apply(const Stage& st, C x) {
    const C w = st.mobius_identity
                    ? x
                    : x * ((Real(2) * st.x0) / (Real(2) * st.x0 - x));
    const C r = C(st.h, Real(0)) / w;
    const C y = w * psqrt(Real(1) + r * r);
    return {w, y};
  }

  static Real apply_real(const Stage& st, Real x) {
    const Real w = st.mobius_identity
                       ? x
                       : x * (Real(2) * st.x0 / (Real(2) * st.x0 - x));
    const Real r = st.h / w;
    return w * RealOps<Real>::sqrt(Real(1) + r * r);
  }

  std::vector<C> nodes_;
  std::vector<Stage> stages_;
  int anchor_ = 0;
  C p0_{}, p1_{};
  C s_anchor_{};
  Real E_ = Real(0);
  Real sq_ = Real(1);
  C q_{};
  Real a_last_ = Real(0), a_q_ = Real(0), w_apex_ = Real(0);
  C zeta_a_{}, one_minus_zeta_a_{};
  C deriv0_{};
};

}  // namespace exposelab
