#pragma once
// Conformal models of a two-lobed plane region ("dumbbell"): two unit disks
// joined by a thin straight neck with circular fillets.  The construction
// produces a pair of Riemann maps f, g from the unit disk onto the region,
// normalized so that f picks out one lobe center and g the other, together
// with the Moebius disk swap m for which g o m = f.  As the neck width
// shrinks the two lobes decouple: f converges to the right-lobe disk map on
// one side, g to the left-lobe disk map on the other, while the swap
// parameter r -> 1.  The interesting regime is extreme boundary crowding
// (1 - r far below machine epsilon), which the gap-based evaluator in
// zipper.hpp is built for; this header adds the region model, the square-root
// lift that halves the crowding exponents, and verified public evaluators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "exposelab/common.hpp"
#include "exposelab/onevar.hpp"
#include "exposelab/riemann.hpp"
#include "exposelab/zipper.hpp"

namespace exposelab {

// ---------------------------------------------------------------------------
// Polyline certificates (shared by the region builders below and by
// higher-level verification code).
// ---------------------------------------------------------------------------

// Winding number of a closed polyline about w0 (summed signed turning).
inline int polyline_winding(const std::vector<cplx>& poly, cplx w0) {
  const int n = static_cast<int>(poly.size());
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx d0 = poly[j] - w0;
    const cplx d1 = poly[(j + 1) % n] - w0;
    total += std::arg(d1 / d0);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// True when the closed polyline has no proper (transversal) self-intersection
// between non-adjacent segments.  Segments shorter than min_len are skipped,
// and orientation tests carry a scale-relative tolerance so that chains of
// near-duplicate points cannot produce spurious crossings.
inline bool polyline_is_simple(const std::vector<cplx>& poly,
                               double min_len = 1e-14) {
  const int n = static_cast<int>(poly.size());
  // Per-segment bounding boxes up front: the O(n^2) pair scan then touches
  // only comparisons until two boxes actually overlap.
  std::vector<double> x0(n), x1(n), y0(n), y1(n);
  std::vector<char> live(n);
  const double min2 = min_len * min_len;
  for (int i = 0; i < n; ++i) {
    const cplx p = poly[i], q = poly[(i + 1) % n];
    x0[i] = std::min(p.real(), q.real());
    x1[i] = std::max(p.real(), q.real());
    y0[i] = std::min(p.imag(), q.imag());
    y1[i] = std::max(p.imag(), q.imag());
    live[i] = std::norm(q - p) >= min2 ? 1 : 0;
  }
  auto cross = [](cplx a, cplx b) {
    return a.real() * b.imag() - a.imag() * b.real();
  };
  for (int i = 0; i < n; ++i) {
    if (!live[i]) continue;
    const cplx p = poly[i], pe = poly[(i + 1) % n];
    const cplx dp = pe - p;
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the seam
      if (!live[j]) continue;
      if (x1[i] < x0[j] || x1[j] < x0[i] || y1[i] < y0[j] || y1[j] < y0[i])
        continue;
      const cplx q = poly[j], qe = poly[(j + 1) % n];
      const cplx dq = qe - q;
      const double d1 = cross(dp, q - p);
      const double d2 = cross(dp, qe - p);
      const double d3 = cross(dq, p - q);
      const double d4 = cross(dq, pe - q);
      const double tol = 1e-12 * std::sqrt(std::norm(dp) * std::norm(dq));
      auto flips = [tol](double u, double v) {
        return (u > tol && v < -tol) || (u < -tol && v > tol);
      };
      if (flips(d1, d2) && flips(d3, d4)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Public types
// ---------------------------------------------------------------------------

struct DumbbellOptions {
  enum class Precision { Auto, Extended, Quad };
  Precision precision = Precision::Auto;
  int lobe_nodes = 48;    // nodes per lobe half-arc
  int fillet_nodes = 8;   // nodes per fillet
  int neck_nodes = 0;     // nodes per neck edge; 0 = choose from delta
  int table_size = 4096;  // boundary table attached to f and g (even)
  double table_gap = 1e-2;  // 1 - radius of the table sampling circle
  int cert_samples = 1024;  // uniform samples of the certificate polyline
  int cert_wings_per_decade = 48;  // log-spaced samples resolving the neck
  double cert_depth_factor = 1e-2;  // certificate depth: gap = factor*(1-r)
};

// Two unit-radius lobes centered at a and b joined by a straight neck of
// half-width 0.6*delta with circular fillets; conjugation-symmetric and
// symmetric about the midpoint (a+b)/2.
struct DumbbellRegion {
  double a = 0.0, b = 0.0, delta = 0.0;
  std::vector<cplx> boundary;  // counterclockwise polyline
};

struct DumbbellPair {
  OneVarMap f, g;  // Riemann maps of the unit disk onto the region
  double a = 0.0, b = 0.0, delta = 0.0;

  // Disk swap m(z) = (r - z) / (1 - r z) with g(m(z)) = f(z).  r itself may
  // round to 1 in double precision; one_minus_r carries the exact gap.
  double r_value = 0.0;
  double one_minus_r = 0.0;
  double u_gap = 0.0;  // gap 1 - z0 of the pivot point f^{-1}((a+b)/2)

  double f_at_minus_one = 0.0;  // = a - 1 exactly by construction
  double f_at_plus_one = 0.0;   // = b + 1 exactly by construction
  double consistency_sup = 0.0;  // sup |g(m(z)) - f(z)| over the probe grid
  double symmetry_defect = 0.0;  // sup |conj(f(conj z)) - f(z)|

  bool boundary_simple = false;  // certificate polyline has no self-crossing
  int winding_about_a = 0;       // certificate polyline winding about a
  int winding_about_b = 0;       // certificate polyline winding about b
  double certificate_gap = 0.0;  // 1 - radius of the certificate circle
  int certificate_points = 0;

  // Evaluates f(1 - gap) from the exact boundary gap: the image sweeps the
  // neck and the far lobe while 1 - gap is rounding to 1.0 in double, so
  // near-boundary work must be parametrized by the gap itself.
  std::function<cplx(cplx)> f_from_gap;

  int zipper_nodes = 0;
  DumbbellRegion region;
};

// ---------------------------------------------------------------------------
// Region geometry
// ---------------------------------------------------------------------------

namespace detail {

// Node layout of the normalized dumbbell W (lobes of radius 1 at +-c):
// right half traversed counterclockwise from (0, -wn) through the apex
// (c+1, 0).  Returned together with the index of the exact apex node.
template <typename Real>
struct WNodes {
  std::vector<Cx<Real>> right_half;
  int apex_in_right = 0;
  Real wn{}, rf{}, xc{};
};

template <typename Real>
WNodes<Real> build_w_nodes(Real c, Real delta, int m_l, int m_f, int m_n) {
  WNodes<Real> out;
  const Real wn = Real(0.6) * delta;
  const Real rf = wn / Real(2);
  const Real one = Real(1);
  const Real span = (one + rf) * (one + rf) - (wn + rf) * (wn + rf);
  require(span > Real(0), "dumbbell: neck too wide for unit lobes");
  const Real xc = c - RealOps<Real>::sqrt(span);
  require(xc > Real(0), "dumbbell: lobes overlap the neck midpoint");
  out.wn = wn;
  out.rf = rf;
  out.xc = xc;

  const double phi_t =
      std::atan2(static_cast<double>(wn + rf), static_cast<double>(xc - c));

  // Upper boundary from just past the apex to just before (0, wn).
  std::vector<Cx<Real>> upper;
  upper.reserve(m_l + m_f + m_n);
  for (int j = 1; j < m_l; ++j) {
    const double th = phi_t * j / m_l;
    upper.push_back(
        Cx<Real>(c + Real(std::cos(th)), Real(std::sin(th))));
  }
  const double a1 = phi_t - kPi;  // fillet angle at the lobe tangency
  const double a2 = -kPi / 2.0;   // fillet angle at the neck tangency
  for (int i = 0; i <= m_f; ++i) {
    const double al = a1 + (a2 - a1) * i / m_f;
    upper.push_back(Cx<Real>(xc + rf * Real(std::cos(al)),
                             wn + rf + rf * Real(std::sin(al))));
  }
  for (int j = 1; j < m_n; ++j) {
    // Quadratic clustering toward x = 0, where the squared image has its
    // tightest feature.
    const Real t = Real(1) - Real(j) / Real(m_n);
    upper.push_back(Cx<Real>(xc * t * t, wn));
  }

  auto& rh = out.right_half;
  rh.reserve(2 * upper.size() + 2);
  rh.push_back(Cx<Real>(Real(0), -wn));
  for (int j = static_cast<int>(upper.size()) - 1; j >= 0; --j)
    rh.push_back(conj(upper[j]));
  out.apex_in_right = static_cast<int>(rh.size());
  rh.push_back(Cx<Real>(c + Real(1), Real(0)));
  for (const auto& p : upper) rh.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------
// Core evaluator: f(z) = M + F(B(z)) where B is the disk automorphism moving
// the pivot z0 to 0, F(w) = sqrt(Ksym(w^2)) is the odd square-root lift of
// the zipper map of the squared region, and M is the region midpoint.
// All boundary-crowded quantities travel as gaps from 1.
// ---------------------------------------------------------------------------

struct DumbbellEvalBase {
  virtual ~DumbbellEvalBase() = default;
  virtual cplx fval(cplx z) const = 0;
  virtual cplx fderiv(cplx z) const = 0;
  virtual cplx fval_gap(cplx gap) const = 0;  // f(1 - gap), gap exact
};

template <typename Real>
class DumbbellCore final : public DumbbellEvalBase {
 public:
  using C = Cx<Real>;
  using Zip = GeodesicZipper<Real>;

  DumbbellCore(Zip zip, Real u, Real gap1, double mid, double c)
      : zip_(std::move(zip)), u_(u), gap1_(gap1), mid_(mid), c_(c) {
    kp0_ = zip_.derivative_at_center().re;  // symmetrized center derivative
  }

  struct KOut {
    C value, dvalue;
  };

  // Conjugation-symmetrized zipper map at 1 - gap, with d/dgap.
  KOut ksym(C gap, bool wd) const {
    const auto e1 = zip_.eval_at_gap(gap, wd);
    if (gap.im == Real(0))
      return {C(e1.value.re, Real(0)), C(e1.dvalue.re, Real(0))};
    const auto e2 = zip_.eval_at_gap(conj(gap), wd);
    return {(e1.value + conj(e2.value)) / Real(2),
            (e1.dvalue + conj(e2.dvalue)) / Real(2)};
  }

  struct FOut {
    C value, dvalue;  // F(B(z)) and its z-derivative
  };

  // Stable evaluation from the factors 1-z and 1+z (callers hand exact gap
  // forms of these when z itself is crowded against the boundary).
  FOut feval_parts(C z, C omz, C opz, bool wd) const {
    const Real kappa = u_ * (Real(2) - u_);
    const C d = omz + u_ * z;
    const C gap = kappa * omz * opz / (d * d);
    const C wb = (C(u_, Real(0)) - omz) / d;  // B(z)
    const auto kv = ksym(gap, wd);
    const C s = psqrt(kv.value);
    const C fv = pick_sign(s, wb);
    FOut out;
    out.value = fv;
    if (!wd) return out;
    if (cabs(wb) < Real(1e-9)) {
      // At the pivot F vanishes linearly; use F'(0) = sqrt(Ksym'(0)).
      const C bprime = kappa / (d * d);
      out.dvalue = psqrt(C(kp0_, Real(0))) * bprime;
    } else {
      const C gprime =
          kappa * ((Real(-2) * z) * d + (Real(2) * (Real(1) - u_)) * omz * opz) /
          (d * d * d);
      out.dvalue = kv.dvalue * gprime / (Real(2) * fv);
    }
    return out;
  }

  FOut feval(C z, bool wd) const {
    return feval_parts(z, Real(1) - z, Real(1) + z, wd);
  }

  cplx fval(cplx z) const override {
    const auto fe = feval(C(z), false);
    return cplx(mid_, 0.0) + fe.value.to_cplx();
  }

  cplx fderiv(cplx z) const override {
    return feval(C(z), true).dvalue.to_cplx();
  }

  cplx fval_gap(cplx gap) const override {
    const C g(gap);
    const auto fe = feval_parts(Real(1) - g, g, Real(2) - g, false);
    return cplx(mid_, 0.0) + fe.value.to_cplx();
  }

  // Sign selection for the odd square-root lift: away from the imaginary
  // axis the real parts of F and B(z) agree in sign (the lift maps the
  // imaginary diameter into the neck slot and nothing else crosses it);
  // on it, the imaginary parts do.
  static C pick_sign(C s, C w) {
    const bool re_dom =
        RealOps<Real>::fabs(w.re) >= Real(1e-12) * cabs(w);
    bool flip;
    if (re_dom)
      flip = (w.re < Real(0));  // principal sqrt has Re >= 0
    else
      flip = ((s.im >= Real(0)) != (w.im >= Real(0)));
    return flip ? -s : s;
  }

  const Zip& zipper() const { return zip_; }
  Real u() const { return u_; }
  Real gap1() const { return gap1_; }
  double mid() const { return mid_; }
  double lobe_offset() const { return c_; }
  Real center_deriv() const { return kp0_; }

 private:
  Zip zip_;
  Real u_, gap1_;
  double mid_, c_;
  Real kp0_{};
};

class DumbbellExactF final : public ExactOneVar {
 public:
  explicit DumbbellExactF(std::shared_ptr<const DumbbellEvalBase> core)
      : core_(std::move(core)) {}
  cplx eval(cplx z) const override { return core_->fval(z); }
  cplx deriv(cplx z) const override { return core_->fderiv(z); }

 private:
  std::shared_ptr<const DumbbellEvalBase> core_;
};

// g(z) = (a + b) - f(-z): the reflected lobe map, exact by symmetry.
class DumbbellExactG final : public ExactOneVar {
 public:
  DumbbellExactG(std::shared_ptr<const DumbbellEvalBase> core, double apb)
      : core_(std::move(core)), apb_(apb) {}
  cplx eval(cplx z) const override { return apb_ - core_->fval(-z); }
  cplx deriv(cplx z) const override { return core_->fderiv(-z); }

 private:
  std::shared_ptr<const DumbbellEvalBase> core_;
  double apb_;
};

template <typename Real>
DumbbellPair build_dumbbell(double a, double b, double delta,
                            const DumbbellOptions& opt) {
  using C = Cx<Real>;
  require(b - a > 2.0, "dumbbell: need b - a > 2 so the lobes are disjoint");
  require(delta > 0.0 && delta < 0.5, "dumbbell: delta must lie in (0, 0.5)");

  const double mid = 0.5 * (a + b);
  const double c_d = 0.5 * (b - a);
  const Real c = Real(c_d);

  int m_n = opt.neck_nodes;
  if (m_n <= 0)
    m_n = std::max(24, std::min(96, static_cast<int>(std::ceil(
                                        10.0 / std::sqrt(delta)))));
  const auto wn =
      detail::build_w_nodes<Real>(c, Real(delta), opt.lobe_nodes,
                                  opt.fillet_nodes, m_n);

  // Square the node set (exactly symmetric under conjugation) and rotate the
  // cyclic order so the opening seam falls on the bottom lobe arc, far from
  // both the apex and the neck.
  const int n = static_cast<int>(wn.right_half.size());
  std::vector<C> squared(n);
  for (int j = 0; j < n; ++j) {
    const C w = wn.right_half[j];
    squared[j] = C(w.re * w.re - w.im * w.im, Real(2) * w.re * w.im);
  }
  const C seam_target(c * c - Real(1), Real(-2) * c);
  int rot = 0;
  Real best = norm2(squared[0] - seam_target);
  for (int j = 1; j < n; ++j) {
    const Real d2 = norm2(squared[j] - seam_target);
    if (d2 < best) {
      best = d2;
      rot = j;
    }
  }
  std::vector<C> nodes(n);
  for (int j = 0; j < n; ++j) nodes[j] = squared[(rot + j) % n];
  const int apex_index = (wn.apex_in_right - rot + n) % n;

  auto zip = GeodesicZipper<Real>::build(nodes, apex_index, C(Real(0), Real(0)));

  // Solve Ksym(z2) = c^2 for the pivot z0 = sqrt(z2) = f^{-1}(mid) in gap
  // form: bisection in log(1 - z2), which brackets every neck width down to
  // gaps around e^-200.
  auto ksym_real = [&zip](Real gap) {
    return zip.eval_at_gap(Cx<Real>(gap, Real(0)), false).value.re;
  };
  const Real target = c * c;
  Real lo = Real(-200), hi = Real(-0.5);
  require(ksym_real(RealOps<Real>::exp(lo)) > target,
          "dumbbell: gap bracket lower end not past the pivot");
  require(ksym_real(RealOps<Real>::exp(hi)) < target,
          "dumbbell: gap bracket upper end not before the pivot");
  for (int it = 0; it < 120; ++it) {
    const Real mid_l = (lo + hi) / Real(2);
    if (ksym_real(RealOps<Real>::exp(mid_l)) > target)
      lo = mid_l;
    else
      hi = mid_l;
  }
  const Real u2 = RealOps<Real>::exp((lo + hi) / Real(2));
  const Real u = u2 / (Real(1) + RealOps<Real>::sqrt(Real(1) - u2));
  const Real gap1 = (u * u) / (Real(2) - Real(2) * u + u * u);

  auto core = std::make_shared<detail::DumbbellCore<Real>>(
      std::move(zip), u, gap1, mid, c_d);

  DumbbellPair out;
  out.a = a;
  out.b = b;
  out.delta = delta;
  out.zipper_nodes = n;
  out.u_gap = static_cast<double>(u);
  out.one_minus_r = static_cast<double>(gap1);
  out.r_value = static_cast<double>(Real(1) - gap1);

  out.f.attach_exact(std::make_shared<detail::DumbbellExactF>(core));
  out.g.attach_exact(
      std::make_shared<detail::DumbbellExactG>(core, a + b));
  out.f.set_real_symmetric(true);
  out.g.set_real_symmetric(true);

  // Boundary tables on the circle of radius 1 - table_gap.  The exact
  // evaluator keeps priority; the table backs the generic Cauchy-integral
  // machinery.  The sampling circle must stay far enough from z = 1 that the
  // tabulated data varies on scales the table resolves (the transit to the
  // far lobe compresses toward z = 1 exponentially fast in 1/delta), and g's
  // table reuses f's values through the exact point symmetry.
  {
    require(opt.table_size % 2 == 0 && opt.table_size >= 16,
            "dumbbell: table_size must be even and at least 16");
    require(opt.table_gap > 0.0 && opt.table_gap < 1.0,
            "dumbbell: table_gap must lie in (0, 1)");
    const double tg = opt.table_gap;
    CVec fv(opt.table_size), gv(opt.table_size);
    for (int j = 0; j < opt.table_size; ++j) {
      const double th = 2.0 * kPi * j / opt.table_size;
      const double sh = std::sin(0.5 * th);
      // 1 - z for z = (1 - tg) e^{i th}, assembled without cancellation.
      const cplx gap(tg + (1.0 - tg) * 2.0 * sh * sh,
                     -(1.0 - tg) * std::sin(th));
      fv(j) = core->fval_gap(gap);
    }
    for (int j = 0; j < opt.table_size; ++j)
      gv(j) = (a + b) - fv((j + opt.table_size / 2) % opt.table_size);
    out.f.attach_table(std::move(fv), 1.0 - tg);
    out.g.attach_table(std::move(gv), 1.0 - tg);
  }

  out.f_at_plus_one = core->fval(cplx(1.0, 0.0)).real();
  out.f_at_minus_one = core->fval(cplx(-1.0, 0.0)).real();

  // Swap consistency sup |g(m(z)) - f(z)| measured through the gap algebra:
  // with A = -m(z), both sides reduce to F-values, and 1 -+ A have exact
  // rational forms in gap1 that never round through 1.
  {
    Real sup = Real(0);
    const int n_ang = 32;
    for (double rad : {0.15, 0.45, 0.75, 0.92}) {
      for (int k = 0; k < n_ang; ++k) {
        const double th = 2.0 * kPi * (k + 0.31) / n_ang;
        const C z(Real(rad * std::cos(th)), Real(rad * std::sin(th)));
        const auto f1 = core->feval(z, false);
        const C omz = Real(1) - z, opz = Real(1) + z;
        const C one_minus_rz = omz + gap1 * z;
        const C eps_a = gap1 * opz / one_minus_rz;     // 1 - A
        const C two_m = Real(2) - eps_a;               // 1 + A
        const C a_pt = Real(1) - eps_a;
        const auto f2 = core->feval_parts(a_pt, eps_a, two_m, false);
        sup = std::max(sup, cabs(f2.value + f1.value));
      }
    }
    out.consistency_sup = static_cast<double>(sup);
  }

  out.symmetry_defect = out.f.real_symmetry_defect();

  out.f_from_gap = [core](cplx gap) { return core->fval_gap(gap); };

  // Image certificate: a closed curve just inside the disk whose image must
  // be simple with winding one about both lobe centers; by the argument
  // principle f is then injective on the enclosed region and covers both
  // centers.  At theta = 0 the curve dives to gap0 well below 1 - r, so its
  // image passes beyond b inside the far lobe; log-spaced wing samples
  // resolve the neck transit and the far lobe, whose preimage arc is
  // exponentially thin and invisible to any uniform sampling.  The depth
  // grows linearly with the angle from the dive: a flat depth of gap0 would
  // fall below the double rounding floor of the O(theta) gap carried by the
  // other samples (leaving them exactly on the boundary, where evaluation
  // jitters and can straddle the seam branch cut), while the slanted depth
  // keeps a fixed relative interior margin everywhere and is still far
  // below 1 - r throughout the far-lobe passage.
  //
  // Angles near u_gap are skipped: they map into the middle of the neck,
  // where the position along the channel is carried by the logarithm of the
  // angular distance to the pivot and the squaring step halves the mantissa
  // available for that logarithm.  Beyond |log(theta/u)| of about half
  // log(1/eps) the evaluation freezes onto a single point (measured onset
  // 0.56*log(1/eps) on both sides, mirror-symmetric about the pivot), so
  // samples there carry noise larger than the local strand separation and
  // produce spurious self-crossings no node count can cure.  The window is
  // eps^-0.62 wide on each side, capped so its edges stay on the resolved
  // straight walls, and the polyline bridges it with one chord per strand;
  // the chord joins two points hugging the same straight neck wall, so it
  // stays inside the channel, and the neck encloses neither lobe center, so
  // the windings are unchanged.
  {
    const double gap0 =
        std::max(opt.cert_depth_factor * out.one_minus_r, 1e-310);
    std::vector<double> thetas;
    const double t_lo = 0.3 * gap0, t_hi = 0.3;
    const double mach = std::is_same_v<Real, __float128>  ? 1.93e-34
                        : std::is_same_v<Real, long double> ? 1.1e-19
                                                            : 2.3e-16;
    const double skip_k =
        std::min(std::pow(mach, -0.62), 0.06 * delta / out.u_gap);
    const double skip_lo = out.u_gap / skip_k,
                 skip_hi = skip_k * out.u_gap;
    const int per_decade = std::max(8, opt.cert_wings_per_decade);
    const int wings = static_cast<int>(
        std::ceil(std::log10(t_hi / t_lo) * per_decade));
    thetas.reserve(opt.cert_samples + 2 * wings + 2);
    for (int k = 0; k < opt.cert_samples; ++k)
      thetas.push_back(2.0 * kPi * k / opt.cert_samples);
    for (int k = 0; k <= wings; ++k) {
      const double t = t_lo * std::pow(10.0, static_cast<double>(k) /
                                                 per_decade);
      if (t >= t_hi) break;
      if (t > skip_lo && t < skip_hi) continue;
      thetas.push_back(t);
      thetas.push_back(2.0 * kPi - t);
    }
    std::sort(thetas.begin(), thetas.end());
    std::vector<cplx> poly(thetas.size());
    for (size_t k = 0; k < thetas.size(); ++k) {
      const double th = thetas[k];
      const double depth = gap0 + 1e-10 * std::min(th, 2.0 * kPi - th);
      const double sh = std::sin(0.5 * th);
      const cplx gap(depth + (1.0 - depth) * 2.0 * sh * sh,
                     -(1.0 - depth) * std::sin(th));
      poly[k] = core->fval_gap(gap);
    }
    out.boundary_simple = polyline_is_simple(poly);
    out.winding_about_a = polyline_winding(poly, cplx(a, 0.0));
    out.winding_about_b = polyline_winding(poly, cplx(b, 0.0));
    out.certificate_gap = gap0;
    out.certificate_points = static_cast<int>(poly.size());
  }

  // Region polyline: right half plus its point reflection, shifted to mid.
  {
    out.region.a = a;
    out.region.b = b;
    out.region.delta = delta;
    auto& bd = out.region.boundary;
    bd.reserve(2 * wn.right_half.size());
    for (const auto& w : wn.right_half)
      bd.push_back(cplx(mid, 0.0) + w.to_cplx());
    for (const auto& w : wn.right_half)
      bd.push_back(cplx(mid, 0.0) - w.to_cplx());
  }
  return out;
}

}  // namespace detail

// Conformal maps f, g of the unit disk onto a dumbbell with lobe centers a
// and b and neck parameter delta, normalized by f(0) = a, g(0) = b,
// g(m(z)) = f(z) for the disk swap m, and apex images f(-1) = a - 1,
// f(1) = b + 1 pinned exactly.
inline DumbbellPair dumbbell_pair(double a, double b, double delta,
                                  const DumbbellOptions& opt = {}) {
  const bool quad =
      opt.precision == DumbbellOptions::Precision::Quad ||
      (opt.precision == DumbbellOptions::Precision::Auto && delta < 0.05);
  if (quad) return detail::build_dumbbell<__float128>(a, b, delta, opt);
  return detail::build_dumbbell<long double>(a, b, delta, opt);
}

// Radial-chart Riemann solver entry point for dumbbell regions.  Genuine
// dumbbells are not star-shaped about any interior point once the neck is
// thin, so this throws the star-shape violation from the chart builder; it
// exists so the failure is honest and testable.
inline RiemannMapResult riemann_map(const DumbbellRegion& region, cplx center,
                                    const RiemannOptions& opt = {}) {
  require(region.boundary.size() >= 16,
          "dumbbell region: boundary sample too small");
  return riemann_map(RadialRegion::from_boundary_sample(center,
                                                        region.boundary),
                     opt);
}

}  // namespace exposelab
