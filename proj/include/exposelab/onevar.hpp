#pragma once

// One-complex-variable engine: Mobius disk-automorphism utilities, polynomial
// map representations (plain monomial and orthogonalized Arnoldi bases, with
// exact interpolation constraints), boundary-value tables on the unit circle
// with trapezoidal Cauchy-integral evaluation, and the OneVarMap value type
// tying the representations together.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "exposelab/common.hpp"

namespace exposelab {

// ---------------------------------------------------------------------------
// Mobius dichotomy: phi_r(z) = (z - r)/(1 - r z) either shrinks the modulus
// or lands in the left half-plane, for every 0 < r < 1 and |z| < 1.
// ---------------------------------------------------------------------------
inline cplx mobius_r(double r, cplx z) { return (z - r) / (1.0 - r * z); }

enum class MobiusAlternative { kShrinksModulus, kLeftHalfPlane, kBoth };

inline MobiusAlternative mobius_dichotomy_check(double r, cplx z) {
  require(r > 0.0 && r < 1.0, "mobius_dichotomy_check: r must be in (0,1)");
  require(std::abs(z) < 1.0, "mobius_dichotomy_check: z must be in the disk");
  const cplx w = mobius_r(r, z);
  const bool shrinks = std::abs(w) < std::abs(z);
  const bool left = w.real() < 0.0;
  if (shrinks && left) return MobiusAlternative::kBoth;
  if (shrinks) return MobiusAlternative::kShrinksModulus;
  if (left) return MobiusAlternative::kLeftHalfPlane;
  // Tolerance band for equality cases before declaring a violation (which
  // would falsify the dichotomy and must fail the suite).
  if (std::abs(w) < std::abs(z) + 1e-12)
    return MobiusAlternative::kShrinksModulus;
  if (w.real() < 1e-12) return MobiusAlternative::kLeftHalfPlane;
  fail("mobius dichotomy violated at r=" + std::to_string(r) +
       " z=" + std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
       "i");
}

// ---------------------------------------------------------------------------
// Plain polynomial in the shifted/scaled monomial basis ((z - center)/scale)^k.
// ---------------------------------------------------------------------------
struct MonomialPoly {
  CVec coeffs;  // degree+1 entries; empty means the zero polynomial
  cplx center{0.0, 0.0};
  double scale = 1.0;

  cplx eval(cplx z) const {
    if (coeffs.size() == 0) return {0.0, 0.0};
    const cplx w = (z - center) / scale;
    cplx acc = coeffs(coeffs.size() - 1);
    for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k)
      acc = acc * w + coeffs(k);
    return acc;
  }

  cplx deriv(cplx z) const {
    if (coeffs.size() <= 1) return {0.0, 0.0};
    const cplx w = (z - center) / scale;
    const int d = static_cast<int>(coeffs.size()) - 1;
    cplx acc = static_cast<double>(d) * coeffs(d);
    for (int k = d - 1; k >= 1; --k)
      acc = acc * w + static_cast<double>(k) * coeffs(k);
    return acc / scale;
  }
};

// ---------------------------------------------------------------------------
// Polynomial in a discretely orthogonalized basis built by the Arnoldi
// (Hessenberg) recurrence on the sample set:
//   q_0 = 1,  q_{k+1}(z) = (z q_k(z) - sum_{i<=k} H(i,k) q_i(z)) / H(k+1,k).
// The representation is the Hessenberg matrix plus basis coefficients; this
// stays well-conditioned at degrees where the plain Vandermonde matrix is
// numerically singular.
// ---------------------------------------------------------------------------
struct ArnoldiPoly {
  CMat hess;    // (degree+1) x degree
  CVec coeffs;  // degree+1

  int degree() const { return static_cast<int>(hess.cols()); }

  cplx eval(cplx z) const {
    const int d = degree();
    std::vector<cplx> q(d + 1);
    q[0] = 1.0;
    for (int k = 0; k < d; ++k) {
      cplx t = z * q[k];
      for (int i = 0; i <= k; ++i) t -= hess(i, k) * q[i];
      q[k + 1] = t / hess(k + 1, k);
    }
    cplx acc(0.0, 0.0);
    for (int k = 0; k <= d; ++k) acc += coeffs(k) * q[k];
    return acc;
  }

  cplx deriv(cplx z) const {
    const int d = degree();
    std::vector<cplx> q(d + 1), dq(d + 1);
    q[0] = 1.0;
    dq[0] = 0.0;
    for (int k = 0; k < d; ++k) {
      cplx t = z * q[k];
      cplx dt = q[k] + z * dq[k];
      for (int i = 0; i <= k; ++i) {
        t -= hess(i, k) * q[i];
        dt -= hess(i, k) * dq[i];
      }
      q[k + 1] = t / hess(k + 1, k);
      dq[k + 1] = dt / hess(k + 1, k);
    }
    cplx acc(0.0, 0.0);
    for (int k = 0; k <= d; ++k) acc += coeffs(k) * dq[k];
    return acc;
  }

  // Expansion into plain monomial coefficients (use only at modest degree;
  // the expansion reintroduces the conditioning the basis avoids).
  CVec monomial_coeffs() const {
    const int d = degree();
    // rows: basis polynomial index, cols: monomial power
    CMat basis = CMat::Zero(d + 1, d + 1);
    basis(0, 0) = 1.0;
    for (int k = 0; k < d; ++k) {
      // z * q_k
      CVec t = CVec::Zero(d + 1);
      for (int p = 0; p <= k; ++p) t(p + 1) = basis(k, p);
      for (int i = 0; i <= k; ++i)
        t -= hess(i, k) * basis.row(i).transpose();
      basis.row(k + 1) = (t / hess(k + 1, k)).transpose();
    }
    CVec out = CVec::Zero(d + 1);
    for (int k = 0; k <= d; ++k) out += coeffs(k) * basis.row(k).transpose();
    return out;
  }
};

// Builds the Arnoldi basis on the given samples and least-squares fits the
// given values. Throws on basis collapse (degenerate sample geometry).
inline ArnoldiPoly arnoldi_fit(const std::vector<cplx>& points,
                               const std::vector<cplx>& values, int degree) {
  const int m = static_cast<int>(points.size());
  require(degree >= 0, "arnoldi_fit: negative degree");
  require(m >= degree + 1, "arnoldi_fit: fewer samples than coefficients");
  require(values.size() == points.size(),
          "arnoldi_fit: points/values size mismatch");

  CMat Q(m, degree + 1);
  Q.col(0).setOnes();
  CMat H = CMat::Zero(degree + 1, std::max(degree, 1));
  double z_scale = 1e-300;
  for (const auto& z : points) z_scale = std::max(z_scale, std::abs(z));
  const double rm = std::sqrt(static_cast<double>(m));
  for (int k = 0; k < degree; ++k) {
    CVec v(m);
    for (int i = 0; i < m; ++i) v(i) = points[i] * Q(i, k);
    // modified Gram-Schmidt with one re-orthogonalization pass
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= k; ++i) {
        const cplx h = Q.col(i).dot(v) / static_cast<double>(m);
        H(i, k) += h;
        v -= h * Q.col(i);
      }
    }
    const double norm = v.norm() / rm;
    if (norm < 1e-13 * z_scale)
      fail("arnoldi_fit: basis collapsed at degree " + std::to_string(k + 1) +
           " (samples do not support the requested degree)");
    H(k + 1, k) = norm;
    // Columns carry Euclidean norm sqrt(m): unit norm in the discrete inner
    // product <a,b> = a^H b / m, matching the all-ones column 0 and the
    // recurrence used by ArnoldiPoly::eval.
    Q.col(k + 1) = v / norm;
  }

  // Orthogonality residual guard.
  const CMat gram = (Q.adjoint() * Q) / static_cast<double>(m);
  const double defect =
      (gram - CMat::Identity(degree + 1, degree + 1)).cwiseAbs().maxCoeff();
  if (defect > 1e-6)
    fail("arnoldi_fit: orthogonalization residual " + std::to_string(defect) +
         " exceeds 1e-6 (ill-conditioned sample set)");

  CVec f(m);
  for (int i = 0; i < m; ++i) f(i) = values[i];
  // Columns of Q/sqrt(m) are orthonormal, but solve by QR for safety.
  const CVec c = Q.householderQr().solve(f);

  ArnoldiPoly out;
  out.hess = H.leftCols(degree);
  out.coeffs = c;
  return out;
}

// ---------------------------------------------------------------------------
// Boundary-value table on a centered circle and trapezoidal Cauchy
// evaluation.  Nodes are zeta_j = radius * exp(2 pi i j / N); radius
// defaults to 1 and may be pulled inside the disk when the sampled map has
// boundary features too sharp to tabulate.  Evaluation requires
// |z| <= radius * (1 - margin) with margin = 2 * node spacing.
// ---------------------------------------------------------------------------
struct BoundaryTable {
  CVec values;
  double radius = 1.0;

  int size() const { return static_cast<int>(values.size()); }
  double spacing() const { return 2.0 * kPi / size(); }
  double margin() const { return 2.0 * spacing(); }
  cplx node(int j) const {
    const double t = 2.0 * kPi * j / size();
    return {radius * std::cos(t), radius * std::sin(t)};
  }
};

// (f(z), f'(z)) by the trapezoid rule on the Cauchy integral; spectrally
// accurate for maps analytic in a neighborhood of the closed sampling disk.
inline std::pair<cplx, cplx> cauchy_eval(const BoundaryTable& table, cplx z) {
  require(table.size() >= 16, "cauchy_eval: table too small");
  if (std::abs(z) > table.radius * (1.0 - table.margin()))
    fail("cauchy_eval: point too close to the sampling circle");
  const int n = table.size();
  cplx value(0.0, 0.0), slope(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const cplx zeta = table.node(j);
    const cplx d = zeta - z;
    const cplx w = table.values(j) * zeta;
    value += w / d;
    slope += w / (d * d);
  }
  return {value / static_cast<double>(n), slope / static_cast<double>(n)};
}

// ---------------------------------------------------------------------------
// OneVarMap: a one-variable holomorphic map carrying any subset of
//   - a polynomial representation p(z) = p0(z) + m(z) q(z), with p0 plain,
//     m a monic product of linear factors (constraint carrier), q an
//     Arnoldi-basis least-squares factor;
//   - a boundary table with Cauchy evaluator;
//   - an exact evaluator (used by internally constructed conformal maps).
// Evaluation prefers exact, then polynomial, then table.
// ---------------------------------------------------------------------------
class ExactOneVar {
 public:
  virtual ~ExactOneVar() = default;
  virtual cplx eval(cplx z) const = 0;
  virtual cplx deriv(cplx z) const = 0;
};

struct PolyRep {
  MonomialPoly base;                        // p0
  std::vector<std::pair<cplx, int>> roots;  // m(z) = prod (z - w)^mult
  std::optional<ArnoldiPoly> q;

  static cplx ipow(cplx x, int k) {
    cplx r(1.0, 0.0);
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }

  cplx m_eval(cplx z) const {
    cplx acc(1.0, 0.0);
    for (const auto& [w, mult] : roots) acc *= ipow(z - w, mult);
    return acc;
  }
  cplx m_deriv(cplx z) const {
    // product-rule sum over factors
    cplx acc(0.0, 0.0);
    for (size_t k = 0; k < roots.size(); ++k) {
      cplx term = static_cast<double>(roots[k].second) *
                  ipow(z - roots[k].first, roots[k].second - 1);
      for (size_t i = 0; i < roots.size(); ++i)
        if (i != k) term *= ipow(z - roots[i].first, roots[i].second);
      acc += term;
    }
    return acc;
  }

  cplx eval(cplx z) const {
    cplx v = base.eval(z);
    if (q) v += m_eval(z) * q->eval(z);
    return v;
  }
  cplx deriv(cplx z) const {
    cplx v = base.deriv(z);
    if (q) v += m_deriv(z) * q->eval(z) + m_eval(z) * q->deriv(z);
    return v;
  }
};

class OneVarMap {
 public:
  OneVarMap() = default;

  static OneVarMap identity() {
    OneVarMap map;
    PolyRep rep;
    rep.base.coeffs = CVec::Zero(2);
    rep.base.coeffs(1) = 1.0;
    map.poly_ = std::move(rep);
    map.real_symmetric_ = true;
    return map;
  }

  static OneVarMap from_monomial(CVec coeffs, cplx center = {0.0, 0.0},
                                 double scale = 1.0) {
    OneVarMap map;
    PolyRep rep;
    rep.base.coeffs = std::move(coeffs);
    rep.base.center = center;
    rep.base.scale = scale;
    map.poly_ = std::move(rep);
    return map;
  }

  static OneVarMap from_poly_rep(PolyRep rep) {
    OneVarMap map;
    map.poly_ = std::move(rep);
    return map;
  }

  static OneVarMap from_table(CVec values, double radius = 1.0) {
    OneVarMap map;
    map.table_ = BoundaryTable{std::move(values), radius};
    return map;
  }

  bool has_poly() const { return poly_.has_value(); }
  bool has_table() const { return table_.has_value(); }
  bool has_exact() const { return exact_ != nullptr; }
  const PolyRep& poly() const { return *poly_; }
  const BoundaryTable& table() const { return *table_; }
  bool real_symmetric() const { return real_symmetric_; }
  void set_real_symmetric(bool v) { real_symmetric_ = v; }

  void attach_table(CVec values, double radius = 1.0) {
    table_ = BoundaryTable{std::move(values), radius};
  }
  void attach_exact(std::shared_ptr<const ExactOneVar> e) {
    exact_ = std::move(e);
  }
  void attach_poly(PolyRep rep) { poly_ = std::move(rep); }

  cplx eval(cplx z) const {
    if (exact_) return exact_->eval(z);
    if (poly_) return poly_->eval(z);
    require(table_.has_value(), "OneVarMap: no representation");
    return cauchy_eval(*table_, z).first;
  }

  cplx deriv(cplx z) const {
    if (exact_) return exact_->deriv(z);
    if (poly_) return poly_->deriv(z);
    require(table_.has_value(), "OneVarMap: no representation");
    return cauchy_eval(*table_, z).second;
  }

  // Plain monomial coefficients of the polynomial representation.
  CVec monomial_coeffs() const {
    require(poly_.has_value(), "monomial_coeffs: no polynomial representation");
    require(poly_->base.center == cplx(0.0, 0.0) && poly_->base.scale == 1.0,
            "monomial_coeffs: base polynomial is not in the plain basis");
    // degree of the full representation
    int deg = poly_->base.coeffs.size() == 0
                  ? 0
                  : static_cast<int>(poly_->base.coeffs.size()) - 1;
    int mdeg = 0;
    for (const auto& [w, mult] : poly_->roots) mdeg += mult;
    if (poly_->q) deg = std::max(deg, mdeg + poly_->q->degree());
    CVec out = CVec::Zero(deg + 1);
    for (int k = 0; k < poly_->base.coeffs.size(); ++k)
      out(k) += poly_->base.coeffs(k);
    if (poly_->q) {
      // expand m(z)
      CVec m = CVec::Zero(mdeg + 1);
      m(0) = 1.0;
      int cur = 0;
      for (const auto& [w, mult] : poly_->roots) {
        for (int i = 0; i < mult; ++i) {
          CVec next = CVec::Zero(cur + 2);
          for (int k = 0; k <= cur; ++k) {
            next(k + 1) += m(k);
            next(k) -= w * m(k);
          }
          m.head(cur + 2) = next;
          ++cur;
        }
      }
      const CVec qc = poly_->q->monomial_coeffs();
      for (int i = 0; i <= mdeg; ++i)
        for (int j = 0; j < qc.size(); ++j) out(i + j) += m(i) * qc(j);
    }
    return out;
  }

  // Max disagreement between the polynomial and table representations over a
  // deterministic interior grid (radius capped at both 0.9 and 1 - margin).
  double cross_check(int grid = 24) const {
    require(poly_.has_value() && table_.has_value(),
            "cross_check: needs both representations");
    const double rmax =
        std::min(0.9, table_->radius * (1.0 - table_->margin()));
    double worst = 0.0;
    for (int i = 1; i <= grid; ++i) {
      const double r = rmax * i / grid;
      for (int j = 0; j < grid; ++j) {
        const double t = 2.0 * kPi * j / grid;
        const cplx z = r * cplx(std::cos(t), std::sin(t));
        worst = std::max(worst,
                         std::abs(poly_->eval(z) - cauchy_eval(*table_, z).first));
      }
    }
    return worst;
  }

  // Max | Im f(x) | over real samples in [-1 + margin, 1 - margin] (the
  // real-symmetry invariant; uses the preferred evaluator).
  double real_symmetry_defect(int samples = 64) const {
    double worst = 0.0;
    double lim = 1.0;
    if (!exact_ && !poly_ && table_)
      lim = table_->radius * (1.0 - table_->margin());
    for (int i = 0; i <= samples; ++i) {
      const double x = -lim + 2.0 * lim * i / samples;
      worst = std::max(worst, std::abs(eval(cplx(x, 0.0)).imag()));
    }
    return worst;
  }

 private:
  std::optional<PolyRep> poly_;
  std::optional<BoundaryTable> table_;
  std::shared_ptr<const ExactOneVar> exact_;
  bool real_symmetric_ = false;
};

// ---------------------------------------------------------------------------
// Constrained least-squares polynomial fitting: exact interpolation
// constraints (value, optionally derivative) are eliminated through a Hermite
// interpolant p0 and carrier m(z) = prod (z - w_k)^{mult_k}; the remainder
// (target - p0)/m is fitted in the Arnoldi basis. The returned residual is
// sup over the samples of |p - target|.
// ---------------------------------------------------------------------------
struct PolyConstraint {
  cplx point;
  cplx value;
  std::optional<cplx> deriv;
};

struct PolyFitResult {
  OneVarMap map;
  double residual = 0.0;
};

namespace detail {

// Hermite interpolation by Newton divided differences with repeated nodes
// (multiplicity <= 2: value and first derivative).
inline MonomialPoly hermite_interpolant(
    const std::vector<PolyConstraint>& constraints) {
  std::vector<cplx> nodes, fvals, dvals;
  for (const auto& c : constraints) {
    nodes.push_back(c.point);
    fvals.push_back(c.value);
    dvals.push_back(c.deriv.value_or(cplx(0.0, 0.0)));
    if (c.deriv) {
      nodes.push_back(c.point);
      fvals.push_back(c.value);
      dvals.push_back(*c.deriv);
    }
  }
  const int m = static_cast<int>(nodes.size());
  MonomialPoly out;
  if (m == 0) return out;

  // dd[i] holds the current column of divided differences.
  std::vector<cplx> dd = fvals;
  std::vector<cplx> coeff(m);
  coeff[0] = dd[0];
  std::vector<cplx> prev = dd;
  for (int order = 1; order < m; ++order) {
    std::vector<cplx> cur(m - order);
    for (int i = 0; i + order < m; ++i) {
      if (nodes[i + order] == nodes[i]) {
        require(order == 1, "hermite_interpolant: multiplicity > 2");
        cur[i] = dvals[i];
      } else {
        cur[i] = (prev[i + 1] - prev[i]) / (nodes[i + order] - nodes[i]);
      }
    }
    coeff[order] = cur[0];
    prev = std::move(cur);
  }

  // Newton form -> plain monomial coefficients.
  CVec poly = CVec::Zero(m);
  CVec basis = CVec::Zero(m);  // running product prod (z - nodes[i])
  basis(0) = 1.0;
  int deg = 0;
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i <= deg; ++i) poly(i) += coeff[k] * basis(i);
    if (k + 1 < m) {
      CVec next = CVec::Zero(deg + 2);
      for (int i = 0; i <= deg; ++i) {
        next(i + 1) += basis(i);
        next(i) -= nodes[k] * basis(i);
      }
      basis.head(deg + 2) = next;
      ++deg;
    }
  }
  out.coeffs = poly;
  return out;
}

}  // namespace detail

inline PolyFitResult polyfit_constrained(
    const std::vector<cplx>& sample_points,
    const std::vector<cplx>& sample_values, int degree,
    const std::vector<PolyConstraint>& constraints = {}) {
  require(sample_points.size() == sample_values.size(),
          "polyfit_constrained: points/values size mismatch");
  require(!sample_points.empty(), "polyfit_constrained: empty sample");
  int constraint_eqs = 0;
  for (const auto& c : constraints) constraint_eqs += c.deriv ? 2 : 1;
  require(degree >= constraint_eqs,
          "polyfit_constrained: degree < number of constraint equations");

  PolyRep rep;
  rep.base = detail::hermite_interpolant(constraints);
  for (const auto& c : constraints)
    rep.roots.emplace_back(c.point, c.deriv ? 2 : 1);

  double span = 0.0;
  for (const auto& z : sample_points) span = std::max(span, std::abs(z));
  span = std::max(span, 1.0);

  const int qdeg = degree - constraint_eqs;
  std::vector<cplx> pts, vals;
  pts.reserve(sample_points.size());
  for (size_t i = 0; i < sample_points.size(); ++i) {
    const cplx z = sample_points[i];
    bool near_constraint = false;
    for (const auto& c : constraints)
      if (std::abs(z - c.point) < 1e-8 * span) near_constraint = true;
    if (near_constraint) continue;  // covered exactly by the constraints
    pts.push_back(z);
    vals.push_back((sample_values[i] - rep.base.eval(z)) / rep.m_eval(z));
  }
  require(static_cast<int>(pts.size()) >= qdeg + 1,
          "polyfit_constrained: too few samples away from constraints");
  rep.q = arnoldi_fit(pts, vals, qdeg);

  PolyFitResult result;
  double residual = 0.0;
  for (size_t i = 0; i < sample_points.size(); ++i)
    residual = std::max(
        residual, std::abs(rep.eval(sample_points[i]) - sample_values[i]));
  result.residual = residual;
  result.map = OneVarMap::from_poly_rep(std::move(rep));
  return result;
}

// Samples a map on the unit circle into a boundary table.
template <typename F>
CVec sample_unit_circle(const F& f, int nodes) {
  CVec values(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double t = 2.0 * kPi * j / nodes;
    values(j) = f(cplx(std::cos(t), std::sin(t)));
  }
  return values;
}

}  // namespace exposelab
