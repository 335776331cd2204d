#pragma once

// Local domains D = {rho < 0} intersected with a chart ball, boundary
// sampling by Newton refinement along rays, the normal-form boundary chart
// (translate, rotate the complex normal onto e_n, divide by the normal
// derivative), and curvature certificates: strong pseudoconvexity (restricted
// Levi eigenvalues) and boundary convexity (restricted real Hessian).

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exposelab/common.hpp"
#include "exposelab/hermpoly.hpp"

namespace exposelab {

inline constexpr double kBoundaryTol = 1e-8;    // membership |rho| tolerance
inline constexpr double kGradDegenTol = 1e-9;   // gradient degeneracy
inline constexpr double kUnitaryTol = 1e-12;    // unitarity defect

// ---------------------------------------------------------------------------
// Derived real-coordinate quantities.
// ---------------------------------------------------------------------------

// Real gradient (d/dx_1..x_n, d/dy_1..y_n) from the Wirtinger gradient.
inline RVec real_gradient(const Jet2& jet) {
  const int n = static_cast<int>(jet.dbar_grad.size());
  RVec g(2 * n);
  for (int i = 0; i < n; ++i) {
    g(i) = 2.0 * jet.dbar_grad(i).real();
    g(n + i) = -2.0 * jet.dbar_grad(i).imag();
  }
  return g;
}

// Orthonormal basis (columns) of the Hermitian orthogonal complement of v in
// C^n, built by Gram-Schmidt over the coordinate vectors in index order
// (deterministic).
inline CMat hermitian_complement_basis(const CVec& v) {
  const int n = static_cast<int>(v.size());
  const CVec u = v / v.norm();
  CMat basis(n, n - 1);
  int found = 0;
  for (int k = 0; k < n && found < n - 1; ++k) {
    CVec cand = CVec::Zero(n);
    cand(k) = 1.0;
    cand -= u * (u.adjoint() * cand);
    for (int j = 0; j < found; ++j)
      cand -= basis.col(j) * (basis.col(j).adjoint() * cand);
    const double norm = cand.norm();
    if (norm > 1e-8) basis.col(found++) = cand / norm;
  }
  require(found == n - 1, "complement basis construction collapsed");
  return basis;
}

// Orthonormal basis (columns) of the orthogonal complement of g in R^m,
// Gram-Schmidt over coordinate vectors in index order.
inline RMat real_complement_basis(const RVec& g) {
  const int m = static_cast<int>(g.size());
  const RVec u = g / g.norm();
  RMat basis(m, m - 1);
  int found = 0;
  for (int k = 0; k < m && found < m - 1; ++k) {
    RVec cand = RVec::Zero(m);
    cand(k) = 1.0;
    cand -= u * u.dot(cand);
    for (int j = 0; j < found; ++j)
      cand -= basis.col(j) * basis.col(j).dot(cand);
    const double norm = cand.norm();
    if (norm > 1e-8) basis.col(found++) = cand / norm;
  }
  require(found == m - 1, "complement basis construction collapsed");
  return basis;
}

// ---------------------------------------------------------------------------
// LocalDomain: {rho < 0} studied inside the chart ball B_radius(center).
// Construction verifies non-emptiness by locating an interior witness.
// ---------------------------------------------------------------------------
class LocalDomain {
 public:
  LocalDomain(HermitianPolynomial rho, CVec chart_center, double chart_radius)
      : rho_(std::move(rho)),
        chart_center_(std::move(chart_center)),
        chart_radius_(chart_radius) {
    require(chart_radius_ > 0, "LocalDomain: chart_radius must be positive");
    require(chart_center_.size() == rho_.n(),
            "LocalDomain: chart_center dimension mismatch");
    find_interior_witness();
  }

  const HermitianPolynomial& rho() const { return rho_; }
  const CVec& chart_center() const { return chart_center_; }
  double chart_radius() const { return chart_radius_; }
  const CVec& interior_witness() const { return interior_witness_; }
  int n() const { return rho_.n(); }

  bool in_chart(const CVec& z) const {
    return (z - chart_center_).norm() <= chart_radius_ + 1e-12;
  }
  bool in_closure(const CVec& z) const {
    return in_chart(z) && rho_.eval(z) <= kBoundaryTol;
  }

  static LocalDomain from_json(const nlohmann::json& j) {
    auto rho = HermitianPolynomial::from_json(j.at("rho"));
    const auto& jc = j.at("chart_center");
    CVec center(static_cast<int>(jc.size()));
    for (int i = 0; i < center.size(); ++i)
      center(i) = cplx(jc.at(i).at(0).get<double>(),
                       jc.at(i).at(1).get<double>());
    return LocalDomain(std::move(rho), std::move(center),
                       j.at("chart_radius").get<double>());
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["rho"] = rho_.to_json();
    j["chart_center"] = nlohmann::ordered_json::array();
    for (int i = 0; i < chart_center_.size(); ++i)
      j["chart_center"].push_back({chart_center_(i).real(),
                                   chart_center_(i).imag()});
    j["chart_radius"] = chart_radius_;
    return j;
  }

 private:
  void find_interior_witness() {
    if (rho_.eval(chart_center_) < 0) {
      interior_witness_ = chart_center_;
      return;
    }
    Rng rng(0x5eedU);
    for (int attempt = 0; attempt < 8192; ++attempt) {
      const double r =
          chart_radius_ * std::cbrt(rng.u01());  // volume-uniform radius
      const CVec z = chart_center_ + r * rng.unit_vector(rho_.n());
      if (rho_.eval(z) < 0) {
        interior_witness_ = z;
        return;
      }
    }
    fail("LocalDomain: no interior point with rho < 0 found in the chart");
  }

  HermitianPolynomial rho_;
  CVec chart_center_;
  double chart_radius_;
  CVec interior_witness_;
};

// ---------------------------------------------------------------------------
// Boundary sampling: random rays from the interior witness, bracketing the
// sign change of rho, then Newton refinement to |rho| < 1e-12. Deterministic
// per seed. Rays that exit the chart without crossing are counted as misses;
// the operation fails if more than half of the attempted rays miss.
// ---------------------------------------------------------------------------
inline std::optional<CVec> boundary_point_on_ray(const LocalDomain& domain,
                                                 const CVec& from,
                                                 const CVec& dir) {
  // Exit parameter of the chart ball along from + t*dir (dir unit, t >= 0).
  const CVec rel = from - domain.chart_center();
  const double b = dir.dot(rel).real();
  const double c = rel.squaredNorm() - domain.chart_radius() *
                                           domain.chart_radius();
  const double disc = b * b - c;
  if (disc <= 0) return std::nullopt;
  const double t_exit = -b + std::sqrt(disc);
  if (t_exit <= 0) return std::nullopt;

  const auto& rho = domain.rho();
  auto g = [&](double t) { return rho.eval(from + t * dir); };
  // Bracket the first sign change on [0, t_exit].
  const int kSteps = 64;
  double lo = 0.0, hi = -1.0;
  double glo = g(0.0);
  if (glo >= 0) return std::nullopt;  // witness must be interior
  for (int i = 1; i <= kSteps; ++i) {
    const double t = t_exit * static_cast<double>(i) / kSteps;
    const double gt = g(t);
    if (gt >= 0) {
      hi = t;
      break;
    }
    lo = t;
    glo = gt;
  }
  if (hi < 0) return std::nullopt;  // ray exits the chart inside {rho < 0}

  // Bisection to tighten, then Newton on t with the exact radial derivative
  // g'(t) = 2 Re <d rho(z(t)), dir>.
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const CVec z = from + t * dir;
    const Jet2 jet = eval_jet(rho, z);
    // d/dt rho(z + t*dir) = 2 Re sum_k (d rho/d z_k) dir_k
    const double deriv = 2.0 * jet.dbar_grad.conjugate().dot(dir).real();
    if (std::abs(deriv) < 1e-14) break;
    const double step = jet.value / deriv;
    t -= step;
    if (std::abs(jet.value) < 1e-13) break;
  }
  const CVec z = from + t * dir;
  if (std::abs(rho.eval(z)) > 1e-10 || !domain.in_chart(z))
    return std::nullopt;
  return z;
}

inline std::vector<CVec> boundary_sample(const LocalDomain& domain, int count,
                                         std::uint64_t seed) {
  require(count >= 1, "boundary_sample: count must be >= 1");
  std::vector<CVec> points;
  points.reserve(count);
  Rng rng(seed);
  int misses = 0;
  const int max_attempts = 2 * count + 16;
  for (int attempt = 0;
       attempt < max_attempts && static_cast<int>(points.size()) < count;
       ++attempt) {
    const CVec dir = rng.unit_vector(domain.n());
    auto z = boundary_point_on_ray(domain, domain.interior_witness(), dir);
    if (!z) {
      ++misses;
      continue;
    }
    const Jet2 jet = eval_jet(domain.rho(), *z);
    require(jet.dbar_grad.norm() > kGradDegenTol,
            "boundary_sample: degenerate gradient at a boundary point");
    points.push_back(std::move(*z));
  }
  if (static_cast<int>(points.size()) < count) {
    fail("boundary_sample: " + std::to_string(misses) + " of " +
         std::to_string(misses + static_cast<int>(points.size())) +
         " rays missed the boundary inside the chart");
  }
  return points;
}

// Deterministic sample of the closure: boundary points plus interior points
// (random chart points pulled toward the witness until rho < 0). Unlike
// boundary_sample, rays that miss are simply retried: coverage of the
// closure, not a miss-rate diagnostic, is the goal here.
inline std::vector<CVec> closure_sample(const LocalDomain& domain, int count,
                                        std::uint64_t seed) {
  require(count >= 2, "closure_sample: count must be >= 2");
  const int boundary_count = count / 2;
  std::vector<CVec> points;
  points.reserve(count);
  Rng rng(seed);
  const long max_attempts = 200L * boundary_count + 64;
  for (long attempt = 0;
       attempt < max_attempts &&
       static_cast<int>(points.size()) < boundary_count;
       ++attempt) {
    const CVec dir = rng.unit_vector(domain.n());
    auto z = boundary_point_on_ray(domain, domain.interior_witness(), dir);
    if (z) points.push_back(std::move(*z));
  }
  require(static_cast<int>(points.size()) == boundary_count,
          "closure_sample: could not reach the boundary from the witness");
  Rng rng2(seed ^ 0x9e3779b97f4a7c15ULL);
  while (static_cast<int>(points.size()) < count) {
    const double r = domain.chart_radius() * std::cbrt(rng2.u01());
    CVec z = domain.chart_center() + r * rng2.unit_vector(domain.n());
    for (int halvings = 0; halvings < 80 && domain.rho().eval(z) >= 0;
         ++halvings)
      z = domain.interior_witness() + 0.5 * (z - domain.interior_witness());
    if (domain.rho().eval(z) < 0) points.push_back(std::move(z));
  }
  return points;
}

// ---------------------------------------------------------------------------
// BoundaryChart: normal form at a boundary point zeta. In chart coordinates
// w = (1/s) U^* (z - zeta) the defining function, divided by the positive
// normalizer 2*||d rho(zeta)||*s, expands as
//     rho_hat(w) = Re(w_n + Q(w)) + L(w) + o(||w||^2),
// where Q(w) = sum_ij q_ij w_i w_j with q_form = d^2 rho_hat / dw_i dw_j at 0
// and L is the Levi form of rho_hat at 0. The contract invariants are
// rho_hat(0) = 0 and Wirtinger gradient (0,...,0,1/2) at 0.
// ---------------------------------------------------------------------------
struct BoundaryChart {
  CVec zeta;
  CMat unitary;          // last column = conj(grad)/||grad||
  double scale = 1.0;    // s
  CMat q_form;           // symmetric
  CMat levi;             // Hermitian
  HermitianPolynomial rho_hat;  // exact re-expansion in chart coordinates
  double normalizer = 1.0;      // 2 * ||d rho(zeta)|| * scale
  bool strongly_pseudoconvex = false;

  CVec to_chart(const CVec& z) const {
    return (unitary.adjoint() * (z - zeta)) / scale;
  }
  CVec from_chart(const CVec& w) const { return zeta + scale * (unitary * w); }
};

inline BoundaryChart normalize_at(const LocalDomain& domain, const CVec& zeta,
                                  double scale = 1.0) {
  require(scale > 0, "normalize_at: scale must be positive");
  const Jet2 jet = eval_jet(domain.rho(), zeta);
  require(std::abs(jet.value) < kBoundaryTol,
          "normalize_at: zeta is not on the boundary");
  const double grad_norm = jet.dbar_grad.norm();
  if (grad_norm < kGradDegenTol)
    fail("normalize_at: degenerate gradient at zeta");

  const int n = domain.n();
  // Unitary with last column v = conj(grad)/||grad||; then the bilinear
  // pairing <grad, U w> becomes ||grad|| * w_n.
  const CVec v = jet.dbar_grad.conjugate() / grad_norm;
  CMat U(n, n);
  if (n == 1) {
    U(0, 0) = v(0);
  } else {
    U.leftCols(n - 1) = hermitian_complement_basis(v);
    U.col(n - 1) = v;
  }

  BoundaryChart chart{
      zeta,
      U,
      scale,
      CMat(),
      CMat(),
      // rho_hat = rho(zeta + s U w) / (2 * grad_norm * s)
      HermitianPolynomial(n, {}),
      2.0 * grad_norm * scale,
      false};

  HermitianPolynomial pulled =
      pullback_affine(domain.rho(), scale * U, zeta);
  std::vector<MonomialTerm> scaled_terms = pulled.terms();
  for (auto& t : scaled_terms) t.coeff /= chart.normalizer;
  chart.rho_hat = HermitianPolynomial(n, std::move(scaled_terms));

  const Jet2 jet0 = eval_jet(chart.rho_hat, CVec::Zero(n));
  chart.q_form = jet0.holo_hess;
  chart.levi = jet0.levi;

  Eigen::SelfAdjointEigenSolver<CMat> es(chart.levi);
  chart.strongly_pseudoconvex = es.eigenvalues().minCoeff() > 0;
  return chart;
}

// ---------------------------------------------------------------------------
// Curvature certificates.
// ---------------------------------------------------------------------------

// Minimum over the samples of the smallest eigenvalue of the Levi form
// restricted to the complex tangent space {v : sum_k (d rho/d z_k) v_k = 0}.
// Positive value certifies strong pseudoconvexity at the samples. In one
// complex variable the complex tangent space is trivial and the certificate
// is vacuous (+infinity).
inline double certify_pseudoconvexity(const LocalDomain& domain,
                                      const std::vector<CVec>& samples) {
  require(!samples.empty(), "certify_pseudoconvexity: no samples");
  if (domain.n() == 1) return std::numeric_limits<double>::infinity();
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& z : samples) {
    const Jet2 jet = eval_jet(domain.rho(), z);
    require(std::abs(jet.value) < kBoundaryTol,
            "certify_pseudoconvexity: sample off the boundary");
    require(jet.dbar_grad.norm() > kGradDegenTol,
            "certify_pseudoconvexity: degenerate gradient at a sample");
    // Complex tangent space = Hermitian complement of conj(grad).
    const CMat basis = hermitian_complement_basis(jet.dbar_grad.conjugate());
    const CMat restricted = basis.adjoint() * jet.levi * basis;
    Eigen::SelfAdjointEigenSolver<CMat> es(restricted);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  return min_eig;
}

// Smallest eigenvalue of the real Hessian of rho at zeta restricted to the
// real tangent hyperplane (orthogonal complement of the real gradient in
// R^{2n}). Positive value certifies that the boundary is strictly convex at
// zeta.
inline double certify_convexity_at(const LocalDomain& domain,
                                   const CVec& zeta) {
  const Jet2 jet = eval_jet(domain.rho(), zeta);
  require(std::abs(jet.value) < kBoundaryTol,
          "certify_convexity_at: zeta is not on the boundary");
  const RVec grad = real_gradient(jet);
  if (grad.norm() < kGradDegenTol)
    fail("certify_convexity_at: degenerate gradient at zeta");
  const RMat basis = real_complement_basis(grad);
  const RMat restricted = basis.transpose() * jet.real_hess * basis;
  Eigen::SelfAdjointEigenSolver<RMat> es(restricted);
  return es.eigenvalues().minCoeff();
}

}  // namespace exposelab
