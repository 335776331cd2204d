#pragma once

// Boundary convexification by peak-damped quadratic shears.
//
// Given a strongly pseudoconvex local domain, a boundary point zeta and a
// certified peak function f = e^P, the builder returns a holomorphic map
//   F = chart^{-1} o shear o chart,
// where the shear adds
//   phi_M(w) = (1/M) * Q(w) * sum_j f_hat(w)^{N_j}
// to the last chart coordinate.  Q is the holomorphic quadratic part of the
// normalized defining function; near w = 0 the bracket averages to 1, so the
// shear absorbs Re Q into the new coordinate and leaves the (positive) Levi
// form as the second-order boundary shape: the image boundary is strictly
// convex at F(zeta).  Away from w = 0 the peak powers damp the shear to
// nothing.
//
// The parameter plan (M, exponents N_j, radii r_j) confines each summand's
// derivative bump to its own annulus.  The planner's literal selection rule
// (exponent doubling until the off-annulus bound clears eps/(2M)) frequently
// cannot converge: the bound at the annulus edge r_j = 2/sqrt(N_j c) is
// asymptotically independent of N_j, so for charts with a sizable quadratic
// part the doubling loop hits the exponent cap.  In that case an optional
// fallback produces a capped geometric schedule instead; the fallback is
// flagged (mode = "capped") and the measured off-annulus suprema are
// recorded in the returned plan so no bound claim is silently weakened.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "exposelab/common.hpp"
#include "exposelab/geometry.hpp"
#include "exposelab/holomap.hpp"
#include "exposelab/peak.hpp"

namespace exposelab {

// ---------------------------------------------------------------------------
// Parameter plan.
// ---------------------------------------------------------------------------
struct PlanOptions {
  double radius = 1.0;          // 1-D verification interval [0, radius]
  int dense_points = 10000;     // a-posteriori bound verification grid
  double exponent_cap = 1.152921504606846976e18;  // 2^60: doubling hard stop
  // Largest exponent of the capped fallback schedule. Verification probes
  // step a distance h ~ 1e-5 past the boundary, where the peak powers grow
  // like e^{N_max |P|}; N_max * h must stay O(1) or finite differences of
  // the map (and Newton inversion of it) overflow.
  double capped_max = 1.0e4;
  bool allow_capped = false;    // fall back to the capped geometric schedule
};

struct ExposureParams {
  double eps = 0.0;
  int M = 0;
  std::vector<double> exponents;  // N_j, integer-valued, strictly increasing
  std::vector<double> radii;      // r_j, strictly decreasing
  double decay_c = 0.0;
  double k_q = 0.0;               // explicit constant bounding the q-form
  double radius = 0.0;            // verification interval end
  std::string mode;               // "doubling" (selection rule) or "capped"
  std::vector<double> annulus_sup;  // measured off-annulus sup of each bound

  double target_bound() const { return eps / (2.0 * M); }

  // Structural invariants; independent of how the exponents were selected.
  void validate() const {
    require(eps > 0.0 && decay_c > 0.0, "ExposureParams: eps, decay_c > 0");
    require(M >= 1 && static_cast<int>(exponents.size()) == M &&
                static_cast<int>(radii.size()) == M,
            "ExposureParams: list sizes must equal M");
    require(static_cast<double>(M) >
                2.0 / (eps * std::numbers::e * decay_c),
            "ExposureParams: M too small for the eps/(2M) split");
    for (int j = 0; j < M; ++j) {
      require(exponents[j] >= 1.0 &&
                  exponents[j] == std::floor(exponents[j]),
              "ExposureParams: exponents must be positive integers");
      require(radii[j] > 0.0, "ExposureParams: radii must be positive");
      if (j > 0) {
        require(exponents[j] > exponents[j - 1],
                "ExposureParams: exponents must increase strictly");
        require(radii[j] < radii[j - 1],
                "ExposureParams: radii must decrease strictly");
      }
      const double bump = 1.0 / std::sqrt(exponents[j] * decay_c);
      const double inner = (j + 1 < M) ? radii[j + 1] : 0.0;
      require(bump >= inner * (1.0 - 1e-12) &&
                  bump <= radii[j] * (1.0 + 1e-12),
              "ExposureParams: derivative bump escapes its annulus");
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["eps"] = eps;
    j["m"] = M;
    j["decay_c"] = decay_c;
    j["k_q"] = k_q;
    j["radius"] = radius;
    j["mode"] = mode;
    j["target_bound"] = target_bound();
    j["exponents"] = exponents;
    j["radii"] = radii;
    j["annulus_sup"] = annulus_sup;
    return j;
  }
};

namespace detail {

// Radial derivative-bound model of one summand: the term (1/M) Q f^N has
// derivative dominated by K_Q * N * x^2 * e^{-N c x^2} * (1 + x) at radius x.
inline double annulus_bound(double k_q, double n, double c, double x) {
  return k_q * n * x * x * std::exp(-n * c * x * x) * (1.0 + x);
}

// Dense sup of the bound over {x <= inner} u {x >= outer} within [0, R].
inline double off_annulus_sup(double k_q, double n, double c, double inner,
                              double outer, double radius, int points) {
  double sup = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = radius * static_cast<double>(i) /
                     static_cast<double>(points - 1);
    if (x <= inner || x >= outer)
      sup = std::max(sup, annulus_bound(k_q, n, c, x));
  }
  // The edges themselves (sup candidates) may fall between grid nodes.
  if (inner > 0.0) sup = std::max(sup, annulus_bound(k_q, n, c, inner));
  if (outer <= radius) sup = std::max(sup, annulus_bound(k_q, n, c, outer));
  return sup;
}

}  // namespace detail

// Plan the (M, N_j, r_j) schedule for a chart.  decay_c and the radii are in
// chart coordinates.  The selection rule doubles each exponent until the
// off-annulus bound clears eps/(2M) on a dense 1-D grid; if an exponent
// would exceed 2^60 the planner raises (bad decay constant or chart scale)
// unless opts.allow_capped permits the recorded geometric fallback.
inline ExposureParams plan_parameters(double decay_c, double eps,
                                      const BoundaryChart& chart,
                                      PlanOptions opts = {}) {
  require(decay_c > 0.0, "plan_parameters: decay_c must be positive");
  require(eps > 0.0, "plan_parameters: eps must be positive");
  require(opts.radius > 0.0, "plan_parameters: verification radius > 0");
  require(opts.dense_points >= 100, "plan_parameters: dense grid too coarse");

  ExposureParams plan;
  plan.eps = eps;
  plan.decay_c = decay_c;
  plan.radius = opts.radius;
  plan.M = static_cast<int>(
               std::ceil(2.0 / (eps * std::numbers::e * decay_c))) +
           1;
  require(plan.M <= 100000, "plan_parameters: M implausibly large");

  // Explicit constant: |Q(w)| <= ||q|| x^2 and ||grad Q(w)|| <= 2 ||q|| x.
  Eigen::JacobiSVD<CMat> svd(chart.q_form);
  plan.k_q = chart.q_form.size() == 0 ? 0.0 : 2.0 * svd.singularValues()(0);

  const double target = plan.target_bound();
  const double c = decay_c;
  const double r_max = opts.radius;
  const int m = plan.M;

  // --- selection by doubling (the literal rule) ---
  auto try_doubling = [&]() -> bool {
    std::vector<double> n_list, r_list;
    double n_floor = std::max(1.0, std::ceil(4.0 / (c * r_max * r_max)));
    for (int j = 0; j < m; ++j) {
      double n = (j == 0) ? n_floor : 4.0 * n_list.back();
      n = std::ceil(n);
      while (true) {
        if (n > opts.exponent_cap) return false;
        const double r = 2.0 / std::sqrt(n * c);
        // Outer-side check for term j: bound small beyond its own radius.
        bool ok = detail::off_annulus_sup(plan.k_q, n, c, -1.0, r, r_max,
                                          opts.dense_points) < target;
        // Inner-side check for term j-1: bound small inside r_j.
        if (ok && j > 0)
          ok = detail::off_annulus_sup(plan.k_q, n_list.back(), c, r,
                                       r_max + 1.0, r_max,
                                       opts.dense_points) < target;
        if (ok) {
          n_list.push_back(n);
          r_list.push_back(r);
          break;
        }
        n *= 2.0;
      }
    }
    plan.exponents = std::move(n_list);
    plan.radii = std::move(r_list);
    plan.mode = "doubling";
    return true;
  };

  if (!try_doubling()) {
    if (!opts.allow_capped)
      fail("plan_parameters: exponent doubling exceeded the 2^60 cap before "
           "the off-annulus bound cleared eps/(2M); the bound at the annulus "
           "edge does not shrink with the exponent (check decay_c and the "
           "chart scale)");
    // Capped geometric schedule: valid structural parameters, with the
    // off-annulus bound claim replaced by recorded measurements.
    const double n1 = std::max(1.0, std::ceil(4.0 / (c * r_max * r_max)));
    const double growth =
        (m == 1) ? 1.0
                 : std::pow(opts.capped_max / n1,
                            1.0 / static_cast<double>(m - 1));
    require(m == 1 || growth > 1.0000001,
            "plan_parameters: capped schedule cannot fit M exponents");
    std::vector<double> n_list(m), bump(m), r_list(m);
    for (int j = 0; j < m; ++j) {
      double n = std::round(n1 * std::pow(growth, j));
      if (j > 0) n = std::max(n, n_list[j - 1] + 1.0);
      n_list[j] = n;
      bump[j] = 1.0 / std::sqrt(n * c);
    }
    r_list[0] = 2.0 * bump[0];
    for (int j = 1; j < m; ++j)
      r_list[j] = std::sqrt(bump[j - 1] * bump[j]);
    plan.exponents = std::move(n_list);
    plan.radii = std::move(r_list);
    plan.mode = "capped";
  }

  // A-posteriori dense verification, recorded for every mode.
  plan.annulus_sup.resize(m);
  for (int j = 0; j < m; ++j) {
    const double inner = (j + 1 < m) ? plan.radii[j + 1] : 0.0;
    plan.annulus_sup[j] =
        detail::off_annulus_sup(plan.k_q, plan.exponents[j], c, inner,
                                plan.radii[j], r_max, opts.dense_points);
    if (plan.mode == "doubling")
      require(plan.annulus_sup[j] < target,
              "plan_parameters: a-posteriori bound check failed");
  }
  plan.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// The shear's scalar part: phi_M(w) = (1/M) Q(w) sum_j e^{N_j P(w)}.
// ---------------------------------------------------------------------------
class ConvexifierShear final : public ScalarHoloExpr {
 public:
  ConvexifierShear(CMat q_form, HoloPoly chart_exponent,
                   std::vector<double> exponents)
      : q_(std::move(q_form)),
        p_(std::move(chart_exponent)),
        n_(std::move(exponents)),
        inv_m_(1.0 / static_cast<double>(n_.size())) {
    require(!n_.empty(), "ConvexifierShear: empty exponent list");
  }

  cplx value(const CVec& w) const override {
    const cplx qv = (w.transpose() * q_ * w)(0, 0);
    const cplx pv = p_.eval(w);
    cplx sum(0.0, 0.0);
    for (double nj : n_) sum += std::exp(nj * pv);
    return inv_m_ * qv * sum;
  }

  CVec gradient(const CVec& w) const override {
    const cplx qv = (w.transpose() * q_ * w)(0, 0);
    const CVec qg = 2.0 * (q_ * w);
    const cplx pv = p_.eval(w);
    const CVec pg = p_.grad(w);
    cplx sum(0.0, 0.0), weighted(0.0, 0.0);
    for (double nj : n_) {
      const cplx e = std::exp(nj * pv);
      sum += e;
      weighted += nj * e;
    }
    return inv_m_ * (qg * sum + (qv * weighted) * pg);
  }

 private:
  CMat q_;
  HoloPoly p_;
  std::vector<double> n_;
  double inv_m_;
};

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------
struct ConvexifierBuild {
  HolomorphicMapExpr map;
  ExposureParams params;
  BoundaryChart chart;
  HoloPoly chart_exponent;  // peak exponent pulled back to chart coordinates
};

inline PlanOptions build_plan_defaults() {
  PlanOptions opts;
  opts.allow_capped = true;  // builders record the fallback rather than die
  return opts;
}

namespace detail {

inline ConvexifierBuild assemble_convexifier(const BoundaryChart& chart,
                                             const PeakFunction& peak,
                                             ExposureParams params) {
  const int n = static_cast<int>(chart.zeta.size());
  // Peak exponent in chart coordinates: P_hat(w) = P(zeta + s U w), with the
  // roundoff constant term dropped so P_hat(0) = 0 exactly.
  HoloPoly p_hat =
      peak.exponent.pullback_affine(chart.scale * chart.unitary, chart.zeta);
  p_hat.add_term(std::vector<int>(n, 0),
                 -p_hat.eval(CVec::Zero(n)));

  auto shear = std::make_shared<ConvexifierShear>(chart.q_form, p_hat,
                                                  params.exponents);
  const CMat a_in = chart.unitary.adjoint() / chart.scale;
  const CMat a_out = chart.scale * chart.unitary;
  HolomorphicMapExpr map(n);
  map.push_affine(a_in, -(a_in * chart.zeta))
      .push_shear(std::move(shear))
      .push_affine(a_out, chart.zeta);
  return ConvexifierBuild{std::move(map), std::move(params), chart,
                          std::move(p_hat)};
}

}  // namespace detail

inline ConvexifierBuild build_convexifier(const LocalDomain& domain,
                                          const CVec& zeta,
                                          const PeakFunction& peak,
                                          double eps,
                                          PlanOptions opts =
                                              build_plan_defaults()) {
  require(peak.decay_c > 0.0,
          "build_convexifier: peak is not certified (decay_c = 0)");
  require((peak.zeta - zeta).norm() < 1e-12,
          "build_convexifier: peak must peak at zeta");
  const BoundaryChart chart = normalize_at(domain, zeta);
  opts.radius = domain.chart_radius() / chart.scale;
  const double chart_c = peak.decay_c * chart.scale * chart.scale;
  ExposureParams params = plan_parameters(chart_c, eps, chart, opts);
  return detail::assemble_convexifier(chart, peak, std::move(params));
}

struct FamilyBuild {
  std::vector<ConvexifierBuild> members;
  ExposureParams params;          // one shared plan
  double max_adjacent_distance = 0.0;  // sup-sample distance between neighbors
  double lipschitz = 0.0;              // max ratio distance / zeta spacing
};

// One map per zeta, all from a single plan computed for the worst chart
// (largest q-form) with the family's shared decay constant.
inline FamilyBuild build_family_convexifier(const LocalDomain& domain,
                                            const std::vector<CVec>& zetas,
                                            double eps,
                                            PlanOptions opts =
                                                build_plan_defaults(),
                                            int continuity_samples = 128,
                                            std::uint64_t seed = 0x5eedULL) {
  require(!zetas.empty(), "build_family_convexifier: empty zeta list");
  const auto peaks = make_peak_family(domain, zetas);
  require(peaks.front().decay_c > 0.0,
          "build_family_convexifier: family decay constant is 0");

  std::vector<BoundaryChart> charts;
  charts.reserve(zetas.size());
  size_t worst = 0;
  double worst_q = -1.0;
  for (size_t i = 0; i < zetas.size(); ++i) {
    charts.push_back(normalize_at(domain, zetas[i]));
    Eigen::JacobiSVD<CMat> svd(charts.back().q_form);
    const double qn =
        charts.back().q_form.size() == 0 ? 0.0 : svd.singularValues()(0);
    if (qn > worst_q) {
      worst_q = qn;
      worst = i;
    }
  }
  opts.radius = domain.chart_radius() / charts[worst].scale;
  const double chart_c = peaks.front().decay_c * charts[worst].scale *
                         charts[worst].scale;
  const ExposureParams shared =
      plan_parameters(chart_c, eps, charts[worst], opts);

  FamilyBuild family;
  family.params = shared;
  family.members.reserve(zetas.size());
  for (size_t i = 0; i < zetas.size(); ++i)
    family.members.push_back(
        detail::assemble_convexifier(charts[i], peaks[i], shared));

  // Discrete continuity in zeta: sup-sample distance between adjacent maps.
  if (zetas.size() >= 2) {
    const auto samples =
        closure_sample(domain, continuity_samples, seed);
    for (size_t i = 0; i + 1 < zetas.size(); ++i) {
      double dist = 0.0;
      for (const auto& z : samples)
        dist = std::max(dist, (family.members[i].map.eval(z) -
                               family.members[i + 1].map.eval(z))
                                  .norm());
      const double spacing = (zetas[i] - zetas[i + 1]).norm();
      family.max_adjacent_distance =
          std::max(family.max_adjacent_distance, dist);
      if (spacing > 1e-12)
        family.lipschitz = std::max(family.lipschitz, dist / spacing);
    }
  }
  return family;
}

// ---------------------------------------------------------------------------
// Verification.
// ---------------------------------------------------------------------------
struct VerifyOptions {
  int grid_per_axis = 40;
  std::uint64_t seed = 0;
  int collision_pairs = 100000;
  int convexity_probe_pairs = 2000;
  // Base step of the Richardson Hessian. Small enough that probes stay in
  // the shell where every e^{N_j P} stage is perturbative (N_max * step
  // << 1), large enough that the second differences beat the Newton
  // inversion tolerance.
  double fd_step = 1e-5;
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
};

struct VerificationReport {
  double c0_dist = 0.0;      // sup ||F(z) - z|| over the grid
  double c1_dist = 0.0;      // sup ||J_F(z) - I||_2 over the grid
  double kappa = 0.0;        // contraction constant (same sup, chart region)
  double convexity_eig = 0.0;  // smallest restricted Hessian eig at F(zeta)
  double tangency_err = 0.0;   // angle between d rho and d(rho o F^{-1})
  bool region_convex = false;  // midpoint probes found no witness
  bool injectivity_certificate = false;  // region convex and kappa < 1
  int collision_flags = 0;     // random-pair search hits
  bool newton_converged = false;
  long grid_points = 0;
  int grid_per_axis = 0;
  double grid_radius = 0.0;
  std::uint64_t seed = 0;
  double eps = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["c0_dist"] = c0_dist;
    j["c1_dist"] = c1_dist;
    j["kappa"] = kappa;
    j["convexity_eig"] = convexity_eig;
    j["tangency_err"] = tangency_err;
    j["region_convex"] = region_convex;
    j["injectivity_certificate"] = injectivity_certificate;
    j["collision_flags"] = collision_flags;
    j["newton_converged"] = newton_converged;
    j["grid_points"] = grid_points;
    j["grid"] = {{"per_axis", grid_per_axis},
                 {"radius", grid_radius},
                 {"seed", seed}};
    j["eps"] = eps;
    return j;
  }
};

namespace detail {

// Newton inversion of F with analytic Jacobian: solve F(w) = y from a guess.
inline bool newton_invert(const HolomorphicMapExpr& map, const CVec& y,
                          CVec& w, double tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const CVec residual = map.eval(w) - y;
    const CVec step = map.jacobian(w).partialPivLu().solve(residual);
    w -= step;
    if (step.norm() <= tol) return true;
  }
  return false;
}

inline double op_norm(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a.adjoint() * a);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Central second differences with one Richardson sweep, on a real-valued
// function of (x_1..x_n, y_1..y_n).
template <typename Fn>
RMat fd_real_hessian(const Fn& f, const CVec& z, double h) {
  const int n = static_cast<int>(z.size());
  auto step = [&](int a, double s) {
    CVec e = CVec::Zero(n);
    if (a < n)
      e(a) = s;
    else
      e(a - n) = cplx(0.0, s);
    return e;
  };
  auto one = [&](double hh) {
    RMat hess(2 * n, 2 * n);
    const double f0 = f(z);
    for (int a = 0; a < 2 * n; ++a) {
      for (int b = a; b < 2 * n; ++b) {
        double v;
        if (a == b) {
          v = (f(z + step(a, hh)) - 2.0 * f0 + f(z - step(a, hh))) /
              (hh * hh);
        } else {
          v = (f(z + step(a, hh) + step(b, hh)) -
               f(z + step(a, hh) - step(b, hh)) -
               f(z - step(a, hh) + step(b, hh)) +
               f(z - step(a, hh) - step(b, hh))) /
              (4.0 * hh * hh);
        }
        hess(a, b) = v;
        hess(b, a) = v;
      }
    }
    return hess;
  };
  const RMat coarse = one(h);
  const RMat fine = one(h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

inline double angle_between(const RVec& a, const RVec& b) {
  const RVec u = a / a.norm();
  const RVec v = b / b.norm();
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm());
}

}  // namespace detail

inline VerificationReport verify_map(const HolomorphicMapExpr& map,
                                     const LocalDomain& domain,
                                     const CVec& zeta, double eps,
                                     const VerifyOptions& opts = {}) {
  const int n = domain.n();
  require(map.dim() == n, "verify_map: dimension mismatch");
  VerificationReport report;
  report.grid_per_axis = opts.grid_per_axis;
  report.grid_radius = domain.chart_radius();
  report.seed = opts.seed;
  report.eps = eps;

  // Deterministic grid of the chart closure intersected with {rho <= 0}.
  const CVec& center = domain.chart_center();
  const double radius = domain.chart_radius();
  const int g = opts.grid_per_axis;
  require(g >= 2, "verify_map: grid_per_axis must be >= 2");
  std::vector<CVec> points;
  std::vector<int> odo(2 * n, 0);
  CVec z(n);
  while (true) {
    for (int k = 0; k < n; ++k) {
      const double x = center(k).real() + radius * (2.0 * odo[k] / (g - 1) -
                                                    1.0);
      const double y = center(k).imag() +
                       radius * (2.0 * odo[n + k] / (g - 1) - 1.0);
      z(k) = cplx(x, y);
    }
    if ((z - center).norm() <= radius + 1e-12 &&
        domain.rho().eval(z) <= 1e-12)
      points.push_back(z);
    int axis = 0;
    while (axis < 2 * n && ++odo[axis] == g) odo[axis++] = 0;
    if (axis == 2 * n) break;
  }
  report.grid_points = static_cast<long>(points.size());
  require(!points.empty(), "verify_map: empty verification region");

  // Sup distances and the contraction constant.
  const CMat identity = CMat::Identity(n, n);
  for (const auto& p : points) {
    report.c0_dist = std::max(report.c0_dist, (map.eval(p) - p).norm());
    report.c1_dist = std::max(
        report.c1_dist, detail::op_norm(map.jacobian(p) - identity));
  }
  report.kappa = report.c1_dist;

  // Convexity probe of the region: midpoints of random point pairs must stay
  // inside the closure for the contraction certificate to apply.
  Rng rng(opts.seed ^ 0x636f6e7665786bULL);
  const auto pick = [&]() {
    return points[static_cast<size_t>(rng.u01() * points.size()) %
                  points.size()];
  };
  report.region_convex = true;
  for (int k = 0; k < opts.convexity_probe_pairs; ++k) {
    const CVec mid = 0.5 * (pick() + pick());
    if ((mid - center).norm() > radius + 1e-9 ||
        domain.rho().eval(mid) > 1e-9) {
      report.region_convex = false;
      break;
    }
  }
  report.injectivity_certificate = report.region_convex && report.kappa < 1.0;

  // Random-pair collision search: flag near-coincident images of separated
  // points.
  Rng rng2(opts.seed ^ 0x70616972ULL);
  for (int k = 0; k < opts.collision_pairs; ++k) {
    const CVec& a = points[static_cast<size_t>(rng2.u01() * points.size()) %
                           points.size()];
    const CVec& b = points[static_cast<size_t>(rng2.u01() * points.size()) %
                           points.size()];
    if ((a - b).norm() > 1e-6 && (map.eval(a) - map.eval(b)).norm() < 1e-10)
      ++report.collision_flags;
  }

  // Pushed-forward boundary shape at the image point y0 = F(zeta): Newton
  // inversion with the analytic Jacobian feeds second-order differences of
  // sigma = rho o F^{-1}.
  const CVec y0 = map.eval(zeta);
  report.newton_converged = true;
  auto sigma = [&](const CVec& y) {
    CVec w = zeta + (y - y0);  // start near the known preimage
    if (!detail::newton_invert(map, y, w, opts.newton_tol,
                               opts.newton_max_iter))
      report.newton_converged = false;
    return domain.rho().eval(w);
  };
  const RMat hess = detail::fd_real_hessian(sigma, y0, opts.fd_step);

  // Analytic chain rule for the image gradient: sigma = rho o F^{-1} has
  // dbar-gradient (J_F(zeta)^H)^{-1} dbar rho(zeta) at y0 (the inverse map
  // is holomorphic, so only the conjugated Jacobian acts on dbar rho).
  const Jet2 jet = eval_jet(domain.rho(), zeta);
  const CMat jac_h = map.jacobian(zeta).adjoint();
  const CVec pulled = jac_h.partialPivLu().solve(jet.dbar_grad);
  RVec grad_image(2 * n);
  for (int i = 0; i < n; ++i) {
    grad_image(i) = 2.0 * pulled(i).real();
    grad_image(n + i) = -2.0 * pulled(i).imag();
  }
  if (!report.newton_converged) {
    report.convexity_eig = std::numeric_limits<double>::quiet_NaN();
    report.tangency_err = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  const RMat basis = real_complement_basis(grad_image);
  Eigen::SelfAdjointEigenSolver<RMat> es(basis.transpose() * hess * basis);
  report.convexity_eig = es.eigenvalues().minCoeff();
  report.tangency_err =
      detail::angle_between(real_gradient(jet), grad_image);
  return report;
}

}  // namespace exposelab
