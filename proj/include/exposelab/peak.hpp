#pragma once

// Peak functions with certified Gaussian decay: holomorphic f with f(zeta)=1,
// |f| < 1 on the rest of the domain closure, and a measured constant c with
// |f(z)| <= e^{-c ||z-zeta||^2}. All peaks are represented uniformly as
// f = e^{P} with P a holomorphic polynomial vanishing at zeta, which makes
// log|f| exact and chart re-expression a polynomial pullback.

#include <string>
#include <vector>

#include "exposelab/common.hpp"
#include "exposelab/geometry.hpp"
#include "exposelab/holopoly.hpp"

namespace exposelab {

enum class PeakKind { kBallModel, kConvexGradient, kUserSupplied };

inline const char* to_string(PeakKind k) {
  switch (k) {
    case PeakKind::kBallModel:
      return "ball-model";
    case PeakKind::kConvexGradient:
      return "convex-gradient";
    default:
      return "user-supplied";
  }
}

struct PeakFunction {
  PeakKind kind = PeakKind::kUserSupplied;
  CVec zeta;
  HoloPoly exponent{1};  // P with P(zeta) = 0; f = e^P
  double decay_c = 0.0;  // certified decay constant; 0 = not certified

  // ball-model payload (valid when kind == kBallModel)
  double ball_r = 0.0;
  CMat axis_unitary;

  cplx eval(const CVec& z) const { return std::exp(exponent.eval(z)); }
  double abs_value(const CVec& z) const {
    return std::exp(exponent.eval(z).real());
  }
  // log f and its gradient are exact polynomial evaluations.
  cplx log_eval(const CVec& z) const { return exponent.eval(z); }
  CVec log_grad(const CVec& z) const { return exponent.grad(z); }
};

// ---------------------------------------------------------------------------
// Constructors.
// ---------------------------------------------------------------------------

// Ball-model peak for B = {|w_1 + r|^2 + sum_{j>1} |w_j|^2 < r^2} in the axis
// chart w = U^*(z - zeta): f = e^{w_1}, which peaks at w = 0 and satisfies
// |f| <= e^{-||w||^2/(2r)} on the closed ball (the ball inequality gives
// 2 r Re w_1 <= -||w||^2).
inline PeakFunction make_ball_peak(double r, const CMat& axis_unitary,
                                   const CVec& zeta) {
  require(r > 0, "make_ball_peak: r must be positive");
  const int n = static_cast<int>(zeta.size());
  require(axis_unitary.rows() == n && axis_unitary.cols() == n,
          "make_ball_peak: unitary shape mismatch");
  PeakFunction peak;
  peak.kind = PeakKind::kBallModel;
  peak.zeta = zeta;
  peak.ball_r = r;
  peak.axis_unitary = axis_unitary;
  peak.decay_c = 1.0 / (2.0 * r);
  // P(z) = first coordinate of U^*(z - zeta).
  HoloPoly p(n);
  const CVec row = axis_unitary.col(0).conjugate();  // first row of U^*
  for (int k = 0; k < n; ++k) {
    std::vector<int> e(n, 0);
    e[k] = 1;
    p.add_term(e, row(k));
  }
  std::vector<int> zero(n, 0);
  p.add_term(zero, -row.conjugate().dot(zeta));
  peak.exponent = p;
  return peak;
}

inline PeakFunction make_ball_peak(int n, double r) {
  return make_ball_peak(r, CMat::Identity(n, n), CVec::Zero(n));
}

// The ball-model defining function in model coordinates:
// rho = ||z||^2 + 2 r Re z_1  (boundary through 0, center (-r, 0, ..., 0)).
inline HermitianPolynomial ball_model_rho(int n, double r) {
  std::vector<MonomialTerm> terms;
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    terms.push_back(MonomialTerm{e, e, cplx(1.0, 0.0)});
  }
  std::vector<int> e1(n, 0);
  e1[0] = 1;
  append_re_monomial(terms, e1, cplx(r, 0.0));
  return HermitianPolynomial(n, std::move(terms));
}

// ---------------------------------------------------------------------------
// Decay estimation: c* = min over closure samples z of
// (-log|f(z)|) / ||z - zeta||^2, returned with a multiplicative safety margin
// (1 - 1e-6). Returns 0 (uncertified) if any sample has |f| >= 1. Samples
// within 1e-8 of zeta are excluded (the z != zeta clause).
// ---------------------------------------------------------------------------
inline double estimate_decay(const PeakFunction& peak,
                             const LocalDomain& domain, int count,
                             std::uint64_t seed) {
  const auto samples = closure_sample(domain, count, seed);
  double c_star = std::numeric_limits<double>::infinity();
  for (const auto& z : samples) {
    const double d2 = (z - peak.zeta).squaredNorm();
    if (d2 < 1e-16) continue;
    const double neg_log_abs = -peak.log_eval(z).real();  // = -log|f(z)|
    if (neg_log_abs <= 0.0) return 0.0;                   // |f| >= 1
    c_star = std::min(c_star, neg_log_abs / d2);
  }
  if (!std::isfinite(c_star)) return 0.0;
  return std::max(0.0, c_star * (1.0 - 1e-6));
}

// ---------------------------------------------------------------------------
// Convex-gradient peak g(w) = e^{sum_k (d rho/d z_k)(zeta) (w_k - zeta_k)}.
// Valid (peak) only at convex boundary points; refuses otherwise.
// ---------------------------------------------------------------------------
inline PeakFunction make_convex_peak(const LocalDomain& domain,
                                     const CVec& zeta,
                                     int decay_samples = 4096,
                                     std::uint64_t decay_seed = 0x9e1dULL) {
  const double convexity = certify_convexity_at(domain, zeta);
  if (convexity <= 0.0)
    fail("make_convex_peak: boundary not convex at zeta (certificate " +
         std::to_string(convexity) + " <= 0); supply a user peak instead");

  const Jet2 jet = eval_jet(domain.rho(), zeta);
  const int n = domain.n();
  PeakFunction peak;
  peak.kind = PeakKind::kConvexGradient;
  peak.zeta = zeta;
  HoloPoly p(n);
  for (int k = 0; k < n; ++k) {
    std::vector<int> e(n, 0);
    e[k] = 1;
    p.add_term(e, jet.dbar_grad(k));
  }
  std::vector<int> zero(n, 0);
  p.add_term(zero, -jet.dbar_grad.conjugate().dot(zeta));
  peak.exponent = p;
  peak.decay_c = estimate_decay(peak, domain, decay_samples, decay_seed);
  return peak;
}

// User-supplied peak f = e^P; P must vanish at zeta. decay_c is certified by
// the same sampling measurement as the built-in constructions.
inline PeakFunction make_user_peak(const LocalDomain& domain, const CVec& zeta,
                                   const HoloPoly& exponent,
                                   int decay_samples = 4096,
                                   std::uint64_t decay_seed = 0x9e1dULL) {
  require(std::abs(exponent.eval(zeta)) < 1e-12,
          "make_user_peak: exponent must vanish at zeta (f(zeta) = 1)");
  PeakFunction peak;
  peak.kind = PeakKind::kUserSupplied;
  peak.zeta = zeta;
  peak.exponent = exponent;
  peak.decay_c = estimate_decay(peak, domain, decay_samples, decay_seed);
  return peak;
}

// ---------------------------------------------------------------------------
// Family with a shared decay constant (the minimum over members).
// ---------------------------------------------------------------------------
inline std::vector<PeakFunction> make_peak_family(
    const LocalDomain& domain, const std::vector<CVec>& zetas,
    int decay_samples = 4096, std::uint64_t decay_seed = 0x9e1dULL) {
  require(!zetas.empty(), "make_peak_family: empty zeta list");
  std::vector<PeakFunction> family;
  family.reserve(zetas.size());
  for (size_t i = 0; i < zetas.size(); ++i) {
    try {
      family.push_back(
          make_convex_peak(domain, zetas[i], decay_samples, decay_seed));
    } catch (const std::exception& e) {
      fail("make_peak_family: member " + std::to_string(i) + ": " + e.what());
    }
  }
  double shared = std::numeric_limits<double>::infinity();
  for (const auto& p : family) shared = std::min(shared, p.decay_c);
  for (auto& p : family) p.decay_c = shared;
  return family;
}

// ---------------------------------------------------------------------------
// Certification report: max over closure samples of |f(z)| e^{c||z-zeta||^2},
// which must not exceed 1 + 1e-9 for a valid certificate.
// ---------------------------------------------------------------------------
struct PeakReport {
  std::string kind;
  CVec zeta;
  double decay_c = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  double max_violation = 0.0;  // max |f| e^{c d^2} - 1 over samples
  bool certified = false;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["zeta"] = nlohmann::ordered_json::array();
    for (int i = 0; i < zeta.size(); ++i)
      j["zeta"].push_back({zeta(i).real(), zeta(i).imag()});
    j["decay_c"] = decay_c;
    j["samples"] = samples;
    j["seed"] = seed;
    j["max_violation"] = max_violation;
    j["certified"] = certified;
    return j;
  }
};

inline PeakReport certify_peak(const PeakFunction& peak,
                               const LocalDomain& domain, int count,
                               std::uint64_t seed) {
  PeakReport report;
  report.kind = to_string(peak.kind);
  report.zeta = peak.zeta;
  report.decay_c = peak.decay_c;
  report.samples = count;
  report.seed = seed;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& z : closure_sample(domain, count, seed)) {
    // log of |f(z)| e^{c d^2} computed exactly in the exponent.
    const double log_ratio = peak.log_eval(z).real() +
                             peak.decay_c * (z - peak.zeta).squaredNorm();
    worst = std::max(worst, std::expm1(log_ratio));
  }
  report.max_violation = worst;
  report.certified = peak.decay_c > 0.0 && worst <= 1e-9;
  return report;
}

}  // namespace exposelab
