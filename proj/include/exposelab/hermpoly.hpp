#pragma once

// Real-valued Hermitian polynomials rho(z) = sum c_{ab} z^a zbar^b in n
// complex variables, with exact (symbolic) differentiation: Wirtinger
// gradient, holomorphic Hessian, Levi form, and the assembled real Hessian.
// These polynomials serve as defining functions for the domains studied by
// the rest of the library.

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exposelab/common.hpp"

namespace exposelab {

struct MonomialTerm {
  std::vector<int> alpha;  // exponents of z_1..z_n
  std::vector<int> beta;   // exponents of conj(z_1)..conj(z_n)
  cplx coeff;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Second-order jet of a real-valued function at a point.
//   dbar_grad(i)    = d rho / d z_i          (Wirtinger gradient, so the
//                     pairing d rho(zeta)(v) = sum_i dbar_grad(i) * v_i)
//   holo_hess(i,j)  = d^2 rho / d z_i d z_j  (symmetric)
//   levi(i,j)       = d^2 rho / d z_i d zbar_j (Hermitian)
//   real_hess       = 2n x 2n symmetric matrix in coordinates
//                     (x_1..x_n, y_1..y_n) with z_k = x_k + i y_k.
struct Jet2 {
  double value = 0.0;
  CVec dbar_grad;
  CMat holo_hess;
  CMat levi;
  RMat real_hess;
};

namespace detail {

// (x^k, k x^{k-1}, k(k-1) x^{k-2}) with the empty-product convention
// x^0 = 1; negative powers never arise because of the k factors.
struct PowJet {
  cplx p0, p1, p2;
};

inline PowJet pow_jet(cplx x, int k) {
  PowJet out{cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
  if (k >= 1) {
    cplx pm2(1.0, 0.0);  // x^{k-2} for k >= 2
    cplx pm1(1.0, 0.0);  // x^{k-1}
    for (int i = 0; i < k - 1; ++i) {
      if (i == k - 2) pm2 = pm1;
      pm1 *= x;
    }
    if (k == 1) pm2 = cplx(0.0, 0.0);  // unused (factor k-1 = 0)
    out.p0 = pm1 * x;
    out.p1 = static_cast<double>(k) * pm1;
    out.p2 = static_cast<double>(k) * static_cast<double>(k - 1) * pm2;
  }
  return out;
}

}  // namespace detail

class HermitianPolynomial {
 public:
  HermitianPolynomial(int n, std::vector<MonomialTerm> terms)
      : n_(n), terms_(std::move(terms)) {
    require(n_ >= 1, "HermitianPolynomial: dimension must be positive");
    for (const auto& t : terms_) {
      require(static_cast<int>(t.alpha.size()) == n_ &&
                  static_cast<int>(t.beta.size()) == n_,
              "HermitianPolynomial: multi-index length != n");
      for (int e : t.alpha) require(e >= 0, "negative exponent");
      for (int e : t.beta) require(e >= 0, "negative exponent");
    }
    canonicalize();
  }

  int n() const { return n_; }
  const std::vector<MonomialTerm>& terms() const { return terms_; }

  // Value as a complex sum (diagnostic; Hermitian polys are real).
  cplx eval_complex(const CVec& z) const {
    require(z.size() == n_, "eval: point dimension mismatch");
    cplx total(0.0, 0.0);
    for (const auto& t : terms_) {
      cplx prod = t.coeff;
      for (int i = 0; i < n_; ++i) {
        prod *= detail::pow_jet(z(i), t.alpha[i]).p0;
        prod *= detail::pow_jet(std::conj(z(i)), t.beta[i]).p0;
      }
      total += prod;
    }
    return total;
  }

  double eval(const CVec& z) const { return eval_complex(z).real(); }

  // Maximum per-variable degree across all terms (alpha_i + beta_i).
  int max_variable_degree() const {
    int d = 0;
    for (const auto& t : terms_)
      for (int i = 0; i < n_; ++i)
        d = std::max(d, std::max(t.alpha[i], t.beta[i]));
    return d;
  }

  static HermitianPolynomial from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

 private:
  void canonicalize() {
    // Merge duplicate (alpha, beta) pairs, drop zero coefficients, sort
    // lexicographically in (alpha, beta).
    std::map<std::pair<std::vector<int>, std::vector<int>>, cplx> merged;
    for (const auto& t : terms_) merged[{t.alpha, t.beta}] += t.coeff;
    terms_.clear();
    for (const auto& [key, c] : merged) {
      if (c == cplx(0.0, 0.0)) continue;
      terms_.push_back(MonomialTerm{key.first, key.second, c});
    }
    // std::map already iterates in lexicographic key order.
  }

  int n_;
  std::vector<MonomialTerm> terms_;
};

// ---------------------------------------------------------------------------
// Validation: Hermitian symmetry (every term (a, b, c) has partner
// (b, a, conj c)) plus canonical-form checks. Report-style, never throws.
// ---------------------------------------------------------------------------
inline ValidationReport validate(const HermitianPolynomial& poly) {
  ValidationReport report;
  const auto& terms = poly.terms();
  auto key_of = [](const MonomialTerm& t) {
    return std::make_pair(t.alpha, t.beta);
  };
  std::map<std::pair<std::vector<int>, std::vector<int>>, cplx> index;
  for (const auto& t : terms) index[key_of(t)] = t.coeff;

  auto describe = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::ostringstream os;
    os << "alpha=(";
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ") beta=(";
    for (size_t i = 0; i < b.size(); ++i) os << (i ? "," : "") << b[i];
    os << ")";
    return os.str();
  };

  for (const auto& t : terms) {
    const double scale = std::max(1.0, std::abs(t.coeff));
    if (t.alpha == t.beta) {
      if (std::abs(t.coeff.imag()) > 1e-12 * scale) {
        report.ok = false;
        report.violations.push_back("diagonal term " +
                                    describe(t.alpha, t.beta) +
                                    " has non-real coefficient");
      }
      continue;
    }
    auto it = index.find({t.beta, t.alpha});
    if (it == index.end()) {
      report.ok = false;
      report.violations.push_back("missing Hermitian partner for term " +
                                  describe(t.alpha, t.beta));
    } else if (std::abs(it->second - std::conj(t.coeff)) > 1e-12 * scale) {
      report.ok = false;
      report.violations.push_back("Hermitian partner of term " +
                                  describe(t.alpha, t.beta) +
                                  " has mismatched coefficient");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact second-order jet by per-term closed-form differentiation.
// ---------------------------------------------------------------------------
inline Jet2 eval_jet(const HermitianPolynomial& poly, const CVec& z) {
  const int n = poly.n();
  require(z.size() == n, "eval_jet: point dimension mismatch");

  Jet2 jet;
  jet.dbar_grad = CVec::Zero(n);
  jet.holo_hess = CMat::Zero(n, n);
  jet.levi = CMat::Zero(n, n);
  cplx value(0.0, 0.0);

  std::vector<detail::PowJet> za(n), zb(n);
  for (const auto& t : poly.terms()) {
    for (int i = 0; i < n; ++i) {
      za[i] = detail::pow_jet(z(i), t.alpha[i]);
      zb[i] = detail::pow_jet(std::conj(z(i)), t.beta[i]);
    }
    // product with variable k's z-factor (and optionally variable l's)
    // replaced by a derivative factor; repl arguments select which.
    auto product = [&](int dz1, int dz2, int dzb) {
      cplx prod = t.coeff;
      for (int i = 0; i < n; ++i) {
        cplx fa = za[i].p0;
        if (i == dz1 && i == dz2)
          fa = za[i].p2;
        else if (i == dz1 || i == dz2)
          fa = za[i].p1;
        cplx fb = (i == dzb) ? zb[i].p1 : zb[i].p0;
        prod *= fa * fb;
      }
      return prod;
    };

    value += product(-1, -1, -1);
    for (int k = 0; k < n; ++k) {
      if (t.alpha[k] == 0) continue;
      jet.dbar_grad(k) += product(k, -1, -1);
      for (int l = k; l < n; ++l) {
        if ((l == k && t.alpha[k] < 2) || (l != k && t.alpha[l] == 0))
          continue;
        const cplx h = product(k, l, -1);
        jet.holo_hess(k, l) += h;
        if (l != k) jet.holo_hess(l, k) += h;
      }
    }
    for (int k = 0; k < n; ++k) {
      if (t.alpha[k] == 0) continue;
      for (int l = 0; l < n; ++l) {
        if (t.beta[l] == 0) continue;
        jet.levi(k, l) += product(k, -1, l);
      }
    }
  }
  jet.value = value.real();

  // Real Hessian in coordinates (x_1..x_n, y_1..y_n), z = x + iy, from the
  // Wirtinger data: with H = holo_hess and L = levi,
  //   d2/dx_i dx_j = 2 Re H_ij + 2 Re L_ij
  //   d2/dy_i dy_j = -2 Re H_ij + 2 Re L_ij
  //   d2/dx_i dy_j = -2 Im H_ij + 2 Im L_ij
  jet.real_hess = RMat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double reH = jet.holo_hess(i, j).real();
      const double imH = jet.holo_hess(i, j).imag();
      const double reL = jet.levi(i, j).real();
      const double imL = jet.levi(i, j).imag();
      jet.real_hess(i, j) = 2.0 * reH + 2.0 * reL;
      jet.real_hess(n + i, n + j) = -2.0 * reH + 2.0 * reL;
      jet.real_hess(i, n + j) = -2.0 * imH + 2.0 * imL;
      jet.real_hess(n + j, i) = jet.real_hess(i, n + j);
    }
  }
  return jet;
}

// ---------------------------------------------------------------------------
// Affine pullback: the polynomial w -> rho(A w + b), expanded symbolically.
// Used to re-express defining functions in chart coordinates. Conjugate
// structure is preserved exactly (conjugation commutes with the arithmetic),
// so the result of pulling back a Hermitian polynomial is Hermitian.
// ---------------------------------------------------------------------------
namespace detail {

using Expansion = std::map<std::vector<int>, cplx>;  // multi-index -> coeff

// expansion *= (c0 + sum_j c(j) v_j), variables v_1..v_n.
inline Expansion multiply_linear(const Expansion& e, cplx c0, const CVec& c) {
  Expansion out;
  const int n = static_cast<int>(c.size());
  for (const auto& [idx, coeff] : e) {
    if (c0 != cplx(0.0, 0.0)) out[idx] += coeff * c0;
    for (int j = 0; j < n; ++j) {
      if (c(j) == cplx(0.0, 0.0)) continue;
      std::vector<int> bumped = idx;
      ++bumped[j];
      out[bumped] += coeff * c(j);
    }
  }
  return out;
}

}  // namespace detail

inline HermitianPolynomial pullback_affine(const HermitianPolynomial& poly,
                                           const CMat& A, const CVec& b) {
  const int n = poly.n();
  require(A.rows() == n && A.cols() == n && b.size() == n,
          "pullback_affine: shape mismatch");

  std::vector<MonomialTerm> out_terms;
  for (const auto& t : poly.terms()) {
    // Expand prod_i (b_i + sum_j A_ij w_j)^{alpha_i} in w, and the
    // conjugate-variable part prod_i (conj b_i + sum_j conj A_ij wb_j)^{beta_i}.
    detail::Expansion ez{{std::vector<int>(n, 0), cplx(1.0, 0.0)}};
    detail::Expansion ezb = ez;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < t.alpha[i]; ++k)
        ez = detail::multiply_linear(ez, b(i), A.row(i).transpose());
      for (int k = 0; k < t.beta[i]; ++k)
        ezb = detail::multiply_linear(ezb, std::conj(b(i)),
                                      A.row(i).transpose().conjugate());
    }
    for (const auto& [ia, ca] : ez)
      for (const auto& [ib, cb] : ezb)
        out_terms.push_back(MonomialTerm{ia, ib, t.coeff * ca * cb});
  }
  return HermitianPolynomial(n, std::move(out_terms));
}

// ---------------------------------------------------------------------------
// JSON serialization. Format:
//   { "n": int, "terms": [ { "alpha": [...], "beta": [...],
//                            "re": float, "im": float }, ... ] }
// The per-variable degree cap (8) is enforced here, at parse time.
// ---------------------------------------------------------------------------
inline constexpr int kMaxVariableDegree = 8;

inline HermitianPolynomial HermitianPolynomial::from_json(
    const nlohmann::json& j) {
  require(j.contains("n") && j.contains("terms"),
          "defining-function JSON: missing 'n' or 'terms'");
  const int n = j.at("n").get<int>();
  require(n >= 1, "defining-function JSON: n must be positive");
  std::vector<MonomialTerm> terms;
  int index = 0;
  for (const auto& jt : j.at("terms")) {
    MonomialTerm t;
    t.alpha = jt.at("alpha").get<std::vector<int>>();
    t.beta = jt.at("beta").get<std::vector<int>>();
    t.coeff = cplx(jt.value("re", 0.0), jt.value("im", 0.0));
    require(static_cast<int>(t.alpha.size()) == n &&
                static_cast<int>(t.beta.size()) == n,
            "term " + std::to_string(index) + ": multi-index length != n");
    for (int i = 0; i < n; ++i) {
      require(t.alpha[i] >= 0 && t.beta[i] >= 0,
              "term " + std::to_string(index) + ": negative exponent");
      require(t.alpha[i] <= kMaxVariableDegree &&
                  t.beta[i] <= kMaxVariableDegree,
              "term " + std::to_string(index) + ": exponent exceeds cap " +
                  std::to_string(kMaxVariableDegree));
    }
    terms.push_back(std::move(t));
    ++index;
  }
  return HermitianPolynomial(n, std::move(terms));
}

inline nlohmann::ordered_json HermitianPolynomial::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : terms_) {
    nlohmann::ordered_json jt;
    jt["alpha"] = t.alpha;
    jt["beta"] = t.beta;
    jt["re"] = t.coeff.real();
    jt["im"] = t.coeff.imag();
    j["terms"].push_back(jt);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Convenience builders.
// ---------------------------------------------------------------------------

// |z_i|^2 summed over all variables, minus a constant: ||z||^2 - c.
inline HermitianPolynomial ball_rho(int n, double c = 1.0) {
  std::vector<MonomialTerm> terms;
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    terms.push_back(MonomialTerm{e, e, cplx(1.0, 0.0)});
  }
  if (c != 0.0) {
    std::vector<int> zero(n, 0);
    terms.push_back(MonomialTerm{zero, zero, cplx(-c, 0.0)});
  }
  return HermitianPolynomial(n, std::move(terms));
}

// Terms for 2 Re(c z^alpha) = c z^alpha + conj(c) zbar^alpha.
inline void append_re_monomial(std::vector<MonomialTerm>& terms,
                               const std::vector<int>& alpha, cplx c) {
  const std::vector<int> zero(alpha.size(), 0);
  terms.push_back(MonomialTerm{alpha, zero, c});
  terms.push_back(MonomialTerm{zero, alpha, std::conj(c)});
}

// The recurring non-convex strongly pseudoconvex test domain in C^2:
//   rho = 2 Re z_2 + 3 Re(z_1^2) + |z_1|^2 + |z_2|^2.
inline HermitianPolynomial nonconvex_test_rho() {
  std::vector<MonomialTerm> terms;
  append_re_monomial(terms, {0, 1}, cplx(1.0, 0.0));        // 2 Re z2
  append_re_monomial(terms, {2, 0}, cplx(1.5, 0.0));        // 3 Re z1^2
  terms.push_back(MonomialTerm{{1, 0}, {1, 0}, cplx(1.0, 0.0)});  // |z1|^2
  terms.push_back(MonomialTerm{{0, 1}, {0, 1}, cplx(1.0, 0.0)});  // |z2|^2
  return HermitianPolynomial(2, std::move(terms));
}

}  // namespace exposelab
