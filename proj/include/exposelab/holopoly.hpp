#pragma once

// Sparse holomorphic polynomials P(z) = sum c_alpha z^alpha in n complex
// variables: evaluation, exact Wirtinger derivatives, and affine pullback.
// Used as exponents of peak functions (f = e^P) and as scalar parts of
// holomorphic shears.

#include <json.hpp>

#include <map>
#include <utility>
#include <vector>

#include "exposelab/common.hpp"
#include "exposelab/hermpoly.hpp"

namespace exposelab {

class HoloPoly {
 public:
  explicit HoloPoly(int n) : n_(n) { require(n >= 1, "HoloPoly: n >= 1"); }

  HoloPoly(int n, std::map<std::vector<int>, cplx> terms)
      : n_(n), terms_(std::move(terms)) {
    require(n >= 1, "HoloPoly: n >= 1");
    for (const auto& [alpha, c] : terms_) {
      require(static_cast<int>(alpha.size()) == n_,
              "HoloPoly: multi-index length != n");
      for (int e : alpha) require(e >= 0, "HoloPoly: negative exponent");
    }
    prune();
  }

  int n() const { return n_; }
  const std::map<std::vector<int>, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const std::vector<int>& alpha, cplx c) {
    require(static_cast<int>(alpha.size()) == n_,
            "HoloPoly: multi-index length != n");
    terms_[alpha] += c;
    if (terms_[alpha] == cplx(0.0, 0.0)) terms_.erase(alpha);
  }

  cplx eval(const CVec& z) const {
    require(z.size() == n_, "HoloPoly::eval: dimension mismatch");
    cplx total(0.0, 0.0);
    for (const auto& [alpha, c] : terms_) {
      cplx prod = c;
      for (int i = 0; i < n_; ++i) prod *= detail::pow_jet(z(i), alpha[i]).p0;
      total += prod;
    }
    return total;
  }

  // Wirtinger gradient dP/dz_k (holomorphic, so this is the full derivative).
  CVec grad(const CVec& z) const {
    require(z.size() == n_, "HoloPoly::grad: dimension mismatch");
    CVec g = CVec::Zero(n_);
    std::vector<detail::PowJet> pw(n_);
    for (const auto& [alpha, c] : terms_) {
      for (int i = 0; i < n_; ++i) pw[i] = detail::pow_jet(z(i), alpha[i]);
      for (int k = 0; k < n_; ++k) {
        if (alpha[k] == 0) continue;
        cplx prod = c;
        for (int i = 0; i < n_; ++i) prod *= (i == k) ? pw[i].p1 : pw[i].p0;
        g(k) += prod;
      }
    }
    return g;
  }

  // P(A w + b), expanded exactly.
  HoloPoly pullback_affine(const CMat& A, const CVec& b) const {
    require(A.rows() == n_ && A.cols() == n_ && b.size() == n_,
            "HoloPoly::pullback_affine: shape mismatch");
    std::map<std::vector<int>, cplx> out;
    for (const auto& [alpha, c] : terms_) {
      detail::Expansion e{{std::vector<int>(n_, 0), cplx(1.0, 0.0)}};
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < alpha[i]; ++k)
          e = detail::multiply_linear(e, b(i), A.row(i).transpose());
      for (const auto& [idx, coeff] : e) out[idx] += c * coeff;
    }
    return HoloPoly(n_, std::move(out));
  }

  HoloPoly scaled(cplx factor) const {
    std::map<std::vector<int>, cplx> out = terms_;
    for (auto& [alpha, c] : out) c *= factor;
    return HoloPoly(n_, std::move(out));
  }

  static HoloPoly from_json(int n, const nlohmann::json& j) {
    std::map<std::vector<int>, cplx> terms;
    for (const auto& jt : j) {
      auto alpha = jt.at("alpha").get<std::vector<int>>();
      terms[alpha] += cplx(jt.value("re", 0.0), jt.value("im", 0.0));
    }
    return HoloPoly(n, std::move(terms));
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [alpha, c] : terms_) {
      nlohmann::ordered_json jt;
      jt["alpha"] = alpha;
      jt["re"] = c.real();
      jt["im"] = c.imag();
      arr.push_back(jt);
    }
    return arr;
  }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == cplx(0.0, 0.0)) ? terms_.erase(it) : std::next(it);
  }

  int n_;
  std::map<std::vector<int>, cplx> terms_;
};

}  // namespace exposelab
