#include "exposelab/hermpoly.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace exposelab;

namespace {

std::vector<int> e(int n, int i, int k = 1) {
  std::vector<int> v(n, 0);
  v[i] = k;
  return v;
}

// Random validated Hermitian polynomial: random (alpha, beta, c) terms with
// their Hermitian partners appended.
HermitianPolynomial random_hermitian(int n, int term_count, Rng& rng) {
  std::vector<MonomialTerm> terms;
  for (int t = 0; t < term_count; ++t) {
    std::vector<int> alpha(n), beta(n);
    for (int i = 0; i < n; ++i) {
      alpha[i] = static_cast<int>(rng.uniform(0.0, 3.999));
      beta[i] = static_cast<int>(rng.uniform(0.0, 3.999));
    }
    const cplx c(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    terms.push_back({alpha, beta, c});
    terms.push_back({beta, alpha, std::conj(c)});
  }
  return HermitianPolynomial(n, std::move(terms));
}

CVec random_point(int n, Rng& rng, double box = 1.0) {
  CVec z(n);
  for (int i = 0; i < n; ++i)
    z(i) = cplx(rng.uniform(-box, box), rng.uniform(-box, box));
  return z;
}

}  // namespace

TEST_CASE("validate accepts |z1|^2") {
  HermitianPolynomial p(2, {{e(2, 0), e(2, 0), cplx(1, 0)}});
  auto report = validate(p);
  CHECK(report.ok);
  CHECK(report.violations.empty());
}

TEST_CASE("validate rejects unpaired z1^2") {
  HermitianPolynomial q(2, {{{2, 0}, {0, 0}, cplx(1, 0)}});
  auto report = validate(q);
  REQUIRE_FALSE(report.ok);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].find("missing Hermitian partner") !=
        std::string::npos);
}

TEST_CASE("validate accepts the conjugate pair representing Re z1^2") {
  HermitianPolynomial p(2, {{{2, 0}, {0, 0}, cplx(0.5, 0)},
                            {{0, 0}, {2, 0}, cplx(0.5, 0)}});
  CHECK(validate(p).ok);
}

TEST_CASE("validate flags diagonal terms with imaginary coefficients") {
  HermitianPolynomial p(1, {{{1}, {1}, cplx(1.0, 0.5)}});
  auto report = validate(p);
  REQUIRE_FALSE(report.ok);
  CHECK(report.violations[0].find("non-real") != std::string::npos);
}

TEST_CASE("validate flags mismatched partner coefficients") {
  HermitianPolynomial p(1, {{{2}, {0}, cplx(1.0, 1.0)},
                            {{0}, {2}, cplx(1.0, 1.0)}});  // should be 1 - i
  auto report = validate(p);
  REQUIRE_FALSE(report.ok);
  CHECK(report.violations[0].find("mismatched") != std::string::npos);
}

TEST_CASE("canonicalization merges duplicates, drops zeros, sorts") {
  HermitianPolynomial p(1, {{{1}, {1}, cplx(2, 0)},
                            {{0}, {0}, cplx(3, 0)},
                            {{1}, {1}, cplx(-1, 0)},
                            {{2}, {2}, cplx(0, 0)}});
  REQUIRE(p.terms().size() == 2);
  CHECK(p.terms()[0].alpha == std::vector<int>{0});  // lex order
  CHECK(p.terms()[1].coeff == cplx(1, 0));
  // merging to exactly zero removes the term entirely
  HermitianPolynomial q(1, {{{1}, {1}, cplx(2, 0)}, {{1}, {1}, cplx(-2, 0)}});
  CHECK(q.terms().empty());
}

TEST_CASE("eval is real at many random points for validated polys") {
  Rng rng(20260815);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_hermitian(2, 6, rng);
    REQUIRE(validate(p).ok);
    double worst = 0.0;
    const int count = trial == 0 ? 1000000 : 2000;
    for (int i = 0; i < count; ++i) {
      const CVec z = random_point(2, rng);
      const cplx v = p.eval_complex(z);
      worst = std::max(worst,
                       std::abs(v.imag()) / std::max(1.0, std::abs(v.real())));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("jet of ||z||^2 - 1 at the origin") {
  auto p = ball_rho(3);
  REQUIRE(validate(p).ok);
  const Jet2 jet = eval_jet(p, CVec::Zero(3));
  CHECK(jet.value == Catch::Approx(-1.0));
  CHECK(jet.dbar_grad.norm() == Catch::Approx(0.0));
  CHECK(jet.holo_hess.norm() == Catch::Approx(0.0));
  CHECK(oracles::max_entry_error(jet.levi, CMat::Identity(3, 3)) < 1e-14);
  CHECK((jet.real_hess - 2.0 * RMat::Identity(6, 6)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("jet of the non-convex test domain at the origin") {
  // rho = 2 Re z2 + 3 Re(z1^2) + |z1|^2 + |z2|^2. Hand-computed jet:
  // d rho/dz = (0, 1); d2 rho/dz1^2 = 3; Levi = Identity; real Hessian in
  // (x1, x2, y1, y2) ordering is diag(8, 2, -4, 2).
  auto p = nonconvex_test_rho();
  REQUIRE(validate(p).ok);
  const Jet2 jet = eval_jet(p, CVec::Zero(2));
  CHECK(jet.value == Catch::Approx(0.0).margin(1e-15));
  CHECK(std::abs(jet.dbar_grad(0)) < 1e-15);
  CHECK(std::abs(jet.dbar_grad(1) - cplx(1, 0)) < 1e-15);
  CMat want_h = CMat::Zero(2, 2);
  want_h(0, 0) = 3.0;
  CHECK(oracles::max_entry_error(jet.holo_hess, want_h) < 1e-14);
  CHECK(oracles::max_entry_error(jet.levi, CMat::Identity(2, 2)) < 1e-14);
  RVec diag(4);
  diag << 8.0, 2.0, -4.0, 2.0;
  CHECK((jet.real_hess - RMat(diag.asDiagonal())).cwiseAbs().maxCoeff() <
        1e-14);

  // Independent cross-check of the hand computation by finite differences.
  auto f = [&](const CVec& z) { return p.eval(z); };
  const RMat fd = oracles::fd_real_hessian(f, CVec::Zero(2), 1e-5);
  CHECK((jet.real_hess - fd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("all jet components match finite-difference oracles") {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    auto p = random_hermitian(n, 5, rng);
    const CVec z = random_point(n, rng, 0.9);
    const Jet2 jet = eval_jet(p, z);
    auto f = [&](const CVec& w) { return p.eval(w); };

    const CVec fd_grad = oracles::fd_wirtinger_grad(f, z, 1e-5);
    const RMat fd_hess = oracles::fd_real_hessian_rich(f, z, 1e-3);
    CMat fd_holo, fd_levi;
    oracles::wirtinger_from_real_hessian(fd_hess, fd_holo, fd_levi);

    auto rel = [](double err, double scale) {
      return err / std::max(1.0, scale);
    };
    worst = std::max(worst, rel((jet.dbar_grad - fd_grad).cwiseAbs().maxCoeff(),
                                jet.dbar_grad.cwiseAbs().maxCoeff()));
    worst = std::max(worst, rel(oracles::max_entry_error(jet.holo_hess, fd_holo),
                                jet.holo_hess.cwiseAbs().maxCoeff()));
    worst = std::max(worst, rel(oracles::max_entry_error(jet.levi, fd_levi),
                                jet.levi.cwiseAbs().maxCoeff()));
    worst = std::max(worst,
                     rel((jet.real_hess - fd_hess).cwiseAbs().maxCoeff(),
                         jet.real_hess.cwiseAbs().maxCoeff()));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("real_hess quadratic form matches directional second difference") {
  Rng rng(99);
  auto p = random_hermitian(2, 4, rng);
  const CVec z = random_point(2, rng, 0.5);
  const Jet2 jet = eval_jet(p, z);
  for (int trial = 0; trial < 10; ++trial) {
    RVec v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.uniform(-1.0, 1.0);
    CVec dir(2);
    dir << cplx(v(0), v(2)), cplx(v(1), v(3));
    const double h = 1e-5;
    const double second =
        (p.eval(z + h * dir) - 2.0 * p.eval(z) + p.eval(z - h * dir)) /
        (h * h);
    const double form = v.dot(jet.real_hess * v);
    CHECK(std::abs(second - form) <
          1e-5 * std::max(1.0, std::abs(form)));
  }
}

TEST_CASE("jet matrices satisfy the structural symmetries") {
  Rng rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_hermitian(3, 5, rng);
    const CVec z = random_point(3, rng);
    const Jet2 jet = eval_jet(p, z);
    CHECK(oracles::max_entry_error(jet.holo_hess,
                                   jet.holo_hess.transpose()) < 1e-12);
    CHECK(oracles::max_entry_error(jet.levi, jet.levi.adjoint()) < 1e-12);
    CHECK((jet.real_hess - jet.real_hess.transpose()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("eval_jet rejects dimension mismatch") {
  auto p = ball_rho(2);
  CHECK_THROWS(eval_jet(p, CVec::Zero(3)));
}

TEST_CASE("JSON round trip preserves the polynomial") {
  auto p = nonconvex_test_rho();
  const auto j = p.to_json();
  auto q = HermitianPolynomial::from_json(j);
  REQUIRE(q.terms().size() == p.terms().size());
  for (size_t i = 0; i < p.terms().size(); ++i) {
    CHECK(q.terms()[i].alpha == p.terms()[i].alpha);
    CHECK(q.terms()[i].beta == p.terms()[i].beta);
    CHECK(q.terms()[i].coeff == p.terms()[i].coeff);
  }
  // serialization is canonical: round-tripping reproduces identical bytes
  CHECK(q.to_json().dump() == j.dump());
}

TEST_CASE("JSON parse enforces the per-variable degree cap") {
  nlohmann::json j = {
      {"n", 1},
      {"terms",
       {{{"alpha", {9}}, {"beta", {0}}, {"re", 1.0}, {"im", 0.0}}}}};
  CHECK_THROWS_WITH(HermitianPolynomial::from_json(j),
                    Catch::Matchers::ContainsSubstring("term 0"));
}

TEST_CASE("JSON parse rejects malformed input") {
  CHECK_THROWS(HermitianPolynomial::from_json(nlohmann::json::object()));
  nlohmann::json bad = {
      {"n", 2},
      {"terms",
       {{{"alpha", {1}}, {"beta", {0, 0}}, {"re", 1.0}, {"im", 0.0}}}}};
  CHECK_THROWS(HermitianPolynomial::from_json(bad));
}

TEST_CASE("affine pullback agrees with direct composition") {
  Rng rng(4242);
  auto p = nonconvex_test_rho();
  for (int trial = 0; trial < 5; ++trial) {
    CMat A(2, 2);
    CVec b(2);
    for (int i = 0; i < 2; ++i) {
      b(i) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
      for (int j = 0; j < 2; ++j)
        A(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    auto pulled = pullback_affine(p, A, b);
    CHECK(validate(pulled).ok);
    for (int k = 0; k < 20; ++k) {
      const CVec w = random_point(2, rng);
      const double direct = p.eval(A * w + b);
      const double via = pulled.eval(w);
      CHECK(std::abs(direct - via) < 1e-11 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("pullback of a high-degree poly keeps exactness") {
  // (|z|^2)^3 via |z1|^6: alpha = beta = (3). Pull back through w -> 2w + 1.
  HermitianPolynomial p(1, {{{3}, {3}, cplx(1, 0)}});
  CMat A(1, 1);
  A << cplx(2, 0);
  CVec b(1);
  b << cplx(1, 0);
  auto pulled = pullback_affine(p, A, b);
  Rng rng(5);
  for (int k = 0; k < 10; ++k) {
    CVec w(1);
    w << cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double direct = std::pow(std::norm(cplx(2, 0) * w(0) + cplx(1, 0)), 3);
    CHECK(pulled.eval(w) == Catch::Approx(direct).epsilon(1e-10));
  }
}
