#include "exposelab/holomap.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "oracles.hpp"

using namespace exposelab;

namespace {

CVec random_cvec(Rng& rng, int n, double radius = 1.0) {
  CVec z(n);
  for (int i = 0; i < n; ++i)
    z(i) = radius * cplx(2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0);
  return z;
}

CMat random_cmat(Rng& rng, int n, double scale = 1.0) {
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = scale * cplx(2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0);
  return m;
}

// Well-conditioned random invertible matrix: I + small perturbation.
CMat random_invertible(Rng& rng, int n) {
  return CMat::Identity(n, n) + random_cmat(rng, n, 0.3);
}

CMat random_unitary(Rng& rng, int n) {
  Eigen::HouseholderQR<CMat> qr(random_cmat(rng, n));
  CMat q = qr.householderQ();
  return q;
}

// FD cross-check of eval-consistent Jacobian plus holomorphy defect.
void check_jacobian_fd(const HolomorphicMapExpr& map, const CVec& z,
                       double rel_tol = 1e-6, double dbar_tol = 1e-8) {
  CMat fd_dz, fd_dzbar;
  oracles::fd_map_jacobian([&](const CVec& w) { return map.eval(w); }, z,
                           1e-5, fd_dz, fd_dzbar);
  const CMat exact = map.jacobian(z);
  const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
  CHECK(oracles::max_entry_error(exact, fd_dz) < rel_tol * scale);
  CHECK(fd_dzbar.cwiseAbs().maxCoeff() < dbar_tol * scale);
}

OneVarMap cubic_map() {
  CVec c(4);
  c << cplx(0.1, 0.05), cplx(1.0, 0.0), cplx(0.0, 0.2), cplx(0.15, 0.0);
  return OneVarMap::from_monomial(c);
}

}  // namespace

TEST_CASE("affine primitive evaluates A z + b with Jacobian A") {
  Rng rng(101);
  const int n = 3;
  const CMat a = random_invertible(rng, n);
  const CVec b = random_cvec(rng, n);
  auto map = HolomorphicMapExpr(n).push_affine(a, b);

  for (int trial = 0; trial < 10; ++trial) {
    const CVec z = random_cvec(rng, n, 2.0);
    CHECK((map.eval(z) - (a * z + b)).norm() < 1e-14);
    CHECK(oracles::max_entry_error(map.jacobian(z), a) == 0.0);
  }
  check_jacobian_fd(map, random_cvec(rng, n));
}

TEST_CASE("affine primitive rejects singular matrices") {
  CMat a = CMat::Zero(2, 2);
  a(0, 0) = 1.0;  // rank 1
  CHECK_THROWS(HolomorphicMapExpr(2).push_affine(a, CVec::Zero(2)));
}

TEST_CASE("unitary primitive accepts unitary matrices only") {
  Rng rng(102);
  const int n = 2;
  const CMat u = random_unitary(rng, n);
  auto map = HolomorphicMapExpr(n).push_unitary(u);
  const CVec z = random_cvec(rng, n);
  CHECK((map.eval(z) - u * z).norm() < 1e-14);
  CHECK(oracles::max_entry_error(map.jacobian(z), u) == 0.0);

  CMat not_unitary = u;
  not_unitary(0, 0) *= 1.5;
  CHECK_THROWS(HolomorphicMapExpr(n).push_unitary(not_unitary));
}

TEST_CASE("shear adds a scalar polynomial to the last coordinate") {
  const int n = 2;
  // phi(z) = z1^2 + 2 z1 z2
  HoloPoly phi(n);
  phi.add_term({2, 0}, cplx(1.0, 0.0));
  phi.add_term({1, 1}, cplx(2.0, 0.0));
  auto map = HolomorphicMapExpr(n).push_shear_poly(std::move(phi));

  Rng rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const CVec z = random_cvec(rng, n);
    const CVec w = map.eval(z);
    CHECK(w(0) == z(0));
    CHECK(std::abs(w(1) - (z(1) + z(0) * z(0) + 2.0 * z(0) * z(1))) < 1e-14);
    check_jacobian_fd(map, z);
  }
}

TEST_CASE("shear Jacobian includes the dphi/dz_n term on the diagonal") {
  const int n = 2;
  HoloPoly phi(n);
  phi.add_term({0, 2}, cplx(1.0, 0.0));  // phi = z2^2
  auto map = HolomorphicMapExpr(n).push_shear_poly(std::move(phi));
  CVec z(2);
  z << cplx(0.3, 0.1), cplx(0.5, -0.2);
  const CMat jac = map.jacobian(z);
  CHECK(std::abs(jac(1, 1) - (1.0 + 2.0 * z(1))) < 1e-14);
  CHECK(std::abs(jac(1, 0)) == 0.0);
  CHECK(std::abs(jac(0, 1)) == 0.0);
}

TEST_CASE("one-variable primitive maps the last coordinate through f") {
  const int n = 3;
  auto map = HolomorphicMapExpr(n).push_one_var(cubic_map());
  Rng rng(104);
  for (int trial = 0; trial < 10; ++trial) {
    const CVec z = random_cvec(rng, n);
    const CVec w = map.eval(z);
    CHECK(w(0) == z(0));
    CHECK(w(1) == z(1));
    CHECK(std::abs(w(2) - cubic_map().eval(z(2))) < 1e-14);
    check_jacobian_fd(map, z);
  }
}

TEST_CASE("axial primitive rescales the slice by h(z_n)") {
  const int n = 3;
  CVec hc(2), fc(3);
  hc << cplx(1.0, 0.0), cplx(0.1, 0.05);           // h(z) = 1 + (0.1+0.05i) z
  fc << cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.2, 0.0);  // f(z) = z + 0.2 z^2
  auto map = HolomorphicMapExpr(n).push_axial(OneVarMap::from_monomial(hc),
                                              OneVarMap::from_monomial(fc));
  Rng rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    const CVec z = random_cvec(rng, n);
    const cplx h = 1.0 + cplx(0.1, 0.05) * z(2);
    const CVec w = map.eval(z);
    CHECK(std::abs(w(0) - h * z(0)) < 1e-14);
    CHECK(std::abs(w(1) - h * z(1)) < 1e-14);
    CHECK(std::abs(w(2) - (z(2) + 0.2 * z(2) * z(2))) < 1e-14);
    check_jacobian_fd(map, z);
  }
}

TEST_CASE("composition Jacobian equals the chain-rule product") {
  Rng rng(106);
  const int n = 2;
  HoloPoly phi(n);
  phi.add_term({2, 0}, cplx(0.5, 0.25));

  auto map = HolomorphicMapExpr(n)
                 .push_unitary(random_unitary(rng, n))
                 .push_shear_poly(phi)
                 .push_affine(random_invertible(rng, n), random_cvec(rng, n))
                 .push_one_var(cubic_map());

  for (int trial = 0; trial < 20; ++trial)
    check_jacobian_fd(map, random_cvec(rng, n));
}

TEST_CASE("then() concatenates two expressions") {
  Rng rng(107);
  const int n = 2;
  const CMat a = random_invertible(rng, n);
  const CVec b = random_cvec(rng, n);
  auto first = HolomorphicMapExpr(n).push_affine(a, b);
  auto second = HolomorphicMapExpr(n).push_one_var(cubic_map());
  auto composed = first.then(second);

  const CVec z = random_cvec(rng, n);
  CHECK((composed.eval(z) - second.eval(first.eval(z))).norm() < 1e-14);
  CHECK(oracles::max_entry_error(
            composed.jacobian(z),
            second.jacobian(first.eval(z)) * first.jacobian(z)) < 1e-12);

  // Wrapped factors must not be concatenated.
  CHECK_THROWS(first.with_isotopy(0.5).then(second));
}

TEST_CASE("conjugated shear fixes the center with identity Jacobian") {
  // F = T^{-1} o S o T  with T(z) = z - zeta and S a shear whose scalar part
  // vanishes to second order at 0: exact fixed point, exact identity Jacobian.
  const int n = 2;
  CVec zeta(2);
  zeta << cplx(0.4, -0.3), cplx(-0.2, 0.7);

  HoloPoly phi(n);
  phi.add_term({2, 0}, cplx(1.5, -0.5));
  phi.add_term({1, 1}, cplx(0.0, 2.0));

  auto map = HolomorphicMapExpr(n)
                 .push_affine(CMat::Identity(n, n), -zeta)
                 .push_shear_poly(phi)
                 .push_affine(CMat::Identity(n, n), zeta);

  CHECK((map.eval(zeta) - zeta).norm() == 0.0);
  CHECK(oracles::max_entry_error(map.jacobian(zeta), CMat::Identity(n, n)) ==
        0.0);

  Rng rng(108);
  for (int trial = 0; trial < 5; ++trial)
    check_jacobian_fd(map, random_cvec(rng, n));
}

TEST_CASE("scaling isotopy matches (1/t) F(t z)") {
  const int n = 2;
  auto map = HolomorphicMapExpr(n).push_one_var(cubic_map());
  Rng rng(109);
  const CVec z = random_cvec(rng, n);

  for (double t : {1.0, 0.5, 0.1, 1e-3}) {
    auto wrapped = map.with_isotopy(t);
    const CVec direct = (1.0 / t) * map.eval(t * z);
    CHECK((wrapped.eval(z) - direct).norm() < 1e-12);
    check_jacobian_fd(wrapped, z);
  }

  CHECK_THROWS(map.with_isotopy(0.0));
  CHECK_THROWS(map.with_isotopy(1.5));
}

TEST_CASE("isotopy limit recovers the linear part at the origin") {
  // f(z) = 0.1 + z + ... has f(0) != 0; the isotopy of the pure-last-variable
  // map with f(0) = 0, f'(0) = c converges to z -> (z', c z_n) linearly in t.
  const int n = 2;
  CVec fc(3);
  fc << cplx(0.0, 0.0), cplx(2.0, 1.0), cplx(0.3, 0.0);
  auto map = HolomorphicMapExpr(n).push_one_var(OneVarMap::from_monomial(fc));

  Rng rng(110);
  const CVec z = random_cvec(rng, n);
  CVec linear = z;
  linear(n - 1) *= cplx(2.0, 1.0);

  double prev = -1.0;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const double err = (map.with_isotopy(t).eval(z) - linear).norm();
    CHECK(err < 0.5 * t);  // |0.3| |z_n|^2 t with |z_n| <= sqrt(2)
    if (prev >= 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("random compositions stay holomorphic and FD-consistent") {
  Rng rng(111);
  const int n = 2;
  for (int rep = 0; rep < 20; ++rep) {
    auto map = HolomorphicMapExpr(n);
    const int len = 2 + static_cast<int>(rng.u01() * 3.0);
    for (int k = 0; k < len; ++k) {
      const double pick = rng.u01();
      if (pick < 0.3) {
        map.push_affine(random_invertible(rng, n), random_cvec(rng, n, 0.5));
      } else if (pick < 0.5) {
        map.push_unitary(random_unitary(rng, n));
      } else if (pick < 0.8) {
        HoloPoly phi(n);
        phi.add_term({2, 0}, cplx(rng.u01() - 0.5, rng.u01() - 0.5));
        phi.add_term({0, 2}, cplx(rng.u01() - 0.5, rng.u01() - 0.5));
        map.push_shear_poly(std::move(phi));
      } else {
        map.push_one_var(cubic_map());
      }
    }
    for (int trial = 0; trial < 5; ++trial)
      check_jacobian_fd(map, random_cvec(rng, n, 0.8));
  }
}
