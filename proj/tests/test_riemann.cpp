#include "exposelab/riemann.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <vector>

using namespace exposelab;
using Catch::Matchers::ContainsSubstring;

namespace {

// Deterministic polar test grid: `radii` circles up to rmax, `angles` points
// per circle, plus the origin.
std::vector<cplx> polar_grid(double rmax, int radii, int angles) {
  std::vector<cplx> pts{cplx(0.0, 0.0)};
  for (int i = 1; i <= radii; ++i) {
    const double r = rmax * i / radii;
    for (int j = 0; j < angles; ++j) {
      const double t = 2.0 * kPi * j / angles;
      pts.emplace_back(r * std::cos(t), r * std::sin(t));
    }
  }
  return pts;
}

// Star-shaped boundary of an ellipse about its center, sampled uniformly in
// the central angle so the radial-ray test sees an ordered closed curve.
std::vector<cplx> ellipse_sample(double semi_x, double semi_y, int n) {
  std::vector<cplx> pts;
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    const double c = std::cos(t), s = std::sin(t);
    const double rho = semi_x * semi_y /
                       std::sqrt(semi_y * semi_y * c * c +
                                 semi_x * semi_x * s * s);
    pts.emplace_back(rho * c, rho * s);
  }
  return pts;
}

// Boundary of a two-lobed pinched region (circles of radius 0.4 at +-1 joined
// by a thin straight neck at height +-0.05), ordered counterclockwise. Rays
// from the origin through the neck cross the boundary three times, so the
// region is not star-shaped about 0.
std::vector<cplx> pinched_boundary() {
  const double lobe = 0.4, half_height = 0.05;
  const double beta = std::asin(half_height / lobe);
  const double junction = std::sqrt(lobe * lobe - half_height * half_height);
  std::vector<cplx> pts;
  const int arc_n = 64, seg_n = 40;
  for (int j = 0; j < arc_n; ++j) {  // right lobe, through its rightmost point
    const double a = -(kPi - beta) + (2.0 * (kPi - beta)) * j / arc_n;
    pts.emplace_back(1.0 + lobe * std::cos(a), lobe * std::sin(a));
  }
  for (int j = 0; j < seg_n; ++j)  // top neck edge, right to left
    pts.emplace_back(junction - 2.0 * junction * j / seg_n, half_height);
  for (int j = 0; j < arc_n; ++j) {  // left lobe, through its leftmost point
    const double a = beta + (2.0 * kPi - 2.0 * beta) * j / arc_n;
    pts.emplace_back(-1.0 + lobe * std::cos(a), lobe * std::sin(a));
  }
  for (int j = 0; j < seg_n; ++j)  // bottom neck edge, left to right
    pts.emplace_back(-junction + 2.0 * junction * j / seg_n, -half_height);
  return pts;
}

}  // namespace

TEST_CASE("unit disk about -2 maps by the exact translation") {
  const auto result = riemann_map(RadialRegion::disk(cplx(-2.0, 0.0), 1.0));
  CHECK(result.psi.real_symmetric());
  CHECK(result.iterations <= 3);
  CHECK(std::abs(result.psi.eval(cplx(0.0, 0.0)) - cplx(-2.0, 0.0)) == 0.0);
  CHECK(result.derivative_at_zero == Catch::Approx(1.0).margin(1e-14));
  // log-derivative series of the translation is identically zero
  CHECK(result.coefficients.cwiseAbs().maxCoeff() < 1e-14);
  double worst = 0.0, worst_slope = 0.0;
  for (int j = 0; j < 257; ++j) {
    const double t = 2.0 * kPi * j / 257;
    const cplx z(std::cos(t), std::sin(t));
    worst = std::max(worst, std::abs(result.psi.eval(z) - (z - 2.0)));
    worst_slope = std::max(worst_slope, std::abs(result.psi.deriv(z) - 1.0));
  }
  CHECK(worst < 1e-12);
  CHECK(worst_slope < 1e-12);
}

TEST_CASE("off-center star point reproduces the disk automorphism") {
  // Unit disk seen from the interior point s: the boundary ray length is
  // rho(t) = -s cos t + sqrt(1 - s^2 sin^2 t). The unique self-map of the
  // disk with psi(0) = s, psi'(0) > 0 is the Moebius map (z+s)/(1+sz).
  const double s = 0.35;
  RadialRegion region;
  region.center = cplx(s, 0.0);
  region.conjugation_symmetric = true;
  region.radius = [s](double t) {
    const double sn = std::sin(t);
    return -s * std::cos(t) + std::sqrt(1.0 - s * s * sn * sn);
  };
  const auto result = riemann_map(region);
  const auto oracle = [s](cplx z) { return (z + s) / (1.0 + s * z); };
  const auto oracle_deriv = [s](cplx z) {
    const cplx den = 1.0 + s * z;
    return (1.0 - s * s) / (den * den);
  };
  CHECK(result.derivative_at_zero ==
        Catch::Approx(1.0 - s * s).epsilon(1e-10));
  double worst = 0.0, worst_slope = 0.0;
  for (const cplx& z : polar_grid(0.95, 12, 64)) {
    worst = std::max(worst, std::abs(result.psi.eval(z) - oracle(z)));
    worst_slope =
        std::max(worst_slope, std::abs(result.psi.deriv(z) - oracle_deriv(z)));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_slope < 1e-9);
}

TEST_CASE("ellipse map: normalizations, symmetry, boundary geometry") {
  const double a = 1.0, b = 0.8;
  const auto result =
      riemann_map(RadialRegion::ellipse(cplx(0.0, 0.0), a, b));

  CHECK(std::abs(result.psi.eval(cplx(0.0, 0.0))) == 0.0);
  // Conformal radius is sandwiched by the inscribed and circumscribed disks.
  CHECK(result.derivative_at_zero > b);
  CHECK(result.derivative_at_zero < a);
  CHECK(result.psi.real_symmetric());
  CHECK(result.psi.real_symmetry_defect() < 1e-12);

  // The boundary image must trace the ellipse: symmetric Hausdorff distance
  // between a dense image sample and a dense parametric sample of the true
  // boundary (dominated by the sampling gap, well under the 1e-3 gate).
  std::vector<cplx> image;
  for (int j = 0; j < 8192; ++j) {
    const double t = 2.0 * kPi * (j + 0.5) / 8192;
    image.push_back(result.psi.eval(cplx(std::cos(t), std::sin(t))));
  }
  std::vector<cplx> truth;
  for (int j = 0; j < 16384; ++j) {
    const double t = 2.0 * kPi * j / 16384;
    truth.emplace_back(a * std::cos(t), b * std::sin(t));
  }
  CHECK(hausdorff_distance(image, truth) < 1e-3);
}

TEST_CASE("boundary-sampled region agrees with its analytic-radius twin") {
  const auto sampled = RadialRegion::from_boundary_sample(
      cplx(0.0, 0.0), ellipse_sample(1.0, 0.8, 2048));
  CHECK(sampled.conjugation_symmetric);
  const auto from_sample = riemann_map(sampled);
  const auto from_radius =
      riemann_map(RadialRegion::ellipse(cplx(0.0, 0.0), 1.0, 0.8));
  double worst = 0.0;
  for (const cplx& z : polar_grid(0.9, 10, 48))
    worst = std::max(
        worst, std::abs(from_sample.psi.eval(z) - from_radius.psi.eval(z)));
  CHECK(worst < 1e-5);
}

TEST_CASE("pinched region fails the radial ray test") {
  CHECK_THROWS_WITH(
      RadialRegion::from_boundary_sample(cplx(0.0, 0.0), pinched_boundary()),
      ContainsSubstring("star-shape violation"));
}

TEST_CASE("sample validation: orientation, winding, degeneracy") {
  std::vector<cplx> clockwise;
  for (int j = 0; j < 32; ++j) {
    const double t = -2.0 * kPi * j / 32;
    clockwise.emplace_back(std::cos(t), std::sin(t));
  }
  CHECK_THROWS_WITH(
      RadialRegion::from_boundary_sample(cplx(0.0, 0.0), clockwise),
      ContainsSubstring("star-shape violation"));

  std::vector<cplx> doubled;
  for (int j = 0; j < 16; ++j) {
    const double t = 4.0 * kPi * j / 16;
    doubled.emplace_back(std::cos(t), std::sin(t));
  }
  CHECK_THROWS_WITH(
      RadialRegion::from_boundary_sample(cplx(0.0, 0.0), doubled),
      ContainsSubstring("winding"));

  CHECK_THROWS_WITH(RadialRegion::from_boundary_sample(
                        cplx(0.0, 0.0), std::vector<cplx>(4, cplx(1.0, 0.0))),
                    ContainsSubstring("too few"));
  CHECK_THROWS_WITH(RadialRegion::disk(cplx(0.0, 0.0), -1.0),
                    ContainsSubstring("positive"));
  CHECK_THROWS_WITH(RadialRegion::ellipse(cplx(0.0, 0.0), 1.0, 0.0),
                    ContainsSubstring("positive"));

  RadialRegion bad;
  bad.center = cplx(0.0, 0.0);
  bad.radius = [](double t) { return std::cos(t); };  // negative on a half
  CHECK_THROWS_WITH(riemann_map(bad), ContainsSubstring("positive"));
}

TEST_CASE("bumped disks converge to the translation as the bump shrinks") {
  // Disk of radius 1 about -2 with a localized radial bump of height delta:
  // the map deviation from z - 2 is first order in delta, so halving delta
  // should about halve the deviation.
  const auto deviation = [](double delta) {
    RadialRegion region;
    region.center = cplx(-2.0, 0.0);
    region.conjugation_symmetric = true;
    region.radius = [delta](double t) {
      return 1.0 + delta * std::exp(-8.0 * (1.0 - std::cos(t)));
    };
    const auto result = riemann_map(region);
    double worst = 0.0;
    for (const cplx& z : polar_grid(0.9, 12, 64))
      worst = std::max(worst, std::abs(result.psi.eval(z) - (z - 2.0)));
    return worst;
  };
  const double d1 = deviation(0.3), d2 = deviation(0.15), d3 = deviation(0.075);
  CHECK(d1 > d2);
  CHECK(d2 > d3);
  CHECK(d1 / d2 > 1.4);
  CHECK(d1 / d2 < 3.0);
  CHECK(d2 / d3 > 1.4);
  CHECK(d2 / d3 < 3.0);
}

TEST_CASE("series evaluator is holomorphic and matches the boundary table") {
  const auto result =
      riemann_map(RadialRegion::ellipse(cplx(0.0, 0.0), 1.0, 0.8));
  const auto& psi = result.psi;
  REQUIRE(psi.has_table());
  REQUIRE(psi.has_exact());

  Rng rng(20260815);
  const double h = 1e-5;
  for (int k = 0; k < 50; ++k) {
    const double r = std::sqrt(rng.u01()) * 0.9;
    const double t = rng.uniform(0.0, 2.0 * kPi);
    const cplx z(r * std::cos(t), r * std::sin(t));
    const cplx fx = (psi.eval(z + h) - psi.eval(z - h)) / (2.0 * h);
    const cplx fy =
        (psi.eval(z + cplx(0.0, h)) - psi.eval(z - cplx(0.0, h))) / (2.0 * h);
    const cplx dz = 0.5 * (fx - cplx(0.0, 1.0) * fy);
    const cplx dzbar = 0.5 * (fx + cplx(0.0, 1.0) * fy);
    CHECK(std::abs(dz - psi.deriv(z)) < 1e-7);
    CHECK(std::abs(dzbar) < 1e-8);
  }

  // Interior evaluation through the Cauchy integral over the attached table
  // agrees with the series.
  double gap = 0.0;
  for (const cplx& z : polar_grid(0.9, 10, 48))
    gap = std::max(gap,
                   std::abs(cauchy_eval(psi.table(), z).first - psi.eval(z)));
  CHECK(gap < 1e-8);
}

TEST_CASE("rerun determinism and option validation") {
  const auto region = RadialRegion::ellipse(cplx(0.0, 0.0), 1.0, 0.8);
  const auto first = riemann_map(region);
  const auto second = riemann_map(region);
  CHECK(first.iterations == second.iterations);
  CHECK((first.coefficients - second.coefficients).cwiseAbs().maxCoeff() ==
        0.0);
  REQUIRE(first.theta.size() == second.theta.size());
  for (std::size_t j = 0; j < first.theta.size(); ++j)
    CHECK(first.theta[j] == second.theta[j]);

  RiemannOptions strict;
  strict.max_iter = 3;
  CHECK_THROWS_WITH(riemann_map(region, strict),
                    ContainsSubstring("did not converge"));

  RiemannOptions odd_nodes;
  odd_nodes.nodes = 1000;
  CHECK_THROWS_WITH(riemann_map(region, odd_nodes),
                    ContainsSubstring("power of two"));

  RiemannOptions bad_omega;
  bad_omega.omega = 0.0;
  CHECK_THROWS_WITH(riemann_map(region, bad_omega),
                    ContainsSubstring("omega"));
}
