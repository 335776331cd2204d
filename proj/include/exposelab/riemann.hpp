#pragma once
// Numerical conformal maps of star-shaped plane regions: the classical
// boundary-correspondence iteration (conjugation of the log-radius via FFT)
// produces the map psi of the unit disk onto the region with psi(0) at the
// star center and psi'(0) > 0. The result carries an exact power-series
// evaluator plus the boundary-value table.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "exposelab/common.hpp"
#include "exposelab/onevar.hpp"

namespace exposelab {

// ---------------------------------------------------------------------------
// A region star-shaped about `center`: boundary point at angle theta is
// center + radius(theta) e^{i theta}, radius positive and 2 pi periodic.
// ---------------------------------------------------------------------------
struct RadialRegion {
  cplx center{0.0, 0.0};
  std::function<double(double)> radius;
  bool conjugation_symmetric = false;

  static RadialRegion disk(cplx center, double r) {
    require(r > 0.0, "RadialRegion::disk: radius must be positive");
    RadialRegion region;
    region.center = center;
    region.radius = [r](double) { return r; };
    region.conjugation_symmetric = std::abs(center.imag()) < 1e-15;
    return region;
  }

  static RadialRegion ellipse(cplx center, double semi_x, double semi_y) {
    require(semi_x > 0.0 && semi_y > 0.0,
            "RadialRegion::ellipse: semi-axes must be positive");
    RadialRegion region;
    region.center = center;
    region.radius = [semi_x, semi_y](double t) {
      const double c = std::cos(t), s = std::sin(t);
      return semi_x * semi_y /
             std::sqrt(semi_y * semi_y * c * c + semi_x * semi_x * s * s);
    };
    region.conjugation_symmetric = std::abs(center.imag()) < 1e-15;
    return region;
  }

  // Radial ray test on an ordered closed boundary sample: the argument about
  // the center must be strictly monotone with total winding one, otherwise
  // some ray meets the boundary more than once and the region is not
  // star-shaped about the center.
  static RadialRegion from_boundary_sample(cplx center,
                                           const std::vector<cplx>& points) {
    require(points.size() >= 8, "from_boundary_sample: too few points");
    const int n = static_cast<int>(points.size());
    std::vector<double> angle(n), rad(n);
    for (int j = 0; j < n; ++j) {
      rad[j] = std::abs(points[j] - center);
      require(rad[j] > 1e-12,
              "from_boundary_sample: boundary touches the center");
    }
    angle[0] = std::arg(points[0] - center);
    for (int j = 1; j <= n; ++j) {
      double step = std::arg(points[j % n] - center) -
                    std::arg(points[j - 1] - center);
      while (step <= -kPi) step += 2.0 * kPi;
      while (step > kPi) step -= 2.0 * kPi;
      if (step <= 0.0)
        fail("from_boundary_sample: star-shape violation (boundary argument "
             "about the center is not strictly increasing)");
      if (j < n) {
        angle[j] = angle[j - 1] + step;
      } else if (std::abs(angle[n - 1] + step - angle[0] - 2.0 * kPi) > 1e-6) {
        fail("from_boundary_sample: boundary winding about the center is not "
             "one");
      }
    }

    // Conjugation symmetry: the sample set must be closed under conjugation.
    double conj_defect = 0.0;
    for (int j = 0; j < n; ++j) {
      const cplx target = std::conj(points[j]);
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k)
        best = std::min(best, std::abs(points[k] - target));
      conj_defect = std::max(conj_defect, best);
    }

    // Periodic linear interpolation of radius versus angle.
    const double base = angle[0];
    std::vector<double> a_sorted(n + 1), r_sorted(n + 1);
    for (int j = 0; j < n; ++j) {
      a_sorted[j] = angle[j] - base;
      r_sorted[j] = rad[j];
    }
    a_sorted[n] = 2.0 * kPi;
    r_sorted[n] = rad[0];

    RadialRegion region;
    region.center = center;
    region.conjugation_symmetric =
        std::abs(center.imag()) < 1e-15 && conj_defect < 1e-12;
    region.radius = [a_sorted = std::move(a_sorted),
                     r_sorted = std::move(r_sorted), base](double t) {
      double x = std::fmod(t - base, 2.0 * kPi);
      if (x < 0.0) x += 2.0 * kPi;
      const auto it =
          std::upper_bound(a_sorted.begin(), a_sorted.end(), x);
      const int hi = std::min<int>(
          static_cast<int>(it - a_sorted.begin()),
          static_cast<int>(a_sorted.size()) - 1);
      const int lo = std::max(0, hi - 1);
      const double span = a_sorted[hi] - a_sorted[lo];
      const double w = span > 0.0 ? (x - a_sorted[lo]) / span : 0.0;
      return (1.0 - w) * r_sorted[lo] + w * r_sorted[hi];
    };
    return region;
  }
};

struct RiemannOptions {
  int nodes = 2048;        // power of two (FFT grid on the circle)
  double omega = 0.5;      // under-relaxation of the angle update
  double tol = 1e-13;      // sup-norm stopping threshold on the update
  int max_iter = 10000;
};

struct RiemannMapResult {
  OneVarMap psi;
  cplx center{0.0, 0.0};
  double derivative_at_zero = 0.0;
  int iterations = 0;
  double residual = 0.0;
  CVec coefficients;        // c_k of g; psi(z) = center + z exp(sum c_k z^k)
  std::vector<double> theta;  // boundary correspondence at the grid nodes
};

namespace detail {

// psi(z) = center + z exp(g(z)) with polynomial g: evaluation and derivative
// by one Horner pass each.
class SeriesDiskMap final : public ExactOneVar {
 public:
  SeriesDiskMap(cplx center, CVec coeffs)
      : center_(center), c_(std::move(coeffs)) {}

  cplx eval(cplx z) const override {
    return center_ + z * std::exp(horner(z));
  }
  cplx deriv(cplx z) const override {
    const cplx g = horner(z);
    return std::exp(g) * (1.0 + z * horner_deriv(z));
  }

 private:
  cplx horner(cplx z) const {
    cplx acc(0.0, 0.0);
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k)
      acc = acc * z + c_(k);
    return acc;
  }
  cplx horner_deriv(cplx z) const {
    cplx acc(0.0, 0.0);
    for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k)
      acc = acc * z + static_cast<double>(k) * c_(k);
    return acc;
  }

  cplx center_;
  CVec c_;
};

// Circle conjugation: for real samples of u, returns the boundary values of
// the imaginary part of the analytic completion (multiplier -i sign k).
inline std::vector<double> conjugate_periodic(Eigen::FFT<double>& fft,
                                              const std::vector<double>& u) {
  const int n = static_cast<int>(u.size());
  std::vector<std::complex<double>> time(u.begin(), u.end()), freq(n);
  fft.fwd(freq, time);
  for (int k = 0; k < n; ++k) {
    if (k == 0 || 2 * k == n) {
      freq[k] = 0.0;
    } else if (2 * k < n) {
      freq[k] *= std::complex<double>(0.0, -1.0);
    } else {
      freq[k] *= std::complex<double>(0.0, 1.0);
    }
  }
  fft.inv(time, freq);
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = time[k].real();
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The boundary-correspondence iteration: find theta(t) with
//   theta(t) = t + conjugate(log radius(theta))(t),
// then complete log radius + i (theta - t) analytically into g and return
// psi(z) = center + z exp(g(z)). psi(0) = center exactly by construction and
// psi'(0) = e^{g(0)} > 0, which pins the rotation normalization.
// ---------------------------------------------------------------------------
inline RiemannMapResult riemann_map(const RadialRegion& region,
                                    const RiemannOptions& opts = {}) {
  require(static_cast<bool>(region.radius), "riemann_map: region has no radius");
  const int n = opts.nodes;
  require(n >= 64 && (n & (n - 1)) == 0,
          "riemann_map: nodes must be a power of two >= 64");
  require(opts.omega > 0.0 && opts.omega <= 1.0,
          "riemann_map: omega must lie in (0, 1]");

  std::vector<double> t(n), theta(n), u(n);
  for (int j = 0; j < n; ++j) t[j] = 2.0 * kPi * j / n;
  theta = t;

  Eigen::FFT<double> fft;
  const auto log_radius = [&](double th) {
    const double r = region.radius(th);
    if (!(r > 0.0))
      fail("riemann_map: radius must stay positive (region not star-shaped "
           "about the center)");
    return std::log(r);
  };

  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (; iterations < opts.max_iter; ++iterations) {
    for (int j = 0; j < n; ++j) u[j] = log_radius(theta[j]);
    const std::vector<double> v = detail::conjugate_periodic(fft, u);
    residual = 0.0;
    for (int j = 0; j < n; ++j) {
      const double next = t[j] + v[j];
      residual = std::max(residual, std::abs(next - theta[j]));
      theta[j] = (1.0 - opts.omega) * theta[j] + opts.omega * next;
    }
    if (region.conjugation_symmetric) {
      // theta(-t) = -theta(t): keep the perturbation exactly odd.
      theta[0] = 0.0;
      for (int j = 1; 2 * j < n; ++j) {
        const double odd =
            0.5 * ((theta[j] - t[j]) - (theta[n - j] - t[n - j]));
        theta[j] = t[j] + odd;
        theta[n - j] = t[n - j] - odd;
      }
      if (n % 2 == 0) theta[n / 2] = t[n / 2];
    }
    if (residual < opts.tol) break;
  }
  if (residual >= opts.tol)
    fail("riemann_map: boundary correspondence iteration did not converge "
         "within " +
         std::to_string(opts.max_iter) + " iterations (residual " +
         std::to_string(residual) + ")");

  // Analytic completion: u = Re g on the circle determines g up to the
  // imaginary constant, which the positive-derivative normalization kills.
  for (int j = 0; j < n; ++j) u[j] = log_radius(theta[j]);
  std::vector<std::complex<double>> time(u.begin(), u.end()), freq(n);
  fft.fwd(freq, time);
  const int terms = n / 2 + 1;
  CVec coeffs(terms);
  coeffs(0) = cplx(freq[0].real() / n, 0.0);
  for (int k = 1; k < n / 2; ++k) coeffs(k) = 2.0 * freq[k] / double(n);
  coeffs(n / 2) = freq[n / 2] / double(n);
  if (region.conjugation_symmetric)
    for (int k = 0; k < terms; ++k) coeffs(k) = cplx(coeffs(k).real(), 0.0);

  RiemannMapResult result;
  result.center = region.center;
  result.coefficients = coeffs;
  result.iterations = iterations + 1;
  result.residual = residual;
  result.theta = theta;
  result.derivative_at_zero = std::exp(coeffs(0).real());

  CVec boundary(n);
  for (int j = 0; j < n; ++j)
    boundary(j) = region.center +
                  region.radius(theta[j]) *
                      cplx(std::cos(theta[j]), std::sin(theta[j]));
  result.psi = OneVarMap::from_table(std::move(boundary));
  result.psi.attach_exact(
      std::make_shared<detail::SeriesDiskMap>(region.center, coeffs));
  result.psi.set_real_symmetric(region.conjugation_symmetric);
  return result;
}

// Symmetric Hausdorff distance between two boundary samples.
inline double hausdorff_distance(const std::vector<cplx>& a,
                                 const std::vector<cplx>& b) {
  require(!a.empty() && !b.empty(), "hausdorff_distance: empty sample");
  const auto one_sided = [](const std::vector<cplx>& from,
                            const std::vector<cplx>& to) {
    double worst = 0.0;
    for (const cplx& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& q : to) best = std::min(best, std::norm(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::sqrt(std::max(one_sided(a, b), one_sided(b, a)));
}

}  // namespace exposelab
