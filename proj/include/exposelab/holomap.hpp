#pragma once

// Composable holomorphic self-maps of C^n with exact chain-rule Jacobians.
//
// A HolomorphicMapExpr is an ordered composition of primitive maps; eval
// applies the primitives first-to-last and jacobian() assembles the exact
// chain-rule product of the primitives' Jacobians.  An optional scaling
// isotopy wraps the whole composition as z -> (1/t) F(t z) with t in (0, 1].
//
// Primitives:
//   affine   z -> A z + b                (A invertible)
//   unitary  z -> U z                    (affine with U*U = I, b = 0)
//   shear    z -> (z', z_n + phi(z))     (phi scalar holomorphic)
//   one-var  z -> (z', f(z_n))           (f a OneVarMap)
//   axial    z -> (h(z_n) z', f(z_n))    (radial rescale driven by z_n)

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/LU>

#include "exposelab/common.hpp"
#include "exposelab/holopoly.hpp"
#include "exposelab/onevar.hpp"

namespace exposelab {

// Scalar holomorphic building block for shears: value plus the full
// holomorphic gradient (dphi/dz_1, ..., dphi/dz_n).
class ScalarHoloExpr {
 public:
  virtual ~ScalarHoloExpr() = default;
  virtual cplx value(const CVec& z) const = 0;
  virtual CVec gradient(const CVec& z) const = 0;
};

class PolyScalarExpr final : public ScalarHoloExpr {
 public:
  explicit PolyScalarExpr(HoloPoly poly) : poly_(std::move(poly)) {}
  cplx value(const CVec& z) const override { return poly_.eval(z); }
  CVec gradient(const CVec& z) const override { return poly_.grad(z); }

 private:
  HoloPoly poly_;
};

namespace prim {

struct Affine {
  CMat matrix;
  CVec offset;
  bool unitary = false;
};

struct Shear {
  std::shared_ptr<const ScalarHoloExpr> phi;
};

struct OneVarLast {
  OneVarMap f;
};

struct Axial {
  OneVarMap scale;  // h, multiplies the first n-1 coordinates
  OneVarMap last;   // f, replaces the last coordinate
};

using Any = std::variant<Affine, Shear, OneVarLast, Axial>;

}  // namespace prim

class HolomorphicMapExpr {
 public:
  explicit HolomorphicMapExpr(int dim) : dim_(dim) {
    require(dim >= 1, "HolomorphicMapExpr: dim >= 1");
  }

  static HolomorphicMapExpr identity(int dim) {
    return HolomorphicMapExpr(dim);
  }

  int dim() const { return dim_; }
  double isotopy_time() const { return t_; }
  size_t size() const { return prims_.size(); }

  HolomorphicMapExpr& push_affine(CMat matrix, CVec offset) {
    require(matrix.rows() == dim_ && matrix.cols() == dim_ &&
                offset.size() == dim_,
            "push_affine: shape mismatch");
    Eigen::FullPivLU<CMat> lu(matrix);
    require(lu.isInvertible(), "push_affine: matrix is singular");
    prims_.push_back(prim::Affine{std::move(matrix), std::move(offset), false});
    return *this;
  }

  HolomorphicMapExpr& push_unitary(CMat matrix) {
    require(matrix.rows() == dim_ && matrix.cols() == dim_,
            "push_unitary: shape mismatch");
    const double defect =
        (matrix.adjoint() * matrix - CMat::Identity(dim_, dim_))
            .cwiseAbs()
            .maxCoeff();
    require(defect < 1e-12, "push_unitary: matrix is not unitary");
    prims_.push_back(
        prim::Affine{std::move(matrix), CVec::Zero(dim_), true});
    return *this;
  }

  HolomorphicMapExpr& push_shear(std::shared_ptr<const ScalarHoloExpr> phi) {
    require(phi != nullptr, "push_shear: null scalar expression");
    prims_.push_back(prim::Shear{std::move(phi)});
    return *this;
  }

  HolomorphicMapExpr& push_shear_poly(HoloPoly phi) {
    require(phi.n() == dim_, "push_shear_poly: dimension mismatch");
    return push_shear(std::make_shared<PolyScalarExpr>(std::move(phi)));
  }

  HolomorphicMapExpr& push_one_var(OneVarMap f) {
    prims_.push_back(prim::OneVarLast{std::move(f)});
    return *this;
  }

  HolomorphicMapExpr& push_axial(OneVarMap scale, OneVarMap last) {
    prims_.push_back(prim::Axial{std::move(scale), std::move(last)});
    return *this;
  }

  // Composition g o this (apply this first, then g).  Both factors must be
  // unwrapped; apply with_isotopy to the composed result instead.
  HolomorphicMapExpr then(const HolomorphicMapExpr& g) const {
    require(dim_ == g.dim_, "then: dimension mismatch");
    require(t_ == 1.0 && g.t_ == 1.0,
            "then: compose before applying an isotopy");
    HolomorphicMapExpr out = *this;
    out.prims_.insert(out.prims_.end(), g.prims_.begin(), g.prims_.end());
    return out;
  }

  // Scaling isotopy z -> (1/t) F(t z).  At t = 1 this is F itself; the
  // limit t -> 0+ is the linear part of F at the origin.
  HolomorphicMapExpr with_isotopy(double t) const {
    require(t > 0.0 && t <= 1.0, "with_isotopy: t must lie in (0, 1]");
    HolomorphicMapExpr out = *this;
    out.t_ = t;
    return out;
  }

  CVec eval(const CVec& z) const {
    require(z.size() == dim_, "HolomorphicMapExpr::eval: dimension mismatch");
    CVec w = (t_ == 1.0) ? z : CVec(t_ * z);
    for (const auto& p : prims_) apply(p, w);
    if (t_ != 1.0) w /= t_;
    return w;
  }

  // d(F_i)/d(z_j).  For the isotopy wrapper, d/dz (1/t) F(t z) = J_F(t z).
  CMat jacobian(const CVec& z) const {
    require(z.size() == dim_,
            "HolomorphicMapExpr::jacobian: dimension mismatch");
    CVec w = (t_ == 1.0) ? z : CVec(t_ * z);
    CMat jac = CMat::Identity(dim_, dim_);
    for (const auto& p : prims_) {
      jac = prim_jacobian(p, w) * jac;
      apply(p, w);
    }
    return jac;
  }

 private:
  void apply(const prim::Any& p, CVec& w) const {
    const int n = dim_;
    if (const auto* a = std::get_if<prim::Affine>(&p)) {
      w = a->matrix * w + a->offset;
    } else if (const auto* s = std::get_if<prim::Shear>(&p)) {
      w(n - 1) += s->phi->value(w);
    } else if (const auto* o = std::get_if<prim::OneVarLast>(&p)) {
      w(n - 1) = o->f.eval(w(n - 1));
    } else {
      const auto& ax = std::get<prim::Axial>(p);
      const cplx zn = w(n - 1);
      w.head(n - 1) *= ax.scale.eval(zn);
      w(n - 1) = ax.last.eval(zn);
    }
  }

  CMat prim_jacobian(const prim::Any& p, const CVec& w) const {
    const int n = dim_;
    if (const auto* a = std::get_if<prim::Affine>(&p)) {
      return a->matrix;
    }
    CMat jac = CMat::Identity(n, n);
    if (const auto* s = std::get_if<prim::Shear>(&p)) {
      jac.row(n - 1) += s->phi->gradient(w).transpose();
    } else if (const auto* o = std::get_if<prim::OneVarLast>(&p)) {
      jac(n - 1, n - 1) = o->f.deriv(w(n - 1));
    } else {
      const auto& ax = std::get<prim::Axial>(p);
      const cplx zn = w(n - 1);
      const cplx h = ax.scale.eval(zn);
      jac.topLeftCorner(n - 1, n - 1) *= h;
      jac.col(n - 1).head(n - 1) = ax.scale.deriv(zn) * w.head(n - 1);
      jac(n - 1, n - 1) = ax.last.deriv(zn);
    }
    return jac;
  }

  int dim_;
  double t_ = 1.0;
  std::vector<prim::Any> prims_;
};

}  // namespace exposelab
