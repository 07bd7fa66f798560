#pragma once

#include <Eigen/Cholesky>

#include "geomet/errors.hpp"
#include "geomet/matrix.hpp"

namespace geomet {

/// Symmetric part (g + g^T) / 2.
Matrix sym(const Matrix& g);

/// A d x d orthogonal matrix. Construction rejects matrices with
/// ||m^T m - I||_F > 1e-8.
class OrthogonalPoint {
 public:
  explicit OrthogonalPoint(Matrix m);
  static OrthogonalPoint Identity(Index d);

  const Matrix& m() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// A d x d symmetric positive definite matrix. Construction rejects
/// asymmetry above 1e-10 or a failed Cholesky factorization, and keeps the
/// factorization around for solves against the point.
class SPDPoint {
 public:
  explicit SPDPoint(Matrix m);
  static SPDPoint Identity(Index d);

  const Matrix& m() const { return m_; }
  Index dim() const { return m_.rows(); }

  /// Solves m * y = rhs via the cached Cholesky factorization.
  Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }

 private:
  Matrix m_;
  Eigen::LLT<Matrix> llt_;
};

/// A point on O(d) x O(d) x SPD(d); all factors share the dimension d.
struct ProductPoint {
  ProductPoint(OrthogonalPoint u_in, OrthogonalPoint v_in, SPDPoint b_in);
  static ProductPoint Identity(Index d);

  Index dim() const { return u.dim(); }

  OrthogonalPoint u;
  OrthogonalPoint v;
  SPDPoint b;
};

/// Tangent triple (xi_u, xi_v, xi_b). At a base point (U, V, B), U^T xi_u and
/// V^T xi_v are skew-symmetric and xi_b is symmetric.
struct TangentVector {
  Matrix xi_u;
  Matrix xi_v;
  Matrix xi_b;
};

TangentVector zero_tangent(Index d);

inline TangentVector operator+(const TangentVector& a, const TangentVector& b) {
  return {a.xi_u + b.xi_u, a.xi_v + b.xi_v, a.xi_b + b.xi_b};
}
inline TangentVector operator-(const TangentVector& a, const TangentVector& b) {
  return {a.xi_u - b.xi_u, a.xi_v - b.xi_v, a.xi_b - b.xi_b};
}
inline TangentVector operator-(const TangentVector& a) {
  return {-a.xi_u, -a.xi_v, -a.xi_b};
}
inline TangentVector operator*(double s, const TangentVector& a) {
  return {s * a.xi_u, s * a.xi_v, s * a.xi_b};
}

/// Tangent projection onto O(d) at u: g - u * sym(u^T g).
Matrix project_tangent_orth(const OrthogonalPoint& u, const Matrix& g);

/// Q factor of the sign-fixed QR decomposition of `a` (R's diagonal forced
/// positive). Throws SolverError on rank deficiency.
OrthogonalPoint orthogonalize(const Matrix& a);

/// QR retraction of u + step * xi. Step 0 returns u exactly.
OrthogonalPoint retract_orth(const OrthogonalPoint& u, const Matrix& xi, double step);

/// Riemannian gradient on SPD(d) under the affine-invariant metric:
/// b * sym(g) * b.
Matrix riem_grad_spd(const SPDPoint& b, const Matrix& g);

/// Second-order SPD-preserving retraction
/// b + s * xi + (s^2 / 2) * xi * b^{-1} * xi. Step 0 returns b exactly.
/// Throws SolverError when the result leaves the SPD cone.
SPDPoint retract_spd(const SPDPoint& b, const Matrix& xi, double step);

/// Product metric: Frobenius on both orthogonal factors, affine-invariant
/// trace(b^{-1} xi_b b^{-1} eta_b) on the SPD factor.
double inner(const ProductPoint& p, const TangentVector& t1, const TangentVector& t2);

/// Projection-based vector transport from p_from to p_to.
TangentVector transport(const ProductPoint& p_from, const ProductPoint& p_to,
                        const TangentVector& t);

/// Principal matrix square root via symmetric eigendecomposition, with
/// eigenvalues clamped at 1e-12 before the square root.
SPDPoint sqrt_spd(const SPDPoint& b);

}  // namespace geomet
