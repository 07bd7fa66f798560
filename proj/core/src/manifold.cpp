#include "geomet/manifold.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace geomet {

namespace {

constexpr double kOrthTol = 1e-8;
constexpr double kSymTol = 1e-10;
constexpr double kEigClamp = 1e-12;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw DataError(std::string(what) + " must be a nonempty square matrix");
}

}  // namespace

Matrix sym(const Matrix& g) {
  require_square(g, "sym argument");
  return 0.5 * (g + g.transpose());
}

OrthogonalPoint::OrthogonalPoint(Matrix m) : m_(std::move(m)) {
  require_square(m_, "orthogonal point");
  const Index d = m_.rows();
  double drift = (m_.transpose() * m_ - Matrix::Identity(d, d)).norm();
  if (!(drift <= kOrthTol))
    throw DataError("matrix is not orthogonal: ||m^T m - I||_F = " +
                    std::to_string(drift));
}

OrthogonalPoint OrthogonalPoint::Identity(Index d) {
  return OrthogonalPoint(Matrix::Identity(d, d));
}

SPDPoint::SPDPoint(Matrix m) : m_(std::move(m)) {
  require_square(m_, "SPD point");
  double asym = (m_ - m_.transpose()).norm();
  if (!(asym <= kSymTol))
    throw DataError("matrix is not symmetric: ||m - m^T||_F = " +
                    std::to_string(asym));
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success)
    throw DataError("matrix is not positive definite");
}

SPDPoint SPDPoint::Identity(Index d) { return SPDPoint(Matrix::Identity(d, d)); }

ProductPoint::ProductPoint(OrthogonalPoint u_in, OrthogonalPoint v_in, SPDPoint b_in)
    : u(std::move(u_in)), v(std::move(v_in)), b(std::move(b_in)) {
  if (u.dim() != v.dim() || u.dim() != b.dim())
    throw DataError("product point factors disagree on dimension");
}

ProductPoint ProductPoint::Identity(Index d) {
  return ProductPoint(OrthogonalPoint::Identity(d), OrthogonalPoint::Identity(d),
                      SPDPoint::Identity(d));
}

TangentVector zero_tangent(Index d) {
  return {Matrix::Zero(d, d), Matrix::Zero(d, d), Matrix::Zero(d, d)};
}

Matrix project_tangent_orth(const OrthogonalPoint& u, const Matrix& g) {
  if (g.rows() != u.dim() || g.cols() != u.dim())
    throw DataError("tangent projection shape mismatch");
  return g - u.m() * sym(u.m().transpose() * g);
}

OrthogonalPoint orthogonalize(const Matrix& a) {
  require_square(a, "QR input");
  const Index d = a.rows();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix& packed = qr.matrixQR();
  const double tiny = 1e-13 * std::max(1.0, a.norm());
  for (Index j = 0; j < d; ++j) {
    double rjj = packed(j, j);
    if (std::abs(rjj) <= tiny)
      throw SolverError("rank-deficient QR factorization");
    if (rjj < 0) q.col(j) = -q.col(j);
  }
  return OrthogonalPoint(std::move(q));
}

OrthogonalPoint retract_orth(const OrthogonalPoint& u, const Matrix& xi, double step) {
  if (step == 0.0) return u;
  return orthogonalize(u.m() + step * xi);
}

Matrix riem_grad_spd(const SPDPoint& b, const Matrix& g) {
  if (g.rows() != b.dim() || g.cols() != b.dim())
    throw DataError("SPD gradient shape mismatch");
  return sym(b.m() * sym(g) * b.m());
}

SPDPoint retract_spd(const SPDPoint& b, const Matrix& xi, double step) {
  if (step == 0.0) return b;
  Matrix b_inv_xi = b.solve(xi);
  Matrix m = b.m() + step * xi + (0.5 * step * step) * (xi * b_inv_xi);
  try {
    return SPDPoint(sym(m));
  } catch (const DataError&) {
    throw SolverError("SPD retraction left the cone (step too large)");
  }
}

double inner(const ProductPoint& p, const TangentVector& t1, const TangentVector& t2) {
  double ip = t1.xi_u.cwiseProduct(t2.xi_u).sum() +
              t1.xi_v.cwiseProduct(t2.xi_v).sum();
  Matrix a = p.b.solve(t1.xi_b);
  Matrix c = p.b.solve(t2.xi_b);
  ip += a.cwiseProduct(c.transpose()).sum();  // trace(a * c)
  return ip;
}

TangentVector transport(const ProductPoint& p_from, const ProductPoint& p_to,
                        const TangentVector& t) {
  if (p_from.dim() != p_to.dim())
    throw DataError("transport endpoints disagree on dimension");
  return {project_tangent_orth(p_to.u, t.xi_u),
          project_tangent_orth(p_to.v, t.xi_v), sym(t.xi_b)};
}

SPDPoint sqrt_spd(const SPDPoint& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b.m());
  if (eig.info() != Eigen::Success)
    throw SolverError("eigendecomposition failed");
  Vector lam = eig.eigenvalues().cwiseMax(kEigClamp);
  Matrix s = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
             eig.eigenvectors().transpose();
  return SPDPoint(sym(s));
}

}  // namespace geomet
