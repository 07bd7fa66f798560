#include "geomet/objective.hpp"

#include "geomet/errors.hpp"

namespace geomet {

namespace {

void require_dims(const ProductPoint& p, const GramCache& cache) {
  if (p.dim() != cache.d)
    throw DataError("point dimension " + std::to_string(p.dim()) +
                    " does not match gram cache dimension " +
                    std::to_string(cache.d));
}

}  // namespace

GramCache build_gram_cache(const AlignedPair& pair) {
  const Matrix& x = pair.x().vectors();
  const Matrix& z = pair.z().vectors();
  GramCache cache;
  cache.cxx = sym(x * x.transpose());
  cache.czz = sym(z * z.transpose());
  cache.cxz = x * z.transpose();
  cache.n = pair.size();
  cache.d = pair.dim();
  return cache;
}

RegWeight::RegWeight(double value) : c(value) {
  if (!(value >= 0.0))
    throw std::invalid_argument("regularization weight must be nonnegative");
}

double loss(const ProductPoint& p, const GramCache& cache, const RegWeight& reg) {
  require_dims(p, cache);
  Matrix w = p.u.m().transpose() * p.b.m() * p.v.m();
  Matrix cw = cache.cxx * w * cache.czz;
  double fit = w.cwiseProduct(cw).sum()           // trace(W^T cxx W czz)
               - 2.0 * w.cwiseProduct(cache.cxz).sum()  // -2 trace(W cxz^T)
               + static_cast<double>(cache.n);
  return fit + reg.c * p.b.m().squaredNorm();
}

EuclideanGrads euclidean_grads(const ProductPoint& p, const GramCache& cache,
                               const RegWeight& reg) {
  require_dims(p, cache);
  const Matrix& u = p.u.m();
  const Matrix& v = p.v.m();
  const Matrix& b = p.b.m();
  Matrix w = u.transpose() * b * v;
  Matrix d = cache.cxx * w * cache.czz - cache.cxz;
  EuclideanGrads g;
  g.g_u = 2.0 * b * v * d.transpose();
  g.g_v = 2.0 * b * u * d;
  g.g_b = 2.0 * u * d * v.transpose() + (2.0 * reg.c) * b;
  return g;
}

TangentVector riemannian_grad(const ProductPoint& p, const GramCache& cache,
                              const RegWeight& reg) {
  EuclideanGrads g = euclidean_grads(p, cache, reg);
  return {project_tangent_orth(p.u, g.g_u), project_tangent_orth(p.v, g.g_v),
          riem_grad_spd(p.b, g.g_b)};
}

}  // namespace geomet
