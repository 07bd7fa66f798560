#pragma once

#include "geomet/embedding.hpp"
#include "geomet/manifold.hpp"
#include "geomet/matrix.hpp"

namespace geomet {

/// Second-moment matrices of an aligned pair. They let the alignment loss and
/// its gradients be evaluated in O(d^3) after a single O(n d^2) pass, without
/// ever materializing the n x n residual.
struct GramCache {
  Matrix cxx;  // X * X^T
  Matrix czz;  // Z * Z^T
  Matrix cxz;  // X * Z^T
  Index n = 0;
  Index d = 0;
};

GramCache build_gram_cache(const AlignedPair& pair);

/// Nonnegative regularization weight on ||B||_F^2.
struct RegWeight {
  explicit RegWeight(double value);
  RegWeight() : RegWeight(1.0) {}
  double c;
};

/// Alignment loss. With W = U^T B V this evaluates
///   trace(W^T cxx W czz) - 2 trace(W cxz^T) + n + c ||B||_F^2,
/// which equals the squared residual against the identity label matrix plus
/// the regularizer.
double loss(const ProductPoint& p, const GramCache& cache, const RegWeight& reg);

struct EuclideanGrads {
  Matrix g_u;
  Matrix g_v;
  Matrix g_b;
};

/// Euclidean (ambient) gradients of the loss with respect to U, V and B.
EuclideanGrads euclidean_grads(const ProductPoint& p, const GramCache& cache,
                               const RegWeight& reg);

/// Riemannian gradient: tangent projections of the Euclidean gradients on the
/// orthogonal factors, metric conversion on the SPD factor.
TangentVector riemannian_grad(const ProductPoint& p, const GramCache& cache,
                              const RegWeight& reg);

}  // namespace geomet
