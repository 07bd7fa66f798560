#pragma once

#include <string>

#include "geomet/embedding.hpp"
#include "geomet/manifold.hpp"
#include "geomet/solver.hpp"

namespace geomet {

/// Learned alignment parameters plus the settings needed to reapply them:
/// a small key-value header followed by U, V, B serialized row-major as text
/// floats (shortest exact representation, so reload is drift-free).
struct ParamsFile {
  int format_version = 1;
  Index d = 0;
  std::string source_x;
  std::string source_z;
  PreprocessOptions preprocess;
  double reg_c = 1.0;
  Termination termination = Termination::kMaxIterations;
  Matrix u;
  Matrix v;
  Matrix b;
};

ParamsFile make_params_file(const ProductPoint& point, std::string source_x,
                            std::string source_z, PreprocessOptions preprocess,
                            double reg_c, Termination termination);

/// Validates feasibility (orthogonality of U and V, positive definiteness of
/// B, matching dimensions); throws DataError when the matrices do not satisfy
/// them.
ProductPoint to_product_point(const ParamsFile& params);

void save_params(const ParamsFile& params, const std::string& path);
ParamsFile load_params(const std::string& path);

}  // namespace geomet
