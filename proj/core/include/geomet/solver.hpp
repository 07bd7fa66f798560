#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geomet/objective.hpp"

namespace geomet {

struct SolverConfig {
  RegWeight reg_c{1.0};
  int max_iters = 500;
  double grad_tol = 1e-6;  // relative to the initial gradient norm
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  int cg_restart_period = 25;
  std::uint64_t seed = 0;
};

enum class Termination {
  kGradientTolerance,
  kMaxIterations,
  kLineSearchFailure,
};

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct SolveTrace {
  struct Record {
    int iter;
    double loss;
    double grad_norm;
    double step;
  };
  std::vector<Record> records;  // record 0 is the initial point
  Termination termination = Termination::kMaxIterations;
  int accepted_steps = 0;
};

struct SolveResult {
  ProductPoint point;
  SolveTrace trace;
};

/// U = V = B = I_d.
ProductPoint init_identity(Index d);

/// Riemannian conjugate gradient (Polak-Ribiere+ with projection transport and
/// periodic restarts) with Armijo backtracking. Every accepted step strictly
/// decreases the loss. Terminates on relative gradient tolerance, iteration
/// budget, or line-search failure; a line-search failure before any accepted
/// step throws SolverError.
SolveResult solve(const GramCache& cache, const SolverConfig& cfg,
                  std::optional<ProductPoint> init = std::nullopt);

/// Tab-separated trace records (iter, loss, grad_norm, step), one per line.
void write_trace(const SolveTrace& trace, const std::string& path);

}  // namespace geomet
