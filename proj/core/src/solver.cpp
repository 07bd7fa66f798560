#include "geomet/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "geomet/errors.hpp"

namespace geomet {

namespace {

// Feasibility is revalidated (and U, V re-orthogonalized on drift) this often.
constexpr int kFeasibilityPeriod = 25;
constexpr double kDriftTol = 1e-8;
constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1.0;

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(cfg.grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be >= 0");
  if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0))
    throw std::invalid_argument("armijo_c1 must lie in (0,1)");
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0))
    throw std::invalid_argument("backtrack_factor must lie in (0,1)");
  if (cfg.max_backtracks < 0)
    throw std::invalid_argument("max_backtracks must be >= 0");
  if (cfg.cg_restart_period < 1)
    throw std::invalid_argument("cg_restart_period must be >= 1");
}

ProductPoint retract_product(const ProductPoint& p, const TangentVector& h,
                             double step) {
  return ProductPoint(retract_orth(p.u, h.xi_u, step),
                      retract_orth(p.v, h.xi_v, step),
                      retract_spd(p.b, h.xi_b, step));
}

struct LineSearchOutcome {
  bool accepted = false;
  double step = 0.0;
  double loss_value = 0.0;
  std::optional<ProductPoint> point;
};

// Armijo backtracking along h from p. dphi = <grad, h> must be negative.
LineSearchOutcome armijo_search(const ProductPoint& p, const TangentVector& h,
                                double f0, double dphi, double step0,
                                const GramCache& cache, const SolverConfig& cfg) {
  LineSearchOutcome out;
  double t = step0;
  for (int attempt = 0; attempt <= cfg.max_backtracks; ++attempt) {
    try {
      ProductPoint cand = retract_product(p, h, t);
      double f = loss(cand, cache, cfg.reg_c);
      if (f <= f0 + cfg.armijo_c1 * t * dphi) {
        out.accepted = true;
        out.step = t;
        out.loss_value = f;
        out.point = std::move(cand);
        return out;
      }
    } catch (const SolverError&) {
      // retraction rejected the step; shrink and retry
    }
    t *= cfg.backtrack_factor;
  }
  return out;
}

void repair_feasibility(ProductPoint& p) {
  const Index d = p.dim();
  Matrix id = Matrix::Identity(d, d);
  if ((p.u.m().transpose() * p.u.m() - id).norm() > kDriftTol)
    p.u = orthogonalize(p.u.m());
  if ((p.v.m().transpose() * p.v.m() - id).norm() > kDriftTol)
    p.v = orthogonalize(p.v.m());
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kGradientTolerance: return "gradient-tolerance";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kLineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view s) {
  if (s == "gradient-tolerance") return Termination::kGradientTolerance;
  if (s == "max-iterations") return Termination::kMaxIterations;
  if (s == "line-search-failure") return Termination::kLineSearchFailure;
  throw DataError("unknown termination reason: " + std::string(s));
}

ProductPoint init_identity(Index d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  return ProductPoint::Identity(d);
}

SolveResult solve(const GramCache& cache, const SolverConfig& cfg,
                  std::optional<ProductPoint> init) {
  validate_config(cfg);
  ProductPoint p = init ? std::move(*init) : init_identity(cache.d);
  if (p.dim() != cache.d)
    throw DataError("initial point dimension does not match gram cache");

  SolveTrace trace;
  double f = loss(p, cache, cfg.reg_c);
  TangentVector g = riemannian_grad(p, cache, cfg.reg_c);
  double gnorm = std::sqrt(std::max(0.0, inner(p, g, g)));
  const double gnorm0 = gnorm;
  trace.records.push_back({0, f, gnorm, 0.0});

  if (gnorm <= cfg.grad_tol * gnorm0) {  // only possible when gnorm0 == 0
    trace.termination = Termination::kGradientTolerance;
    return {std::move(p), std::move(trace)};
  }
  if (cfg.max_iters == 0) {
    trace.termination = Termination::kMaxIterations;
    return {std::move(p), std::move(trace)};
  }

  TangentVector h = -g;
  double dphi = -gnorm * gnorm;
  bool steepest = true;
  int since_restart = 0;
  double prev_step = 0.0;
  trace.termination = Termination::kMaxIterations;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double step0 = (iter == 1)
                       ? 1.0 / (1.0 + gnorm)
                       : std::clamp(2.0 * prev_step, kMinStep, kMaxStep);
    LineSearchOutcome ls = armijo_search(p, h, f, dphi, step0, cache, cfg);
    if (!ls.accepted && !steepest) {
      // one retry along steepest descent before giving up
      h = -g;
      dphi = -gnorm * gnorm;
      steepest = true;
      since_restart = 0;
      ls = armijo_search(p, h, f, dphi, 1.0 / (1.0 + gnorm), cache, cfg);
    }
    if (!ls.accepted) {
      if (trace.accepted_steps == 0)
        throw SolverError(
            "line search failed at the initial point (loss=" + std::to_string(f) +
            ", grad_norm=" + std::to_string(gnorm) + "); check problem scale");
      trace.termination = Termination::kLineSearchFailure;
      break;
    }

    ProductPoint p_prev = p;
    TangentVector g_prev = g;
    TangentVector h_prev = h;
    double gnorm_prev = gnorm;

    p = std::move(*ls.point);
    f = ls.loss_value;
    prev_step = ls.step;
    ++trace.accepted_steps;

    if (iter % kFeasibilityPeriod == 0) repair_feasibility(p);

    g = riemannian_grad(p, cache, cfg.reg_c);
    gnorm = std::sqrt(std::max(0.0, inner(p, g, g)));
    trace.records.push_back({iter, f, gnorm, ls.step});

    if (gnorm <= cfg.grad_tol * gnorm0) {
      trace.termination = Termination::kGradientTolerance;
      break;
    }

    ++since_restart;
    if (since_restart >= cfg.cg_restart_period) {
      h = -g;
      dphi = -gnorm * gnorm;
      steepest = true;
      since_restart = 0;
      continue;
    }

    // Polak-Ribiere+ with projection transport of the previous direction.
    TangentVector g_prev_t = transport(p_prev, p, g_prev);
    TangentVector h_prev_t = transport(p_prev, p, h_prev);
    double beta = std::max(0.0, inner(p, g, g - g_prev_t) / (gnorm_prev * gnorm_prev));
    h = -g + beta * h_prev_t;
    dphi = inner(p, g, h);
    steepest = false;
    if (dphi >= 0.0) {  // not a descent direction
      h = -g;
      dphi = -gnorm * gnorm;
      steepest = true;
      since_restart = 0;
    }
  }
  return {std::move(p), std::move(trace)};
}

void write_trace(const SolveTrace& trace, const std::string& path) {
  if (path.empty()) throw IoError("empty trace path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::string buf = "# iter\tloss\tgrad_norm\tstep\n";
  for (const auto& r : trace.records) {
    buf += std::to_string(r.iter);
    buf += '\t';
    append_double(buf, r.loss);
    buf += '\t';
    append_double(buf, r.grad_norm);
    buf += '\t';
    append_double(buf, r.step);
    buf += '\n';
  }
  buf += "# termination ";
  buf += to_string(trace.termination);
  buf += '\n';
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace geomet
