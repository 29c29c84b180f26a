#pragma once

// Log-barrier interior-point solver for the convex programs behind every
// Maxent variant: a smooth convex objective over the probability simplex
// with linear partial-sum equalities, per-coordinate box bounds, and an
// optional lower bound on (concave) Tsallis or Shannon entropy.
//
// Equalities are eliminated through a null-space basis Z, so iterates are
// p = p0 + Z z and Newton systems live in the reduced space. The entropy
// floor contributes a rank-one Hessian term that becomes huge near the
// boundary; it is handled with Sherman-Morrison instead of being added to
// the dense reduced Hessian.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tebc/core.hpp"

namespace tebc {

struct L22Distance {
  Distribution target;
};
struct JsdToTarget {
  Distribution target;
};
/// Per-draw negative log likelihood -sum (x_i/n) ln p_i; zero counts drop out.
struct NegLogLikelihood {
  CountSample counts;
};
struct NegShannonEntropy {};
struct NegTsallisEntropy {};

using Objective =
    std::variant<L22Distance, JsdToTarget, NegLogLikelihood, NegShannonEntropy, NegTsallisEntropy>;

/// sum_{i in indices} p_i == value. Indices are zero-based.
struct EqualityConstraint {
  std::vector<std::size_t> indices;
  double value = 0.0;
};

/// |p_index - center| <= radius.
struct BoxConstraint {
  std::size_t index = 0;
  double center = 0.0;
  double radius = 0.0;
};

enum class EntropyKind { Tsallis, Shannon };

/// entropy(p) >= level.
struct EntropyFloor {
  EntropyKind kind = EntropyKind::Tsallis;
  double level = 0.0;
};

/// The sum-to-one constraint is always implied and need not be listed.
struct ConvexProgram {
  std::size_t dimension = 0;
  Objective objective = NegShannonEntropy{};
  std::vector<EqualityConstraint> equalities;
  std::vector<BoxConstraint> boxes;
  std::optional<EntropyFloor> entropy_floor;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

struct SolverOptions {
  double tol = 1e-8;
  // Kept far below tol: an optimum on a face where the objective is flat
  // (L22 at an empty bin) is only reached like sqrt(mu).
  double gap_tol = 1e-14;
  int max_outer = 200;
  int max_inner = 50;
  double initial_barrier_weight = 1.0;
  double barrier_reduction = 0.2;
};

struct SolveReport {
  std::optional<Distribution> solution;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  double max_equality_residual = std::numeric_limits<double>::quiet_NaN();
  double max_inequality_violation = std::numeric_limits<double>::quiet_NaN();
  /// entropy(solution) - level; NaN when the program has no floor.
  double entropy_floor_slack = std::numeric_limits<double>::quiet_NaN();
  /// Half the squared Newton decrement at the final barrier weight (bounds the
  /// centering error of the last subproblem).
  double stationarity = std::numeric_limits<double>::quiet_NaN();
  /// Barrier weight times the number of inequalities at termination.
  double duality_gap = std::numeric_limits<double>::quiet_NaN();
  std::int64_t iterations = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  std::string message;
};

class SolveError : public std::runtime_error {
 public:
  SolveError(SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

// ---------------------------------------------------------------------------
// Smooth pieces. All objectives have diagonal Hessians.

inline double entropy_value(EntropyKind kind, std::span<const double> p) {
  return kind == EntropyKind::Tsallis ? tsallis_entropy(p) : shannon_entropy(p);
}

namespace detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline std::span<const double> as_span(const VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Value, gradient, and Hessian diagonal of the objective at an interior p.
struct DiagonalTerm {
  double value = 0.0;
  VectorXd grad;
  VectorXd hess;
};

inline DiagonalTerm evaluate_objective(const Objective& obj, const VectorXd& p) {
  const auto m = p.size();
  DiagonalTerm t{0.0, VectorXd::Zero(m), VectorXd::Zero(m)};
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, L22Distance>) {
          for (Eigen::Index i = 0; i < m; ++i) {
            const double d = p[i] - o.target[i];
            t.value += d * d;
            t.grad[i] = 2.0 * d;
            t.hess[i] = 2.0;
          }
        } else if constexpr (std::is_same_v<T, JsdToTarget>) {
          for (Eigen::Index i = 0; i < m; ++i) {
            const double q = o.target[i];
            const double mid = 0.5 * (p[i] + q);
            if (p[i] > 0.0) t.value += 0.5 * p[i] * std::log(p[i] / mid);
            if (q > 0.0) t.value += 0.5 * q * std::log(q / mid);
            t.grad[i] = 0.5 * std::log(p[i] / mid);
            t.hess[i] = 0.5 * q / (p[i] * (p[i] + q));
          }
        } else if constexpr (std::is_same_v<T, NegLogLikelihood>) {
          const double n = static_cast<double>(o.counts.n());
          for (Eigen::Index i = 0; i < m; ++i) {
            const auto x = o.counts[static_cast<std::size_t>(i)];
            if (x == 0) continue;
            const double w = static_cast<double>(x) / n;
            t.value -= w * std::log(p[i]);
            t.grad[i] = -w / p[i];
            t.hess[i] = w / (p[i] * p[i]);
          }
        } else if constexpr (std::is_same_v<T, NegShannonEntropy>) {
          for (Eigen::Index i = 0; i < m; ++i) {
            t.value += p[i] * std::log(p[i]);
            t.grad[i] = std::log(p[i]) + 1.0;
            t.hess[i] = 1.0 / p[i];
          }
        } else {
          for (Eigen::Index i = 0; i < m; ++i) {
            t.value += p[i] * p[i];
            t.grad[i] = 2.0 * p[i];
            t.hess[i] = 2.0;
          }
          t.value -= 1.0;
        }
      },
      obj);
  return t;
}

/// Entropy (concave) with gradient and Hessian diagonal.
inline DiagonalTerm evaluate_entropy(EntropyKind kind, const VectorXd& p) {
  const auto m = p.size();
  DiagonalTerm t{0.0, VectorXd::Zero(m), VectorXd::Zero(m)};
  if (kind == EntropyKind::Tsallis) {
    t.value = 1.0 - p.squaredNorm();
    t.grad = -2.0 * p;
    t.hess.setConstant(-2.0);
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      t.value -= p[i] * std::log(p[i]);
      t.grad[i] = -(std::log(p[i]) + 1.0);
      t.hess[i] = -1.0 / p[i];
    }
  }
  return t;
}

/// Second-order model of a barrier-augmented function in the full space.
/// The Hessian is hess_dense (when present) or diag(hess_diag), plus
/// rank1_coef * rank1 rank1^T.
struct Model {
  double value = 0.0;
  VectorXd grad;
  VectorXd hess_diag;
  std::optional<MatrixXd> hess_dense;
  double rank1_coef = 0.0;
  VectorXd rank1;
};

/// Returns nullopt outside the barrier domain.
using ModelFn = std::function<std::optional<Model>(const VectorXd&, bool derivatives)>;

struct CenteringResult {
  double half_decrement_sq = std::numeric_limits<double>::infinity();
  int steps = 0;
  bool converged = false;
};

/// Damped Newton on y = y0 + Z z until half the squared decrement drops below eps.
inline CenteringResult center(VectorXd& y, const MatrixXd& z_basis, const ModelFn& model,
                              int max_steps, double eps) {
  CenteringResult res;
  auto current = model(y, true);
  if (!current) throw std::logic_error("centering started outside the barrier domain");
  for (; res.steps < max_steps; ++res.steps) {
    const VectorXd g = z_basis.transpose() * current->grad;
    MatrixXd h;
    if (current->hess_dense) {
      h = z_basis.transpose() * (*current->hess_dense) * z_basis;
    } else {
      h = z_basis.transpose() * (z_basis.array().colwise() * current->hess_diag.array()).matrix();
    }
    Eigen::LLT<MatrixXd> llt(h);
    double ridge = 0.0;
    while (llt.info() != Eigen::Success) {
      ridge = ridge == 0.0 ? 1e-14 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff()) : ridge * 10;
      llt.compute(h + ridge * MatrixXd::Identity(h.rows(), h.cols()));
    }
    VectorXd dz = -llt.solve(g);
    if (current->rank1_coef != 0.0) {
      // (H + c u u^T)^{-1} = H^{-1} - c H^{-1} u u^T H^{-1} / (1 + c u^T H^{-1} u)
      const VectorXd u = z_basis.transpose() * current->rank1;
      const VectorXd hu = llt.solve(u);
      const double c = current->rank1_coef;
      dz += c * hu * (u.dot(-dz)) / (1.0 + c * u.dot(hu));
    }
    const double dec = -g.dot(dz);
    res.half_decrement_sq = 0.5 * std::max(0.0, dec);
    if (res.half_decrement_sq <= eps) {
      res.converged = true;
      break;
    }
    const VectorXd dy = z_basis * dz;

    // Backtracking: stay in the domain, then require sufficient decrease.
    double step = 1.0;
    std::optional<Model> trial;
    bool moved = false;
    while (step > 1e-16) {
      const VectorXd candidate = y + step * dy;
      trial = model(candidate, false);
      if (trial && trial->value <= current->value - 0.01 * step * dec) {
        y = candidate;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // No representable decrease left; the point is centered to rounding.
      res.converged = res.half_decrement_sq <= std::max(eps, 1e-9);
      break;
    }
    current = model(y, true);
  }
  return res;
}

/// Equality system sum_{S_c} p = a_c plus sum-to-one, reduced by SVD.
struct AffineHull {
  MatrixXd rows;
  VectorXd rhs;
  VectorXd particular;
  MatrixXd null_basis;
  double inconsistency = 0.0;
};

inline AffineHull build_affine_hull(const ConvexProgram& prog) {
  const auto m = static_cast<Eigen::Index>(prog.dimension);
  const auto r = static_cast<Eigen::Index>(prog.equalities.size() + 1);
  AffineHull hull;
  hull.rows = MatrixXd::Zero(r, m);
  hull.rhs = VectorXd::Zero(r);
  hull.rows.row(0).setOnes();
  hull.rhs[0] = 1.0;
  for (Eigen::Index c = 1; c < r; ++c) {
    const auto& eq = prog.equalities[static_cast<std::size_t>(c - 1)];
    for (auto i : eq.indices) hull.rows(c, static_cast<Eigen::Index>(i)) = 1.0;
    hull.rhs[c] = eq.value;
  }
  Eigen::JacobiSVD<MatrixXd> svd(hull.rows, Eigen::ComputeThinU | Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  const auto rank = svd.rank();
  hull.particular = svd.solve(hull.rhs);
  hull.null_basis = svd.matrixV().rightCols(m - rank);
  hull.inconsistency = (hull.rows * hull.particular - hull.rhs).cwiseAbs().maxCoeff();
  return hull;
}

struct Bounds {
  VectorXd lower;
  VectorXd upper;  // +inf where unbounded
  Eigen::Index count = 0;
};

inline Bounds build_bounds(const ConvexProgram& prog) {
  const auto m = static_cast<Eigen::Index>(prog.dimension);
  Bounds b{VectorXd::Zero(m), VectorXd::Constant(m, std::numeric_limits<double>::infinity()), m};
  for (const auto& box : prog.boxes) {
    const auto i = static_cast<Eigen::Index>(box.index);
    b.lower[i] = std::max(b.lower[i], box.center - box.radius);
    if (std::isinf(b.upper[i])) ++b.count;
    b.upper[i] = std::min(b.upper[i], box.center + box.radius);
  }
  return b;
}

/// Adds -mu * sum log(slack) for the coordinate bounds. False outside the domain.
inline bool add_bound_barrier(const Bounds& b, const VectorXd& p, double mu, Model& out,
                              bool derivatives) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double lo = p[i] - b.lower[i];
    if (!(lo > 0.0)) return false;
    out.value -= mu * std::log(lo);
    if (derivatives) {
      out.grad[i] -= mu / lo;
      out.hess_diag[i] += mu / (lo * lo);
    }
    if (std::isfinite(b.upper[i])) {
      const double hi = b.upper[i] - p[i];
      if (!(hi > 0.0)) return false;
      out.value -= mu * std::log(hi);
      if (derivatives) {
        out.grad[i] += mu / hi;
        out.hess_diag[i] += mu / (hi * hi);
      }
    }
  }
  return true;
}

inline Model empty_model(Eigen::Index m) {
  Model md;
  md.grad = VectorXd::Zero(m);
  md.hess_diag = VectorXd::Zero(m);
  return md;
}

/// f(p) + mu * (bound barrier) [- mu log(entropy(p) - level)] with f given
/// by `smooth`. `smooth_sign` = -1 maximizes the entropy instead.
inline ModelFn barrier_model(const Bounds& bounds, const std::optional<EntropyFloor>& floor,
                             std::function<DiagonalTerm(const VectorXd&)> smooth,
                             const double& mu) {
  return [&bounds, floor, smooth = std::move(smooth), &mu](
             const VectorXd& p, bool derivatives) -> std::optional<Model> {
    Model md = empty_model(p.size());
    if (!add_bound_barrier(bounds, p, mu, md, derivatives)) return std::nullopt;
    if (floor) {
      const auto ent = evaluate_entropy(floor->kind, p);
      const double slack = ent.value - floor->level;
      if (!(slack > 0.0)) return std::nullopt;
      md.value -= mu * std::log(slack);
      if (derivatives) {
        md.grad -= (mu / slack) * ent.grad;
        md.hess_diag -= (mu / slack) * ent.hess;
        md.rank1_coef = mu / (slack * slack);
        md.rank1 = ent.grad;
      }
    }
    const auto f = smooth(p);
    if (!std::isfinite(f.value)) return std::nullopt;
    md.value += f.value;
    if (derivatives) {
      md.grad += f.grad;
      md.hess_diag += f.hess;
    }
    return md;
  };
}

inline constexpr double kCenteringEps = 1e-12;
// Last subproblem only: position error goes like sqrt(2 eps / curvature).
inline constexpr double kFinalCenteringEps = 1e-20;

}  // namespace detail

// ---------------------------------------------------------------------------

inline double objective_value(const Objective& obj, std::span<const double> p) {
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(p.data(),
                                                              static_cast<Eigen::Index>(p.size()));
  return detail::evaluate_objective(obj, v).value;
}

/// Solves `prog` by the barrier method. Never throws for infeasible or
/// unconverged programs; those come back as a status. Malformed programs
/// (bad indices, dimension < 2, target size mismatch) throw invalid_argument.
inline SolveReport solve(const ConvexProgram& prog, const SolverOptions& opt = {}) {
  using detail::MatrixXd;
  using detail::VectorXd;

  if (prog.dimension < 2) throw std::invalid_argument("program dimension must be at least 2");
  const auto m = static_cast<Eigen::Index>(prog.dimension);
  for (const auto& eq : prog.equalities) {
    if (eq.indices.empty()) throw std::invalid_argument("equality constraint with empty index set");
    for (auto i : eq.indices) {
      if (i >= prog.dimension) throw std::invalid_argument("equality index out of range");
    }
  }
  for (const auto& box : prog.boxes) {
    if (box.index >= prog.dimension) throw std::invalid_argument("box index out of range");
    if (!(box.radius >= 0.0)) throw std::invalid_argument("box radius must be nonnegative");
  }
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, L22Distance> || std::is_same_v<T, JsdToTarget>) {
          if (o.target.size() != prog.dimension) {
            throw std::invalid_argument("objective target has the wrong dimension");
          }
        } else if constexpr (std::is_same_v<T, NegLogLikelihood>) {
          if (o.counts.bins() != prog.dimension) {
            throw std::invalid_argument("objective counts have the wrong dimension");
          }
        }
      },
      prog.objective);

  SolveReport report;
  const auto hull = detail::build_affine_hull(prog);
  const auto bounds = detail::build_bounds(prog);
  const Eigen::Index inequality_count = bounds.count + (prog.entropy_floor ? 1 : 0);
  const double feas_tol = std::max(opt.tol, 1e-12);

  auto finish = [&](const VectorXd& p, SolveStatus status, std::string msg) {
    report.status = status;
    report.message = std::move(msg);
    if (status == SolveStatus::Infeasible) return report;
    std::vector<double> probs(p.data(), p.data() + p.size());
    for (auto& v : probs) v = std::max(v, 0.0);
    report.solution = Distribution::normalize(std::move(probs));
    const auto& sol = report.solution->vector();
    const VectorXd ps = Eigen::Map<const VectorXd>(sol.data(), m);
    report.objective_value = objective_value(prog.objective, sol);
    report.max_equality_residual = (hull.rows * ps - hull.rhs).cwiseAbs().maxCoeff();
    double violation = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      violation = std::max({violation, bounds.lower[i] - ps[i], ps[i] - bounds.upper[i]});
    }
    if (prog.entropy_floor) {
      report.entropy_floor_slack =
          entropy_value(prog.entropy_floor->kind, sol) - prog.entropy_floor->level;
      violation = std::max(violation, -report.entropy_floor_slack);
    }
    report.max_inequality_violation = violation;
    if (report.status == SolveStatus::Optimal &&
        (report.max_equality_residual > opt.tol || violation > opt.tol)) {
      report.status = SolveStatus::IterationLimit;
      report.message = "residuals above tolerance at termination";
    }
    return report;
  };

  if (hull.inconsistency > feas_tol) {
    return finish(hull.particular, SolveStatus::Infeasible, "equality constraints are inconsistent");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (bounds.lower[i] > bounds.upper[i]) {
      return finish(hull.particular, SolveStatus::Infeasible, "box constraints exclude every point");
    }
  }

  const MatrixXd& z = hull.null_basis;
  if (z.cols() == 0) {
    // Fully determined by the equalities.
    const VectorXd& p = hull.particular;
    bool ok = true;
    for (Eigen::Index i = 0; i < m; ++i) {
      ok = ok && p[i] >= bounds.lower[i] - feas_tol && p[i] <= bounds.upper[i] + feas_tol;
    }
    if (ok && prog.entropy_floor) {
      ok = entropy_value(prog.entropy_floor->kind, detail::as_span(p)) >=
           prog.entropy_floor->level - feas_tol;
    }
    if (!ok) return finish(p, SolveStatus::Infeasible, "the only point allowed violates a bound");
    report.duality_gap = 0.0;
    report.stationarity = 0.0;
    return finish(p, SolveStatus::Optimal, "determined by equalities");
  }

  // Phase 1: maximize the smallest bound slack s over (p, s).
  VectorXd p = hull.particular;
  {
    const Eigen::Index dim = m + 1;
    MatrixXd zs = MatrixXd::Zero(dim, z.cols() + 1);
    zs.topLeftCorner(m, z.cols()) = z;
    zs(m, z.cols()) = 1.0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      min_slack = std::min(min_slack, p[i] - bounds.lower[i]);
      if (std::isfinite(bounds.upper[i])) min_slack = std::min(min_slack, bounds.upper[i] - p[i]);
    }
    VectorXd y(dim);
    y.head(m) = p;
    y[m] = min_slack - 1.0;
    double mu = 1.0;
    detail::ModelFn phase1 = [&](const VectorXd& v, bool derivatives) -> std::optional<detail::Model> {
      detail::Model md;
      md.value = -v[m];
      md.grad = VectorXd::Zero(dim);
      md.grad[m] = -1.0;
      MatrixXd h = MatrixXd::Zero(dim, dim);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double lo = v[i] - bounds.lower[i] - v[m];
        if (!(lo > 0.0)) return std::nullopt;
        md.value -= mu * std::log(lo);
        if (derivatives) {
          const double g = mu / lo, hh = mu / (lo * lo);
          md.grad[i] -= g;
          md.grad[m] += g;
          h(i, i) += hh;
          h(m, m) += hh;
          h(i, m) -= hh;
          h(m, i) -= hh;
        }
        if (std::isfinite(bounds.upper[i])) {
          const double hi = bounds.upper[i] - v[i] - v[m];
          if (!(hi > 0.0)) return std::nullopt;
          md.value -= mu * std::log(hi);
          if (derivatives) {
            const double g = mu / hi, hh = mu / (hi * hi);
            md.grad[i] += g;
            md.grad[m] += g;
            h(i, i) += hh;
            h(m, m) += hh;
            h(i, m) += hh;
            h(m, i) += hh;
          }
        }
      }
      if (derivatives) md.hess_dense = std::move(h);
      return md;
    };
    const double count = static_cast<double>(bounds.count);
    bool found = false;
    for (int outer = 0; outer < opt.max_outer; ++outer) {
      const auto c = detail::center(y, zs, phase1, opt.max_inner, detail::kCenteringEps);
      report.iterations += c.steps;
      const double s = y[m];
      const double upper = s + count * mu;
      if (s > 0.0 && s >= count * mu) {
        found = true;
        break;
      }
      if (upper <= 1e-14 || (count * mu < 1e-15 && s <= 0.0)) break;
      mu *= opt.barrier_reduction;
    }
    if (!found) {
      return finish(y.head(m), SolveStatus::Infeasible, "no strictly feasible point satisfies the bounds");
    }
    p = y.head(m);
  }

  double mu = opt.initial_barrier_weight;

  // Phase 1b: raise the entropy above the floor if needed.
  if (prog.entropy_floor &&
      entropy_value(prog.entropy_floor->kind, detail::as_span(p)) <= prog.entropy_floor->level) {
    const auto kind = prog.entropy_floor->kind;
    double mu1 = 1.0;
    auto raise = detail::barrier_model(
        bounds, std::nullopt,
        [kind](const VectorXd& v) {
          auto e = detail::evaluate_entropy(kind, v);
          e.value = -e.value;
          e.grad = -e.grad;
          e.hess = -e.hess;
          return e;
        },
        mu1);
    bool found = false;
    for (int outer = 0; outer < opt.max_outer; ++outer) {
      const auto c = detail::center(p, z, raise, opt.max_inner, detail::kCenteringEps);
      report.iterations += c.steps;
      const double ent = entropy_value(kind, detail::as_span(p));
      if (ent > prog.entropy_floor->level) {
        found = true;
        break;
      }
      const double gap = static_cast<double>(bounds.count) * mu1;
      if (ent + gap < prog.entropy_floor->level || gap < 1e-15) break;
      mu1 *= opt.barrier_reduction;
    }
    if (!found) {
      return finish(p, SolveStatus::Infeasible, "entropy floor unattainable under the constraints");
    }
  }

  // Phase 2: follow the central path.
  auto model = detail::barrier_model(
      bounds, prog.entropy_floor,
      [&prog](const VectorXd& v) { return detail::evaluate_objective(prog.objective, v); }, mu);
  const double count = static_cast<double>(inequality_count);
  const double gap_target = std::min(opt.tol, opt.gap_tol);
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    const bool last = count * mu <= gap_target;
    const auto c = detail::center(p, z, model, opt.max_inner,
                                  last ? detail::kFinalCenteringEps : detail::kCenteringEps);
    report.iterations += c.steps;
    report.stationarity = c.half_decrement_sq;
    report.duality_gap = count * mu;
    if (last) {
      if (c.half_decrement_sq <= opt.tol) return finish(p, SolveStatus::Optimal, "converged");
      return finish(p, SolveStatus::IterationLimit, "final centering did not converge");
    }
    mu *= opt.barrier_reduction;
  }
  return finish(p, SolveStatus::IterationLimit, "outer iteration limit reached");
}

/// Largest Tsallis or Shannon entropy attainable under the program's
/// equalities and boxes (any objective or floor in `prog` is ignored).
inline double max_feasible_entropy(const ConvexProgram& prog, EntropyKind kind,
                                   const SolverOptions& opt = {}) {
  ConvexProgram p = prog;
  p.entropy_floor.reset();
  if (kind == EntropyKind::Tsallis) {
    p.objective = NegTsallisEntropy{};
  } else {
    p.objective = NegShannonEntropy{};
  }
  SolverOptions tight = opt;
  tight.tol = std::min(opt.tol, 1e-12);
  tight.gap_tol = std::min(opt.gap_tol, 1e-14);
  const auto report = solve(p, tight);
  if (report.status == SolveStatus::Infeasible) {
    throw SolveError(report.status, "max_feasible_entropy: " + report.message);
  }
  if (!report.solution) throw SolveError(report.status, "max_feasible_entropy: no solution");
  return entropy_value(kind, report.solution->probs());
}

}  // namespace tebc
