// Copyright 2025 The PolyPlan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcp.hpp"

#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <limits>

#include "logging.hpp"
#include "rng.hpp"

namespace polyplan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
// Steps below this never make measurable progress; cutting the backtracking
// here keeps cliff iterations cheap and routes them to the damped cascade.
constexpr double kMinStep = 1e-5;
constexpr int kStallWindow = 20;
constexpr double kStallRelDecrease = 1e-12;

struct FBRow {
  double value = 0.0;
  double da = 0.0;  // d phi / d v_i   (bound-side argument)
  double db = 0.0;  // d phi / d F_i
};

// phi(a, b) = a + b - sqrt(a^2 + b^2); zero iff a >= 0, b >= 0, ab = 0.
// At the origin kink the limiting element along a = b is used, which keeps
// the generalized Jacobian deterministic.
FBRow fischer_burmeister(double a, double b) {
  FBRow r;
  const double norm = std::hypot(a, b);
  r.value = a + b - norm;
  if (norm > 0.0) {
    r.da = 1.0 - a / norm;
    r.db = 1.0 - b / norm;
  } else {
    r.da = 1.0 - 1.0 / std::sqrt(2.0);
    r.db = 1.0 - 1.0 / std::sqrt(2.0);
  }
  return r;
}

enum class RowKind { kFree, kLower, kUpper, kBoxed };

RowKind classify(double lo, double hi) {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (has_lo && has_hi) return RowKind::kBoxed;
  if (has_lo) return RowKind::kLower;
  if (has_hi) return RowKind::kUpper;
  return RowKind::kFree;
}

// Residual row i of the FB system plus its derivatives with respect to
// (v_i, F_i). Free rows pass F through unchanged.
FBRow phi_row(RowKind kind, double v, double f, double lo, double hi) {
  switch (kind) {
    case RowKind::kFree:
      return {f, 0.0, 1.0};
    case RowKind::kLower:
      return fischer_burmeister(v - lo, f);
    case RowKind::kUpper: {
      FBRow r = fischer_burmeister(hi - v, -f);
      return {-r.value, r.da, r.db};
    }
    case RowKind::kBoxed: {
      // phi(v - lo, -phi(hi - v, -f)) composes the one-sided forms.
      const FBRow inner = fischer_burmeister(hi - v, -f);
      const FBRow outer = fischer_burmeister(v - lo, -inner.value);
      FBRow r;
      r.value = outer.value;
      r.da = outer.da + outer.db * inner.da;
      r.db = outer.db * inner.db;
      return r;
    }
  }
  return {};
}

void project(const MCProblem& prob, Vector& v) {
  v = v.cwiseMax(prob.lower).cwiseMin(prob.upper);
}

// Active-set polish for degenerate solutions: the FB iteration can crawl
// when multipliers are non-unique, while the underlying smooth system
// (bound-active rows pinned, F = 0 elsewhere) remains solvable by damped
// Gauss-Newton. Steps are kept only when they reduce the system residual.
// Returns true when it produced a point; the caller decides whether to
// accept it.
bool polish_active_set(const MCProblem& prob,
                       const std::vector<RowKind>& kinds, Vector& v) {
  Vector f(prob.dim);
  SparseMatrix jac(prob.dim, prob.dim);
  Vector x = v;
  double damping = 1e-8;
  bool moved = false;
  for (int sweep = 0; sweep < 20; ++sweep) {
    if (!prob.eval_fj(x, f, jac) || !f.allFinite()) return false;

    // Classification: a bounded row whose bound gap is smaller than its
    // matching F points to an active bound.
    std::vector<int> active(prob.dim, 0);  // 0 inactive, -1 lower, +1 upper
    for (int i = 0; i < prob.dim; ++i) {
      if (kinds[i] == RowKind::kFree) continue;
      const double gap_lo = kinds[i] != RowKind::kUpper
                                ? x(i) - prob.lower(i)
                                : std::numeric_limits<double>::infinity();
      const double gap_hi = kinds[i] != RowKind::kLower
                                ? prob.upper(i) - x(i)
                                : std::numeric_limits<double>::infinity();
      if (f(i) > 0.0 && gap_lo < f(i))
        active[i] = -1;
      else if (f(i) < 0.0 && gap_hi < -f(i))
        active[i] = +1;
    }

    // Assemble the smooth system: pinned rows replace their F rows.
    std::vector<Eigen::Triplet<double>> trips;
    Vector rhs(prob.dim);
    for (int k = 0; k < jac.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(jac, k); it; ++it)
        if (active[it.row()] == 0)
          trips.emplace_back(static_cast<int>(it.row()),
                             static_cast<int>(it.col()), it.value());
    for (int i = 0; i < prob.dim; ++i) {
      if (active[i] == 0) {
        rhs(i) = -f(i);
      } else {
        trips.emplace_back(i, i, 1.0);
        rhs(i) = active[i] < 0 ? prob.lower(i) - x(i) : prob.upper(i) - x(i);
      }
    }
    const double res = rhs.cwiseAbs().maxCoeff();
    if (res < 1e-14) break;
    SparseMatrix sys(prob.dim, prob.dim);
    sys.setFromTriplets(trips.begin(), trips.end());

    // Damped Gauss-Newton step; an undamped minimum-norm step can blow up
    // through near-zero singular values of the degenerate system.
    const SparseMatrix syst = SparseMatrix(sys.transpose());
    const Vector grad = syst * rhs;
    SparseMatrix normal = syst * sys;
    SparseMatrix eye(prob.dim, prob.dim);
    eye.setIdentity();

    bool stepped = false;
    for (int attempt = 0; attempt < 8 && !stepped; ++attempt) {
      SparseMatrix m = normal + SparseMatrix(damping * eye);
      Eigen::SimplicialLDLT<SparseMatrix> ldlt(m);
      if (ldlt.info() != Eigen::Success) {
        damping *= 100.0;
        continue;
      }
      const Vector dx = ldlt.solve(grad);
      if (!dx.allFinite()) {
        damping *= 100.0;
        continue;
      }
      Vector cand = x + dx;
      cand = cand.cwiseMax(prob.lower).cwiseMin(prob.upper);
      Vector fc(prob.dim);
      if (!prob.eval_f(cand, fc) || !fc.allFinite()) {
        damping *= 100.0;
        continue;
      }
      // Residual of the same system at the candidate (same classification).
      double cand_res = 0.0;
      for (int i = 0; i < prob.dim; ++i) {
        double r;
        if (active[i] == 0)
          r = fc(i);
        else
          r = active[i] < 0 ? cand(i) - prob.lower(i)
                            : prob.upper(i) - cand(i);
        cand_res = std::max(cand_res, std::abs(r));
      }
      if (cand_res < res) {
        x = cand;
        stepped = true;
        moved = true;
        damping = std::max(1e-12, damping * 0.1);
      } else {
        damping *= 100.0;
      }
    }
    if (!stepped) break;
  }
  if (!moved) return false;
  v = x;
  return true;
}

struct PhiEval {
  Vector phi;
  double merit = 0.0;
  double residual = 0.0;
  bool ok = false;
};

PhiEval eval_phi(const MCProblem& prob, const std::vector<RowKind>& kinds,
                 const Vector& v, Vector& f_buf) {
  PhiEval out;
  if (!prob.eval_f(v, f_buf) || !f_buf.allFinite()) return out;
  out.phi.resize(prob.dim);
  for (int i = 0; i < prob.dim; ++i) {
    out.phi(i) =
        phi_row(kinds[i], v(i), f_buf(i), prob.lower(i), prob.upper(i)).value;
  }
  if (!out.phi.allFinite()) return out;
  out.merit = 0.5 * out.phi.squaredNorm();
  out.residual = out.phi.cwiseAbs().maxCoeff();
  out.ok = true;
  return out;
}

}  // namespace

const char* to_string(MCPStatus s) {
  switch (s) {
    case MCPStatus::kConverged:
      return "converged";
    case MCPStatus::kMaxIter:
      return "max_iter";
    case MCPStatus::kSingular:
      return "singular";
    case MCPStatus::kDiverged:
      return "diverged";
  }
  return "unknown";
}

std::pair<double, Vector> merit_and_residual(const MCProblem& prob,
                                             const Vector& v) {
  std::vector<RowKind> kinds(prob.dim);
  for (int i = 0; i < prob.dim; ++i)
    kinds[i] = classify(prob.lower(i), prob.upper(i));
  Vector f(prob.dim);
  PhiEval e = eval_phi(prob, kinds, v, f);
  if (!e.ok) throw std::runtime_error("MCP callback failed");
  return {e.merit, e.phi};
}

MCPSolution solve_mcp(const MCProblem& prob, const MCPOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  MCPSolution sol;
  sol.v = prob.v0;
  project(prob, sol.v);

  std::vector<RowKind> kinds(prob.dim);
  for (int i = 0; i < prob.dim; ++i)
    kinds[i] = classify(prob.lower(i), prob.upper(i));

  SplitMix64 rng(opts.seed);
  Vector v = sol.v;
  Vector f(prob.dim);
  SparseMatrix jac(prob.dim, prob.dim);
  Eigen::SparseLU<SparseMatrix> lu;

  auto finish = [&](MCPStatus status, const Vector& at, double residual,
                    double merit, int iters, const std::string& why) {
    sol.status = status;
    sol.v = at;
    sol.residual = residual;
    sol.merit = merit;
    sol.iterations = iters;
    sol.diagnostic = why;
    sol.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    return sol;
  };

  int restarts_left = opts.restarts;
  int stall_count = 0;
  int slow_count = 0;  // consecutive iterations with poor relative progress
  bool prefer_lm = false;
  double last_merit = kInf;

  Vector best_v = v;
  double best_residual = kInf;
  double best_merit = kInf;

  auto restart = [&](int iter) {
    --restarts_left;
    v = prob.v0;
    for (int i = 0; i < prob.dim; ++i) {
      const double scale = 0.1 * std::max(1.0, std::abs(prob.v0(i)));
      v(i) += scale * rng.uniform(-1.0, 1.0);
    }
    project(prob, v);
    stall_count = 0;
    slow_count = 0;
    prefer_lm = false;
    last_merit = kInf;
    log_debug("mcp: restart at iteration %d (%d left)", iter, restarts_left);
  };

  // Degenerate endgames creep: when relative merit progress dries up close
  // to a solution, hand the point to the active-set polish. Result is the
  // polished point's evaluation when it does not regress the merit.
  struct PolishOutcome {
    bool usable = false;
    Vector point;
    PhiEval eval;
  };
  auto try_polish = [&](const Vector& from, double from_merit) {
    PolishOutcome out;
    Vector polished = from;
    if (!polish_active_set(prob, kinds, polished)) return out;
    out.eval = eval_phi(prob, kinds, polished, f);
    if (!out.eval.ok || out.eval.merit > from_merit) return out;
    out.usable = true;
    out.point = std::move(polished);
    return out;
  };

  // Failure exits route through here: a final polish from the best point
  // frequently closes the last decades of a degenerate endgame.
  auto fail = [&](MCPStatus status, int iters, const std::string& why) {
    if (best_residual > opts.tol && best_residual < 1e-1) {
      const PolishOutcome out = try_polish(best_v, best_merit);
      if (out.usable && out.eval.residual < best_residual) {
        best_residual = out.eval.residual;
        best_merit = out.eval.merit;
        best_v = out.point;
      }
    }
    if (best_residual <= opts.tol)
      return finish(MCPStatus::kConverged, best_v, best_residual, best_merit,
                    iters, "");
    return finish(status, best_v, best_residual, best_merit, iters, why);
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (!prob.eval_fj(v, f, jac) || !f.allFinite()) {
      if (restarts_left > 0) {
        restart(iter);
        continue;
      }
      return fail(MCPStatus::kDiverged, iter, "callback failure or non-finite F");
    }

    Vector phi(prob.dim), da(prob.dim), db(prob.dim);
    for (int i = 0; i < prob.dim; ++i) {
      const FBRow r =
          phi_row(kinds[i], v(i), f(i), prob.lower(i), prob.upper(i));
      phi(i) = r.value;
      da(i) = r.da;
      db(i) = r.db;
    }
    if (!phi.allFinite()) {
      if (restarts_left > 0) {
        restart(iter);
        continue;
      }
      return fail(MCPStatus::kDiverged, iter, "non-finite residual");
    }

    const double merit = 0.5 * phi.squaredNorm();
    const double residual = phi.cwiseAbs().maxCoeff();
    if (residual < best_residual) {
      best_residual = residual;
      best_merit = merit;
      best_v = v;
    }
    if (residual <= opts.tol) {
      if (opts.iter_log) (*opts.iter_log) << iter << ',' << merit << ",0\n";
      return finish(MCPStatus::kConverged, v, residual, merit, iter, "");
    }

    // Stagnation bookkeeping: relative merit decrease over a window.
    if (merit > (1.0 - kStallRelDecrease) * last_merit)
      ++stall_count;
    else
      stall_count = 0;
    const double progress =
        last_merit < kInf ? (last_merit - merit) / last_merit : 1.0;
    if (progress < 1e-3)
      ++slow_count;
    else if (progress > 0.05)
      slow_count = 0;
    last_merit = merit;
    if (slow_count >= 3) prefer_lm = true;
    if ((slow_count == 3 || (slow_count > 3 && slow_count % 25 == 0)) &&
        residual < 1e-1) {
      const PolishOutcome out = try_polish(v, merit);
      if (out.usable) {
        if (out.eval.residual <= opts.tol)
          return finish(MCPStatus::kConverged, out.point, out.eval.residual,
                        out.eval.merit, iter, "");
        v = out.point;
        last_merit = out.eval.merit;
        continue;
      }
    }
    if (stall_count >= kStallWindow) {
      if (residual < 1e-1) {
        const PolishOutcome out = try_polish(v, merit);
        if (out.usable && out.eval.residual <= opts.tol)
          return finish(MCPStatus::kConverged, out.point, out.eval.residual,
                        out.eval.merit, iter, "");
      }
      if (restarts_left > 0) {
        restart(iter);
        continue;
      }
      return fail(MCPStatus::kDiverged, iter, "stalled with no restart budget");
    }

    // Generalized Jacobian of Phi: diag(da) + diag(db) * J.
    SparseMatrix jphi(prob.dim, prob.dim);
    {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(jac.nonZeros()) + prob.dim);
      for (int k = 0; k < jac.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(jac, k); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()),
                             static_cast<int>(it.col()),
                             db(it.row()) * it.value());
      for (int i = 0; i < prob.dim; ++i) trips.emplace_back(i, i, da(i));
      jphi.setFromTriplets(trips.begin(), trips.end());
    }

    const Vector grad_merit = jphi.transpose() * phi;
    const double phi_norm = std::sqrt(2.0 * merit);

    // Direction cascade: plain Newton (least-squares via complete orthogonal
    // factorization when the factorization fails), then Levenberg-Marquardt
    // Gauss-Newton directions with growing damping. Rank-deficient
    // generalized Jacobians at degenerate solutions make the pure Newton
    // step explode; the LM direction stays a descent direction for the merit
    // and, with damping proportional to ||Phi||, keeps fast local
    // convergence.
    bool accepted = false;
    bool any_direction = false;
    double step = 0.0;
    Vector trial;
    // The dense complete-orthogonal fallback is the last entry: it handles
    // exactly singular systems but costs too much to run per iteration.
    for (double damping : {0.0, 1e-4, 1e-1, -1.0}) {
      if (damping == 0.0 && prefer_lm) continue;
      Vector dv;
      bool have_direction = false;
      if (damping == 0.0) {
        lu.compute(jphi);
        if (lu.info() == Eigen::Success) {
          dv = lu.solve(-phi);
          have_direction =
              dv.allFinite() && dv.norm() <= 1e5 * (1.0 + v.norm());
        }
      } else if (damping < 0.0) {
        if (prob.dim > 2000) continue;
        Matrix dense(jphi);
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(dense);
        dv = cod.solve(-phi);
        have_direction = dv.allFinite();
      } else {
        const double delta = damping * (1e-8 + phi_norm);
        SparseMatrix normal = SparseMatrix(jphi.transpose()) * jphi;
        SparseMatrix eye(prob.dim, prob.dim);
        eye.setIdentity();
        normal = normal + SparseMatrix(delta * eye);
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(normal);
        if (ldlt.info() == Eigen::Success) {
          dv = ldlt.solve(-grad_merit);
          have_direction = dv.allFinite();
        }
      }
      if (!have_direction) continue;
      any_direction = true;

      double slope = grad_merit.dot(dv);
      if (!(slope < 0.0)) {
        dv = -grad_merit;
        slope = -grad_merit.squaredNorm();
        if (!(slope < 0.0)) continue;
      }
      step = 1.0;
      while (step >= kMinStep) {
        trial = v + step * dv;
        project(prob, trial);
        PhiEval e = eval_phi(prob, kinds, trial, f);
        if (e.ok && e.merit <= merit + kArmijo * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (accepted) break;
    }
    if (opts.iter_log)
      (*opts.iter_log) << iter << ',' << merit << ',' << step << '\n';
    if (!accepted) {
      if (restarts_left > 0) {
        restart(iter);
        continue;
      }
      return fail(any_direction ? MCPStatus::kDiverged : MCPStatus::kSingular,
                  iter,
                  any_direction ? "line search failed"
                                : "singular Newton system");
    }
    if (step >= 0.5 && prefer_lm && slow_count == 0) prefer_lm = false;
    v = trial;
  }

  PhiEval e = eval_phi(prob, kinds, v, f);
  if (e.ok && e.residual < best_residual) {
    best_residual = e.residual;
    best_merit = e.merit;
    best_v = v;
  }
  return fail(MCPStatus::kMaxIter, opts.max_iter, "iteration budget exhausted");
}

}  // namespace polyplan
