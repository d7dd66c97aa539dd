// Solver for finitely-constrained convex programs over a box:
//   minimize   f(w)
//   subject to g_c(w) <= 0 for each cut c,  w in box.
//
// Method: augmented Lagrangian on the cut constraints with a projected
// subgradient inner loop (normalized diminishing steps c/sqrt(t), adaptive
// step scale, geometric polish). Needs only function/subgradient evaluations
// and box projections, so nonsmooth convex objectives and constraints are
// handled uniformly.

#pragma once

#include <functional>
#include <vector>

#include "wdro/core.hpp"
#include "wdro/vec.hpp"

namespace wdro {

struct FiniteConvexProgram {
    Box box;  // full decision vector w
    std::function<double(const Vec&)> objective;
    std::function<Vec(const Vec&)> obj_subgrad;
    std::vector<std::function<double(const Vec&)>> cuts;  // g_c(w) <= 0
    std::vector<std::function<Vec(const Vec&)>> cut_subgrads;

    // Optional fused fast paths with identical semantics; when set, they are
    // used instead of the per-cut handles (which may then be left empty).
    // fused_values: f(w) and all g_c(w) in one call (cut_values resized).
    // fused_subgrad: f'(w) + sum_c weights[c] * g_c'(w).
    std::size_t fused_cut_count = 0;
    std::function<void(const Vec& w, double& f, Vec& cut_values)> fused_values;
    std::function<Vec(const Vec& w, const Vec& weights)> fused_subgrad;

    std::size_t n_cuts() const { return fused_values ? fused_cut_count : cuts.size(); }
};

enum class SolveStatus { Optimal, MaxIter, Infeasible };

const char* to_string(SolveStatus s);

struct SolveReport {
    Vec point;
    double objective_value = 0.0;
    double max_constraint_violation = 0.0;  // max(0, max_c g_c); 0 with no cuts
    // projected-gradient residual of the Lagrangian at the returned point with
    // the returned multipliers; for nonsmooth programs this uses the
    // subgradient selection of the handles
    double kkt_residual = 0.0;
    long iterations = 0;  // value+subgradient evaluations of the inner loop
    SolveStatus status = SolveStatus::MaxIter;
    Vec multipliers;  // one per cut, >= 0
};

struct SolverConfig {
    double feas_tol = 1e-6;
    double opt_tol = 1e-6;
    long max_iter = 50000;
    double initial_penalty = -1.0;  // <= 0: chosen automatically
    double step_scale = 1.0;        // the "c" in c/sqrt(t)
};

// warm_start is projected onto the box. warm_multipliers (if nonempty) must
// have one entry per cut; negative entries are clamped to zero. On
// SolveStatus::Optimal the point is feas_tol-feasible and opt_tol-stationary.
// MaxIter returns the best iterate found. Infeasible is declared when the
// penalty grows large while the violation stalls above feas_tol.
SolveReport solve(const FiniteConvexProgram& prog, const Vec& warm_start, const SolverConfig& cfg,
                  const Vec& warm_multipliers = {});

}  // namespace wdro
