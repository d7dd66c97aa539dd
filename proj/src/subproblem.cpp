#include "wdro/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdro {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::Infeasible: return "infeasible";
    }
    return "?";
}

namespace {

// Uniform access to the plain and fused program interfaces.
class ProgramEval {
  public:
    explicit ProgramEval(const FiniteConvexProgram& prog) : prog_(prog), n_cuts_(prog.n_cuts()) {}

    std::size_t n_cuts() const { return n_cuts_; }

    // f(w) and g_c(w) for all cuts
    void values(const Vec& w, double& f, Vec& cut_vals) const {
        if (prog_.fused_values) {
            prog_.fused_values(w, f, cut_vals);
            if (cut_vals.size() != n_cuts_) throw DimensionMismatch("fused_values output");
        } else {
            f = prog_.objective(w);
            cut_vals.resize(n_cuts_);
            for (std::size_t c = 0; c < n_cuts_; ++c) cut_vals[c] = prog_.cuts[c](w);
        }
    }

    // f'(w) + sum_c weights[c] * g_c'(w)
    Vec weighted_subgrad(const Vec& w, const Vec& weights) const {
        if (prog_.fused_subgrad) return prog_.fused_subgrad(w, weights);
        Vec g = prog_.obj_subgrad(w);
        check_dim(g, w.size(), "objective subgradient");
        for (std::size_t c = 0; c < n_cuts_; ++c)
            if (weights[c] != 0.0) axpy(weights[c], prog_.cut_subgrads[c](w), g);
        return g;
    }

    double objective(const Vec& w) const {
        if (prog_.fused_values) {
            double f;
            Vec tmp;
            prog_.fused_values(w, f, tmp);
            return f;
        }
        return prog_.objective(w);
    }

  private:
    const FiniteConvexProgram& prog_;
    std::size_t n_cuts_;
};

// Augmented Lagrangian value and multiplier weights at w.
struct AlPoint {
    double al = 0.0;
    double objective = 0.0;
    double violation = 0.0;  // max(0, max_c g_c)
};

class AlFunction {
  public:
    AlFunction(const ProgramEval& eval, const Vec& mu, double sigma)
        : eval_(eval), mu_(mu), sigma_(sigma) {}

    AlPoint value(const Vec& w) const {
        AlPoint p;
        eval_.values(w, p.objective, scratch_);
        p.al = p.objective;
        for (std::size_t c = 0; c < scratch_.size(); ++c) {
            const double gc = scratch_[c];
            p.violation = std::max(p.violation, gc);
            const double t = std::max(0.0, mu_[c] + sigma_ * gc);
            p.al += (t * t - mu_[c] * mu_[c]) / (2.0 * sigma_);
        }
        p.violation = std::max(0.0, p.violation);
        if (!std::isfinite(p.al)) throw NonFiniteValue("augmented Lagrangian");
        return p;
    }

    Vec subgrad(const Vec& w) const {
        double f;
        eval_.values(w, f, scratch_);
        weights_.resize(scratch_.size());
        for (std::size_t c = 0; c < scratch_.size(); ++c)
            weights_[c] = std::max(0.0, mu_[c] + sigma_ * scratch_[c]);
        return eval_.weighted_subgrad(w, weights_);
    }

  private:
    const ProgramEval& eval_;
    const Vec& mu_;
    double sigma_;
    mutable Vec scratch_;
    mutable Vec weights_;
};

// projected step w - len * g/|g|
void step_point(const Box& box, const Vec& w, const Vec& grad, double len, Vec& out) {
    out = w;
    const double gn = norm2(grad);
    if (gn > 0.0) axpy(-len / gn, grad, out);
    box.project_in_place(out);
}

// Projected subgradient descent on the AL function; returns the best iterate.
// `evals` counts value/subgradient evaluations against `budget`.
Vec inner_minimize(const AlFunction& al, const Box& box, Vec w, long budget, long& evals,
                   double step_scale) {
    Vec best = w;
    double best_val = al.value(w).al;
    ++evals;

    const double diam = std::max(box.diameter(), 1e-300);
    Vec cand;

    // probe a workable step scale: largest diam/2^k that decreases the AL
    double trust = diam;
    {
        const Vec g0 = al.subgrad(w);
        ++evals;
        for (int k = 0; k < 50 && evals + 1 < budget; ++k) {
            step_point(box, w, g0, trust, cand);
            const double v = al.value(cand).al;
            ++evals;
            if (v < best_val) {
                best = cand;
                best_val = v;
                break;
            }
            trust *= 0.5;
            if (trust < 1e-16 * diam) break;
        }
    }
    trust *= step_scale;

    // diminishing normalized steps trust/sqrt(t), adaptive scale
    int streak = 0, miss = 0;
    long t = 1;
    double cur_val = best_val;
    w = best;
    while (evals + 2 < budget * 7 / 10) {
        const Vec g = al.subgrad(w);
        const double len = trust / std::sqrt(static_cast<double>(t));
        step_point(box, w, g, len, cand);
        const double v = al.value(cand).al;
        evals += 2;
        ++t;
        if (v < cur_val) {
            ++streak;
            miss = 0;
            if (streak >= 4) {
                trust = std::min(trust * 1.3, diam);
                streak = 0;
            }
        } else {
            ++miss;
            streak = 0;
            if (miss >= 6) {
                trust = std::max(trust * 0.5, 1e-16 * diam);
                miss = 0;
            }
        }
        if (v < best_val) {
            best_val = v;
            best = cand;
        }
        w = cand;
        cur_val = v;
        if (len < 1e-15 * diam) break;
    }

    // geometric polish from the best point
    double eta = std::max(trust, 1e-12 * diam);
    while (evals + 2 < budget && eta > 1e-16 * diam) {
        int misses = 0;
        int steps = 0;
        while (evals + 2 < budget && steps < 25) {
            const Vec g = al.subgrad(best);
            step_point(box, best, g, eta, cand);
            const double v = al.value(cand).al;
            evals += 2;
            ++steps;
            if (v < best_val) {
                best_val = v;
                best = cand;
                misses = 0;
            } else {
                if (++misses >= 2) break;
            }
        }
        eta *= 0.4;
    }
    return best;
}

}  // namespace

SolveReport solve(const FiniteConvexProgram& prog, const Vec& warm_start, const SolverConfig& cfg,
                  const Vec& warm_multipliers) {
    prog.box.validate();
    if (!prog.fused_values && prog.cuts.size() != prog.cut_subgrads.size())
        throw DimensionMismatch("cuts vs cut_subgrads");
    if (!(cfg.feas_tol > 0.0) || !(cfg.opt_tol > 0.0))
        throw Error("solve: tolerances must be > 0");
    check_dim(warm_start, prog.box.dim(), "warm_start");

    const ProgramEval eval(prog);
    const std::size_t n_cuts = eval.n_cuts();
    Vec mu(n_cuts, 0.0);
    if (!warm_multipliers.empty()) {
        check_dim(warm_multipliers, n_cuts, "warm_multipliers");
        for (std::size_t c = 0; c < n_cuts; ++c) mu[c] = std::max(0.0, warm_multipliers[c]);
    }

    Vec w = prog.box.project(warm_start);

    SolveReport rep;
    rep.iterations = 0;

    Vec cut_vals;
    auto violation_at = [&](const Vec& p) {
        if (n_cuts == 0) return 0.0;
        double f;
        eval.values(p, f, cut_vals);
        double v = 0.0;
        for (double gc : cut_vals) v = std::max(v, gc);
        return std::max(0.0, v);
    };

    auto kkt_at = [&](const Vec& p) {
        Vec gl = eval.weighted_subgrad(p, mu);
        Vec moved = p;
        axpy(-1.0, gl, moved);
        prog.box.project_in_place(moved);
        return dist_inf(p, moved);
    };

    double sigma = cfg.initial_penalty;
    if (!(sigma > 0.0)) {
        const double f0 = eval.objective(w);
        const double v0 = violation_at(w);
        sigma = std::max(1.0, std::abs(f0) / std::max(1.0, v0 * v0));
        sigma = std::min(sigma, 1e6);
    }

    const int max_outer = n_cuts == 0 ? 1 : 25;
    double prev_viol = std::numeric_limits<double>::infinity();
    int stalled = 0;

    for (int outer = 0; outer < max_outer; ++outer) {
        const long remaining = cfg.max_iter - rep.iterations;
        if (remaining <= 10) break;
        long budget = n_cuts == 0 ? remaining
                                  : std::max<long>(200, remaining / std::max(2, max_outer - outer));
        budget = std::min(budget, remaining);

        AlFunction al(eval, mu, std::max(sigma, 1e-12));
        w = inner_minimize(al, prog.box, w, budget, rep.iterations, cfg.step_scale);

        if (n_cuts == 0) break;

        // multiplier update at the inner solution
        double f_unused;
        eval.values(w, f_unused, cut_vals);
        double viol = 0.0;
        for (std::size_t c = 0; c < n_cuts; ++c) {
            viol = std::max(viol, cut_vals[c]);
            mu[c] = std::max(0.0, mu[c] + sigma * cut_vals[c]);
        }
        viol = std::max(0.0, viol);

        if (viol <= cfg.feas_tol && kkt_at(w) <= cfg.opt_tol) break;

        if (viol > 0.25 * prev_viol) sigma = std::min(sigma * 5.0, 1e10);
        if (viol > std::max(100.0 * cfg.feas_tol, 1e-10) && viol > 0.9 * prev_viol) ++stalled;
        else stalled = 0;
        if (sigma >= 1e9 && stalled >= 4) {
            rep.status = SolveStatus::Infeasible;
            break;
        }
        prev_viol = viol;
    }

    rep.point = w;
    rep.objective_value = eval.objective(w);
    rep.max_constraint_violation = violation_at(w);
    rep.kkt_residual = kkt_at(w);
    rep.multipliers = mu;
    if (rep.status != SolveStatus::Infeasible) {
        rep.status = (rep.max_constraint_violation <= cfg.feas_tol && rep.kkt_residual <= cfg.opt_tol)
                         ? SolveStatus::Optimal
                         : SolveStatus::MaxIter;
    }
    return rep;
}

}  // namespace wdro
