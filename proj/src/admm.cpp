#include "wdro/admm.hpp"

#include <chrono>
#include <cmath>

namespace wdro {

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return "converged";
        case RunStatus::MaxRounds: return "max_rounds";
    }
    return "?";
}

Vec p_update(const AgentState& state, const std::vector<Vec>& neighbor_ys, double rho) {
    if (!(rho > 0.0)) throw Error("p_update: rho must be > 0");
    Vec p = state.p;
    for (const auto& yj : neighbor_ys) {
        if (yj.size() != state.y.size()) throw DimensionMismatch("p_update: neighbor y");
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += rho * (state.y[k] - yj[k]);
    }
    return p;
}

PrimalResult primal_update(const AgentState& state, const std::vector<Vec>& neighbor_ys,
                           const Vec& p_new, double rho, const GenericSIP& sip, int agent,
                           const SolverConfig& solver_cfg, const Vec& warm_multipliers) {
    const std::size_t dy = sip.global_box.dim();
    const std::size_t dz = sip.local_boxes[agent].dim();
    check_dim(p_new, dy, "primal_update: p");
    check_dim(state.y, dy, "primal_update: y");
    check_dim(state.z, dz, "primal_update: z");

    // proximal centers (y_i^k + y_j^k)/2
    std::vector<Vec> mids;
    mids.reserve(neighbor_ys.size());
    for (const auto& yj : neighbor_ys) {
        check_dim(yj, dy, "primal_update: neighbor y");
        Vec m(dy);
        for (std::size_t k = 0; k < dy; ++k) m[k] = 0.5 * (state.y[k] + yj[k]);
        mids.push_back(std::move(m));
    }

    const auto& phi = sip.phi[agent];
    const auto& h = sip.h[agent];
    const auto& g = sip.g[agent];

    std::vector<Vec> cut_points;
    cut_points.reserve(state.cuts.size());
    for (const auto& cut : state.cuts.all()) cut_points.push_back(cut.point);

    FiniteConvexProgram prog;
    prog.box = Box::product(sip.global_box, sip.local_boxes[agent]);
    prog.fused_cut_count = cut_points.size();
    // fused evaluation splits w = (y, z) once per call; scratch buffers live
    // inside the closures
    prog.fused_values = [&phi, &h, &g, &p_new, &mids, &cut_points, rho, dy, dz, y = Vec(dy),
                         z = Vec(dz)](const Vec& w, double& f, Vec& cut_vals) mutable {
        std::copy(w.begin(), w.begin() + static_cast<long>(dy), y.begin());
        std::copy(w.begin() + static_cast<long>(dy), w.end(), z.begin());
        double val = phi.value(z) + h.value(y) + dot(y, p_new);
        for (const auto& m : mids) {
            double q = 0.0;
            for (std::size_t k = 0; k < dy; ++k) {
                const double d = y[k] - m[k];
                q += d * d;
            }
            val += rho * q;
        }
        f = val;
        cut_vals.resize(cut_points.size());
        for (std::size_t c = 0; c < cut_points.size(); ++c)
            cut_vals[c] = g.value(y, z, cut_points[c]);
        (void)dz;
    };
    prog.fused_subgrad = [&phi, &h, &g, &p_new, &mids, &cut_points, rho, dy, dz, y = Vec(dy),
                          z = Vec(dz)](const Vec& w, const Vec& weights) mutable {
        std::copy(w.begin(), w.begin() + static_cast<long>(dy), y.begin());
        std::copy(w.begin() + static_cast<long>(dy), w.end(), z.begin());
        Vec gy = h.subgrad(y);
        check_dim(gy, dy, "h subgradient");
        axpy(1.0, p_new, gy);
        for (const auto& m : mids)
            for (std::size_t k = 0; k < dy; ++k) gy[k] += 2.0 * rho * (y[k] - m[k]);
        Vec gz = phi.subgrad(z);
        check_dim(gz, dz, "phi subgradient");
        for (std::size_t c = 0; c < cut_points.size(); ++c) {
            if (weights[c] == 0.0) continue;
            if (g.add_subgrad) {
                g.add_subgrad(y, z, cut_points[c], weights[c], gy, gz);
            } else {
                auto [sy, sz] = g.subgrad_yz(y, z, cut_points[c]);
                axpy(weights[c], sy, gy);
                axpy(weights[c], sz, gz);
            }
        }
        return concat(gy, gz);
    };

    const Vec warm = concat(state.y, state.z);
    SolveReport rep = solve(prog, warm, solver_cfg, warm_multipliers);

    PrimalResult res;
    auto [y_new, z_new] = split(rep.point);
    res.y = std::move(y_new);
    res.z = std::move(z_new);
    res.report = std::move(rep);
    return res;
}

CutStepResult cut_step(AgentState& state, const Vec& y_new, const Vec& z_new,
                       const GenericSIP& sip, int agent, double eps, int round,
                       const OracleConfig& oracle_cfg, const std::vector<Vec>& seeds) {
    if (!(eps > 0.0)) throw Error("cut_step: eps must be > 0");
    const auto& g = sip.g[agent];

    auto objective = [&](const Vec& xi) { return g.value(y_new, z_new, xi); };
    const double lip = g.lipschitz_xi ? g.lipschitz_xi(y_new, z_new)
                                      : throw Error("cut_step: missing Lipschitz hint");

    std::function<double(const Box&)> box_ub;
    if (g.box_upper_bound)
        box_ub = [&](const Box& sub) { return g.box_upper_bound(y_new, z_new, sub); };

    std::vector<Vec> all_seeds = seeds;
    if (g.seed_points) {
        auto extra = g.seed_points(y_new, z_new);
        all_seeds.insert(all_seeds.end(), extra.begin(), extra.end());
    }

    OracleConfig cfg = oracle_cfg;
    cfg.multi_cut_threshold = 0.5 * eps;

    CutStepResult res;
    res.oracle = approx_global_max(objective, sip.uncertainty_box, lip, 0.5 * eps, cfg, box_ub,
                                   all_seeds);
    if (res.oracle.value > 0.5 * eps) {
        state.cuts.add(res.oracle.maximizer, round, res.oracle.value, sip.uncertainty_box);
        res.added = true;
        res.n_added = 1;
        for (std::size_t k = 0; k < res.oracle.extra_points.size(); ++k) {
            state.cuts.add(res.oracle.extra_points[k], round, res.oracle.extra_values[k],
                           sip.uncertainty_box);
            ++res.n_added;
        }
    }
    return res;
}

std::vector<AgentState> initial_states(const GenericSIP& sip) {
    std::vector<AgentState> states(sip.n);
    const Vec y0 = sip.initial_y ? *sip.initial_y : sip.global_box.center();
    for (int i = 0; i < sip.n; ++i) {
        states[i].p.assign(sip.global_box.dim(), 0.0);
        states[i].y = sip.global_box.project(y0);
        states[i].z = sip.initial_z.empty() ? sip.local_boxes[i].center()
                                            : sip.local_boxes[i].project(sip.initial_z[i]);
    }
    return states;
}

RoundRecord run_round(std::vector<AgentState>& states, const GenericSIP& sip,
                      const AdmmConfig& cfg, int round, AdmmRuntime& runtime) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = sip.n;
    if (static_cast<int>(states.size()) != n) throw DimensionMismatch("run_round: states");

    // snapshot round-k shared-variable estimates (synchronous exchange)
    std::vector<Vec> ys_k(n);
    for (int i = 0; i < n; ++i) ys_k[i] = states[i].y;
    std::vector<std::vector<int>> nbrs(n);
    for (int i = 0; i < n; ++i) nbrs[i] = sip.graph.neighbors(i);

    RoundRecord rec;
    rec.round = round;
    rec.per_agent_cut_counts.resize(n);
    rec.per_agent_status.resize(n);
    rec.per_agent_violation.resize(n);

    const bool oracle_round = (cfg.cut_every <= 1) || (round % cfg.cut_every == 0);

    for (int i = 0; i < n; ++i) {
        std::vector<Vec> neighbor_ys;
        neighbor_ys.reserve(nbrs[i].size());
        for (int j : nbrs[i]) neighbor_ys.push_back(ys_k[j]);

        const Vec p_new = p_update(states[i], neighbor_ys, cfg.rho);
        PrimalResult pr = primal_update(states[i], neighbor_ys, p_new, cfg.rho, sip, i, cfg.solver,
                                        runtime.warm_multipliers[i]);
        if (pr.report.status == SolveStatus::Infeasible)
            throw Error("agent " + std::to_string(i) + " subproblem infeasible at round " +
                        std::to_string(round));

        const Vec old_yz = concat(states[i].y, states[i].z);
        const Vec new_yz = concat(pr.y, pr.z);
        rec.primal_movement = std::max(rec.primal_movement, dist2(old_yz, new_yz));

        states[i].p = p_new;
        states[i].y = pr.y;
        states[i].z = pr.z;
        runtime.warm_multipliers[i] = pr.report.multipliers;
        rec.per_agent_status[i] = pr.report.status;

        const double own_viol = states[i].cuts.empty()
                                    ? 0.0
                                    : std::max(0.0, max_cut_violation(i, states[i].y, states[i].z,
                                                                      states[i].cuts, sip));
        rec.max_own_cut_violation = std::max(rec.max_own_cut_violation, own_viol);

        if (oracle_round) {
            std::vector<Vec> seeds;
            if (!runtime.last_maximizer[i].empty()) seeds.push_back(runtime.last_maximizer[i]);
            const double eps_i = cfg.agent_eps(i, n);
            CutStepResult cs =
                cut_step(states[i], states[i].y, states[i].z, sip, i, eps_i, round, cfg.oracle, seeds);
            rec.cuts_added += cs.n_added;
            runtime.certified_violation[i] = cs.oracle.value + cs.oracle.certified_gap;
            runtime.last_maximizer[i] = cs.oracle.maximizer;
            // grow the multiplier warm start for freshly added cuts
            for (int k = 0; k < cs.n_added; ++k) runtime.warm_multipliers[i].push_back(0.0);
        }
        rec.per_agent_violation[i] = runtime.certified_violation[i];
        rec.per_agent_cut_counts[i] = static_cast<int>(states[i].cuts.size());
    }

    // network diagnostics from post-round state
    Vec ybar(sip.global_box.dim(), 0.0);
    for (int i = 0; i < n; ++i) axpy(1.0 / n, states[i].y, ybar);
    Vec psum(sip.global_box.dim(), 0.0);
    for (int i = 0; i < n; ++i) axpy(1.0, states[i].p, psum);
    for (int i = 0; i < n; ++i) {
        rec.consensus_residual = std::max(rec.consensus_residual, dist2(states[i].y, ybar));
        rec.max_violation = std::max(rec.max_violation, runtime.certified_violation[i]);
        rec.objective += sip.phi[i].value(states[i].z) + sip.h[i].value(states[i].y);
    }
    rec.p_conservation_gap = norm_inf(psum);

    if (cfg.record_timing) {
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    if (!std::isfinite(rec.objective) || !std::isfinite(rec.consensus_residual))
        throw NonFiniteValue("round record");
    return rec;
}

RunResult run_to_convergence(const GenericSIP& sip, const AdmmConfig& cfg,
                             const TerminationConfig& term,
                             const std::function<void(const RoundRecord&)>& on_round) {
    sip.validate();
    RunResult out;
    out.states = initial_states(sip);
    AdmmRuntime runtime;
    runtime.init(sip.n);

    double eff_eps = 0.0;
    for (int i = 0; i < sip.n; ++i) eff_eps = std::max(eff_eps, cfg.agent_eps(i, sip.n));
    out.trace.effective_epsilon = eff_eps;

    int quiescent = 0;
    int last_cut_round = -1;
    out.trace.status = RunStatus::MaxRounds;

    for (int round = 0; round < term.max_rounds; ++round) {
        RoundRecord rec = run_round(out.states, sip, cfg, round, runtime);
        if (rec.cuts_added > 0) {
            quiescent = 0;
            last_cut_round = round;
        } else {
            ++quiescent;
        }
        out.trace.rounds.push_back(rec);
        if (on_round) on_round(rec);

        if (quiescent >= term.stability_rounds && rec.consensus_residual <= term.consensus_tol &&
            rec.primal_movement <= term.consensus_tol) {
            out.trace.status = RunStatus::Converged;
            break;
        }
    }
    out.trace.k_stabilize = last_cut_round + 1;
    return out;
}

}  // namespace wdro
