// Distributed cutting-surface consensus engine: per-agent state, the dual
// aggregate update, the proximal primal update, certified cut generation, and
// synchronous rounds with quiescence-based termination.
//
// Round structure (synchronous): every agent reads its neighbors' round-k
// estimates of the shared variable, updates its dual aggregate p, solves the
// proximal cut-constrained subproblem for (y, z), then runs the global
// maximization oracle on its semi-infinite constraint and appends a cut when
// the certified value exceeds half its tolerance.

#pragma once

#include <cstdint>
#include <vector>

#include "wdro/core.hpp"
#include "wdro/cut_oracle.hpp"
#include "wdro/subproblem.hpp"
#include "wdro/vec.hpp"

namespace wdro {

struct AgentState {
    Vec p;        // dual aggregate, same dimension as the shared variable
    Vec y;        // shared-variable estimate, inside the global box
    Vec z;        // local variable, inside the agent's box
    CutSet cuts;  // append-only
};

struct RoundRecord {
    int round = 0;
    double consensus_residual = 0.0;  // max_i |y_i - mean(y)|_2
    double max_violation = 0.0;       // max_i certified constraint violation (value + gap)
    double objective = 0.0;           // sum_i phi_i(z_i) + h_i(y_i)
    int cuts_added = 0;
    double p_conservation_gap = 0.0;      // |sum_i p_i|_inf (0 in exact arithmetic)
    double max_own_cut_violation = 0.0;   // max_i max over the agent's own cuts after its solve
    double primal_movement = 0.0;         // max_i |(y,z)_i^{k+1} - (y,z)_i^k|_2
    std::vector<int> per_agent_cut_counts;
    std::vector<SolveStatus> per_agent_status;
    std::vector<double> per_agent_violation;  // certified, carried forward on skipped rounds
    double wall_ms = 0.0;
};

enum class RunStatus { Converged, MaxRounds };

const char* to_string(RunStatus s);

struct RunTrace {
    std::vector<RoundRecord> rounds;
    RunStatus status = RunStatus::MaxRounds;
    int k_stabilize = 0;  // first round index from which every cut set stayed constant
    double effective_epsilon = 0.0;  // max_i eps_i
};

struct AdmmConfig {
    double rho = 0.05;
    Vec eps;  // per-agent tolerance; size 1 broadcasts to all agents
    SolverConfig solver;
    OracleConfig oracle;
    int cut_every = 1;  // run the cut oracle every k-th round
    bool record_timing = false;

    double agent_eps(int i, int n) const {
        if (eps.empty()) throw Error("AdmmConfig: eps not set");
        if (eps.size() == 1) return eps[0];
        if (static_cast<int>(eps.size()) != n) throw DimensionMismatch("AdmmConfig: eps");
        return eps[static_cast<std::size_t>(i)];
    }
};

struct TerminationConfig {
    double consensus_tol = 1e-3;
    int stability_rounds = 50;  // consecutive rounds without any new cut
    int max_rounds = 2000;
};

// Carries solver warm starts and the last certified violations between rounds.
struct AdmmRuntime {
    std::vector<Vec> warm_multipliers;
    std::vector<double> certified_violation;
    std::vector<Vec> last_maximizer;  // oracle seeds

    void init(int n) {
        warm_multipliers.assign(n, {});
        certified_violation.assign(n, 0.0);
        last_maximizer.assign(n, {});
    }
};

// p_i + rho * sum_j (y_i - y_j); pure.
Vec p_update(const AgentState& state, const std::vector<Vec>& neighbor_ys, double rho);

struct PrimalResult {
    Vec y;
    Vec z;
    SolveReport report;
};

// Solve the agent's proximal cut-constrained subproblem
//   min phi_i(z) + h_i(y) + y'p_new + rho * sum_j |y - (y_i^k + y_j^k)/2|^2
// over the agent's boxes subject to g_i(y, z, cut) <= 0 for every stored cut.
PrimalResult primal_update(const AgentState& state, const std::vector<Vec>& neighbor_ys,
                           const Vec& p_new, double rho, const GenericSIP& sip, int agent,
                           const SolverConfig& solver_cfg, const Vec& warm_multipliers = {});

struct CutStepResult {
    bool added = false;
    int n_added = 0;
    CutOracleResult oracle;
};

// Run the certified maximization of xi -> g_i(y_new, z_new, xi) at tolerance
// eps/2 and append the maximizer to the cut set when its value exceeds eps/2.
CutStepResult cut_step(AgentState& state, const Vec& y_new, const Vec& z_new,
                       const GenericSIP& sip, int agent, double eps, int round,
                       const OracleConfig& oracle_cfg, const std::vector<Vec>& seeds = {});

// One synchronous round over all agents; mutates states and runtime.
RoundRecord run_round(std::vector<AgentState>& states, const GenericSIP& sip,
                      const AdmmConfig& cfg, int round, AdmmRuntime& runtime);

std::vector<AgentState> initial_states(const GenericSIP& sip);

struct RunResult {
    std::vector<AgentState> states;
    RunTrace trace;
};

// Rounds until (consensus residual <= tol) and (no cut added network-wide for
// stability_rounds consecutive rounds) and (primal movement <= tol), or until
// max_rounds. Optional per-round callback (trace persistence).
RunResult run_to_convergence(const GenericSIP& sip, const AdmmConfig& cfg,
                             const TerminationConfig& term,
                             const std::function<void(const RoundRecord&)>& on_round = nullptr);

}  // namespace wdro
