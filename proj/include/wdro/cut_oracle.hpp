// Certified approximate global maximization of a scalar function over a box
// via Lipschitz branch-and-bound. Returns the best point found together with
// a sound upper bound on the remaining optimality gap.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wdro/core.hpp"
#include "wdro/vec.hpp"

namespace wdro {

enum class OracleStatus { Converged, BudgetExhausted };

struct CutOracleResult {
    Vec maximizer;
    double value = 0.0;          // g at maximizer (certified lower bound on the max)
    double certified_gap = 0.0;  // true max <= value + certified_gap
    std::uint64_t nodes_expanded = 0;
    OracleStatus status = OracleStatus::Converged;
    // additional near-optimal points when multi_cut > 1 (value > threshold,
    // pairwise separated); does not include `maximizer`
    std::vector<Vec> extra_points;
    std::vector<double> extra_values;
};

struct OracleConfig {
    std::uint64_t node_budget = 1'000'000;
    int multi_cut = 1;             // max number of points returned per call
    double multi_cut_threshold = 0.0;  // extra points must exceed this value
    double min_separation = -1.0;  // pairwise distance for extra points; <0 -> auto
};

// Maximize g over xi_box with certificate: on Converged,
//   result.value >= max g - tol  and  max g <= result.value + certified_gap,
// with certified_gap <= tol. `lipschitz` must be a valid Lipschitz constant of
// g on xi_box (caller contract). Node upper bounds are
//   min(g(center) + lipschitz * half_diagonal, box_ub(sub-box))
// when the optional structural bound is given. `seeds` are candidate points
// evaluated up front to warm the incumbent. Deterministic for fixed inputs.
CutOracleResult approx_global_max(const std::function<double(const Vec&)>& g, const Box& xi_box,
                                  double lipschitz, double tol, const OracleConfig& cfg = {},
                                  const std::function<double(const Box&)>& box_ub = nullptr,
                                  const std::vector<Vec>& seeds = {});

// Heuristic Lipschitz estimate: max over sampled pairs of |g(a)-g(b)|/|a-b|,
// inflated by a factor of 2. Half the pairs are independent uniform draws,
// half are short chords to probe local slopes. No guarantee; prefer an
// analytic constant when one is available.
double estimate_lipschitz(const std::function<double(const Vec&)>& g, const Box& xi_box,
                          int samples, std::uint64_t seed);

}  // namespace wdro
