#include "wdro/cut_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "wdro/rng.hpp"

namespace wdro {

namespace {

struct Node {
    Box box;
    Vec center;
    double center_value;
    double upper;
    std::uint64_t seq;
};

struct NodeOrder {
    // max-heap on upper bound; older nodes win ties for determinism
    bool operator()(const Node& a, const Node& b) const {
        if (a.upper != b.upper) return a.upper < b.upper;
        return a.seq > b.seq;
    }
};

double checked_eval(const std::function<double(const Vec&)>& g, const Vec& p) {
    const double v = g(p);
    if (!std::isfinite(v)) throw NonFiniteValue("objective returned NaN/inf in global maximization");
    return v;
}

}  // namespace

CutOracleResult approx_global_max(const std::function<double(const Vec&)>& g, const Box& xi_box,
                                  double lipschitz, double tol, const OracleConfig& cfg,
                                  const std::function<double(const Box&)>& box_ub,
                                  const std::vector<Vec>& seeds) {
    if (!(tol > 0.0)) throw Error("approx_global_max: tol must be > 0");
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
        throw Error("approx_global_max: invalid Lipschitz constant");
    xi_box.validate();

    CutOracleResult res;
    std::uint64_t seq = 0;

    auto node_upper = [&](const Box& b, double center_value) {
        double ub = center_value + lipschitz * b.radius();
        if (box_ub) ub = std::min(ub, box_ub(b));
        return ub;
    };

    // candidate pool for multi-cut extraction
    struct Candidate {
        Vec point;
        double value;
    };
    std::vector<Candidate> pool;
    const bool keep_pool = cfg.multi_cut > 1;

    const Vec root_center = xi_box.center();
    const double root_center_value = checked_eval(g, root_center);
    Vec best_point = root_center;
    double best_value = root_center_value;
    if (keep_pool) pool.push_back({best_point, best_value});
    for (const auto& s : seeds) {
        if (s.size() != xi_box.dim() || !xi_box.contains(s, 1e-12)) continue;
        const double v = checked_eval(g, s);
        if (keep_pool) pool.push_back({s, v});
        if (v > best_value) {
            best_value = v;
            best_point = s;
        }
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
    {
        Node root{xi_box, root_center, root_center_value, 0.0, seq++};
        root.upper = node_upper(root.box, root.center_value);
        queue.push(std::move(root));
    }
    res.nodes_expanded = 1;  // root

    // upper bounds of sub-boxes discarded at push time remain part of the
    // certificate (their max never exceeds incumbent + tol, but we track the
    // exact bound rather than assume it)
    double discarded_upper = -std::numeric_limits<double>::infinity();

    while (!queue.empty()) {
        const Node node = queue.top();
        if (node.upper - best_value <= tol) break;
        if (res.nodes_expanded >= cfg.node_budget) {
            res.status = OracleStatus::BudgetExhausted;
            break;
        }
        queue.pop();

        // split the longest axis at its midpoint (lowest index on ties)
        std::size_t axis = 0;
        double wmax = -1.0;
        for (std::size_t i = 0; i < node.box.dim(); ++i) {
            const double w = node.box.upper[i] - node.box.lower[i];
            if (w > wmax) {
                wmax = w;
                axis = i;
            }
        }
        if (wmax <= 0.0) continue;  // point box: center value already exact

        const double mid = 0.5 * (node.box.lower[axis] + node.box.upper[axis]);
        for (int side = 0; side < 2; ++side) {
            Box child = node.box;
            if (side == 0) child.upper[axis] = mid;
            else child.lower[axis] = mid;
            Node cn{child, child.center(), 0.0, 0.0, seq++};
            cn.center_value = checked_eval(g, cn.center);
            ++res.nodes_expanded;
            if (keep_pool && cn.center_value > cfg.multi_cut_threshold)
                pool.push_back({cn.center, cn.center_value});
            if (cn.center_value > best_value) {
                best_value = cn.center_value;
                best_point = cn.center;
            }
            cn.upper = node_upper(cn.box, cn.center_value);
            if (cn.upper > best_value + tol) queue.push(std::move(cn));
            else discarded_upper = std::max(discarded_upper, cn.upper);
        }
    }

    double certified_sup = std::max(best_value, discarded_upper);
    if (!queue.empty()) certified_sup = std::max(certified_sup, queue.top().upper);

    res.maximizer = best_point;
    res.value = best_value;
    res.certified_gap = std::max(0.0, certified_sup - best_value);

    if (keep_pool) {
        std::stable_sort(pool.begin(), pool.end(),
                         [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
        double sep = cfg.min_separation;
        if (sep < 0.0) sep = std::max(1e-12, tol / std::max(lipschitz, 1.0));
        std::vector<const Candidate*> chosen;
        for (const auto& c : pool) {
            if (static_cast<int>(chosen.size()) + 1 >= cfg.multi_cut + 1) break;
            if (c.value <= cfg.multi_cut_threshold) break;
            if (dist2(c.point, best_point) < sep) continue;
            bool far = true;
            for (const auto* p : chosen)
                if (dist2(c.point, p->point) < sep) {
                    far = false;
                    break;
                }
            if (far) chosen.push_back(&c);
        }
        for (const auto* p : chosen) {
            res.extra_points.push_back(p->point);
            res.extra_values.push_back(p->value);
        }
    }
    return res;
}

double estimate_lipschitz(const std::function<double(const Vec&)>& g, const Box& xi_box,
                          int samples, std::uint64_t seed) {
    if (samples < 2) throw Error("estimate_lipschitz: samples >= 2 required");
    xi_box.validate();
    Rng rng(seed);
    const double diam = std::max(xi_box.diameter(), 1e-300);
    double max_ratio = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Vec a = rng.uniform_vec(xi_box.lower, xi_box.upper);
        Vec b;
        if (k % 2 == 0) {
            b = rng.uniform_vec(xi_box.lower, xi_box.upper);
        } else {
            // short chord around a
            b = a;
            for (std::size_t i = 0; i < b.size(); ++i)
                b[i] += 1e-3 * diam * (2.0 * rng.uniform01() - 1.0);
            xi_box.project_in_place(b);
        }
        const double d = dist2(a, b);
        if (d <= 0.0) continue;
        const double ga = g(a);
        const double gb = g(b);
        if (!std::isfinite(ga) || !std::isfinite(gb))
            throw NonFiniteValue("estimate_lipschitz: objective returned NaN/inf");
        max_ratio = std::max(max_ratio, std::abs(ga - gb) / d);
    }
    return 2.0 * max_ratio;
}

}  // namespace wdro
