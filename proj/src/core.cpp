#include "wdro/core.hpp"

#include <algorithm>

#include "wdro/rng.hpp"

namespace wdro {

GraphValidation validate_graph(const Graph& graph) {
    GraphValidation res;
    if (graph.n < 1) {
        res.kind = GraphErrorKind::MalformedEdge;
        res.message = "agent count must be >= 1";
        return res;
    }
    for (const auto& [a, b] : graph.edges) {
        if (a == b) {
            res.kind = GraphErrorKind::MalformedEdge;
            res.message = "self-loop at node " + std::to_string(a);
            return res;
        }
        if (a < 0 || b < 0 || a >= graph.n || b >= graph.n) {
            res.kind = GraphErrorKind::MalformedEdge;
            res.message = "edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") out of range for n=" + std::to_string(graph.n);
            return res;
        }
    }
    // duplicate detection on normalized pairs
    std::vector<std::pair<int, int>> norm;
    norm.reserve(graph.edges.size());
    for (const auto& [a, b] : graph.edges) norm.emplace_back(std::min(a, b), std::max(a, b));
    std::sort(norm.begin(), norm.end());
    if (std::adjacent_find(norm.begin(), norm.end()) != norm.end()) {
        res.kind = GraphErrorKind::MalformedEdge;
        res.message = "duplicate edge";
        return res;
    }

    // connectivity via DFS
    std::vector<int> comp(graph.n, -1);
    int n_comp = 0;
    for (int start = 0; start < graph.n; ++start) {
        if (comp[start] != -1) continue;
        std::vector<int> stack{start};
        comp[start] = n_comp;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [a, b] : graph.edges) {
                int v = -1;
                if (a == u) v = b;
                else if (b == u) v = a;
                if (v >= 0 && comp[v] == -1) {
                    comp[v] = n_comp;
                    stack.push_back(v);
                }
            }
        }
        ++n_comp;
    }
    if (n_comp > 1) {
        res.kind = GraphErrorKind::Disconnected;
        res.components.resize(n_comp);
        for (int i = 0; i < graph.n; ++i) res.components[comp[i]].push_back(i);
        res.message = "graph has " + std::to_string(n_comp) + " components";
        return res;
    }
    res.ok = true;
    return res;
}

void validate_graph_or_throw(const Graph& graph) {
    const auto v = validate_graph(graph);
    if (!v.ok) throw Error("invalid graph: " + v.message);
}

void GenericSIP::validate() const {
    if (n < 1) throw Error("GenericSIP: n >= 1 required");
    if (graph.n != n) throw DimensionMismatch("GenericSIP: graph.n != n");
    validate_graph_or_throw(graph);
    global_box.validate();
    uncertainty_box.validate();
    if (static_cast<int>(local_boxes.size()) != n) throw DimensionMismatch("GenericSIP: local_boxes");
    if (static_cast<int>(phi.size()) != n || static_cast<int>(h.size()) != n ||
        static_cast<int>(g.size()) != n)
        throw DimensionMismatch("GenericSIP: handle lists must have n entries");
    for (const auto& b : local_boxes) b.validate();
    if (initial_y && initial_y->size() != global_box.dim())
        throw DimensionMismatch("GenericSIP: initial_y");
    if (!initial_z.empty()) {
        if (static_cast<int>(initial_z.size()) != n) throw DimensionMismatch("GenericSIP: initial_z");
        for (int i = 0; i < n; ++i) check_dim(initial_z[i], local_boxes[i].dim(), "initial_z[i]");
    }
}

double max_cut_violation(int agent, const Vec& y, const Vec& z, const CutSet& cuts,
                         const GenericSIP& sip) {
    if (agent < 0 || agent >= sip.n) throw DimensionMismatch("max_cut_violation: agent index");
    check_dim(y, sip.global_box.dim(), "max_cut_violation: y");
    check_dim(z, sip.local_boxes[agent].dim(), "max_cut_violation: z");
    if (cuts.empty()) return empty_max_sentinel();
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : cuts.all()) m = std::max(m, sip.g[agent].value(y, z, c.point));
    return m;
}

bool midpoint_convexity_check(const std::function<double(const Vec&)>& f, const Box& box,
                              int trials, std::uint64_t seed, double tol) {
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const Vec a = rng.uniform_vec(box.lower, box.upper);
        const Vec b = rng.uniform_vec(box.lower, box.upper);
        Vec mid(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
        const double lhs = f(mid);
        const double rhs = 0.5 * (f(a) + f(b));
        if (!(lhs <= rhs + tol)) return false;
    }
    return true;
}

}  // namespace wdro
