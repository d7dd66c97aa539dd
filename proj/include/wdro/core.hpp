// Domain types for semi-infinite programs with a local/global decision split:
// axis-aligned boxes, communication graphs, problem data with per-agent
// objective/constraint handles, and append-only cut sets.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wdro/vec.hpp"

namespace wdro {

// ---------------------------------------------------------------------------
// Box: axis-aligned compact set [lower, upper]
// ---------------------------------------------------------------------------

struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) { validate(); }

    void validate() const {
        if (lower.empty() || lower.size() != upper.size())
            throw DimensionMismatch("box bounds (dim >= 1, matching sizes)");
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (!(lower[i] <= upper[i]))
                throw Error("box: lower[" + std::to_string(i) + "] > upper[" + std::to_string(i) + "]");
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
                throw NonFiniteValue("box bound");
        }
    }

    std::size_t dim() const { return lower.size(); }

    bool contains(const Vec& x, double tol = 0.0) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    }

    Vec project(const Vec& x) const {
        check_dim(x, dim(), "box project");
        Vec r(x);
        for (std::size_t i = 0; i < dim(); ++i) {
            if (r[i] < lower[i]) r[i] = lower[i];
            if (r[i] > upper[i]) r[i] = upper[i];
        }
        return r;
    }

    void project_in_place(Vec& x) const {
        for (std::size_t i = 0; i < dim(); ++i) {
            if (x[i] < lower[i]) x[i] = lower[i];
            if (x[i] > upper[i]) x[i] = upper[i];
        }
    }

    Vec center() const {
        Vec c(dim());
        for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
        return c;
    }

    // Euclidean half-diagonal
    double radius() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double h = 0.5 * (upper[i] - lower[i]);
            s += h * h;
        }
        return std::sqrt(s);
    }

    double diameter() const { return 2.0 * radius(); }

    // Euclidean distance from p to the box (0 if inside)
    double distance_to(const Vec& p) const {
        check_dim(p, dim(), "box distance");
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            double d = 0.0;
            if (p[i] < lower[i]) d = lower[i] - p[i];
            else if (p[i] > upper[i]) d = p[i] - upper[i];
            s += d * d;
        }
        return std::sqrt(s);
    }

    static Box product(const Box& a, const Box& b) {
        return Box(concat(a.lower, b.lower), concat(a.upper, b.upper));
    }
};

// ---------------------------------------------------------------------------
// Graph: undirected, simple, validated for connectivity
// ---------------------------------------------------------------------------

struct Graph {
    int n = 0;
    // unordered pairs (i, j) with i < j, 0-based agent indices
    std::vector<std::pair<int, int>> edges;

    std::vector<int> neighbors(int i) const {
        std::vector<int> nb;
        for (const auto& [a, b] : edges) {
            if (a == i) nb.push_back(b);
            if (b == i) nb.push_back(a);
        }
        return nb;
    }

    static Graph ring(int n) {
        Graph g;
        g.n = n;
        for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
        if (n > 2) g.edges.emplace_back(0, n - 1);
        return g;
    }

    static Graph complete(int n) {
        Graph g;
        g.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
        return g;
    }
};

enum class GraphErrorKind { None, MalformedEdge, Disconnected };

struct GraphValidation {
    bool ok = false;
    GraphErrorKind kind = GraphErrorKind::None;
    std::string message;
    // connected components (only filled for Disconnected)
    std::vector<std::vector<int>> components;
};

GraphValidation validate_graph(const Graph& graph);
void validate_graph_or_throw(const Graph& graph);

// ---------------------------------------------------------------------------
// Objective / constraint handles
// ---------------------------------------------------------------------------

// Convex scalar function with a subgradient. Convexity is a caller contract;
// see midpoint_convexity_check for the randomized debugging aid.
struct ObjectiveHandle {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> subgrad;
};

// Per-agent semi-infinite constraint g(y, z, xi). Convex in (y, z) for fixed
// xi; locally Lipschitz in xi. The optional hooks tighten the global
// maximization over xi when the instance knows its own structure.
struct ConstraintHandle {
    std::function<double(const Vec& y, const Vec& z, const Vec& xi)> value;
    // subgradient in (y, z) at fixed xi
    std::function<std::pair<Vec, Vec>(const Vec& y, const Vec& z, const Vec& xi)> subgrad_yz;
    // optional allocation-free path: gy += weight * d/dy, gz += weight * d/dz
    std::function<void(const Vec& y, const Vec& z, const Vec& xi, double weight, Vec& gy, Vec& gz)>
        add_subgrad;
    // Lipschitz constant of xi -> g(y, z, xi) over the uncertainty box
    std::function<double(const Vec& y, const Vec& z)> lipschitz_xi;
    // optional: upper bound of g(y, z, .) over a sub-box of the uncertainty set
    std::function<double(const Vec& y, const Vec& z, const Box& sub)> box_upper_bound;
    // optional: candidate maximizer seeds (evaluated to warm the incumbent)
    std::function<std::vector<Vec>(const Vec& y, const Vec& z)> seed_points;
};

// ---------------------------------------------------------------------------
// GenericSIP: n agents over a graph, shared variable y in global_box,
// locals z_i in local_boxes[i], one semi-infinite constraint per agent.
// ---------------------------------------------------------------------------

struct GenericSIP {
    int n = 0;
    Graph graph;
    Box global_box;               // shared decision set
    std::vector<Box> local_boxes; // one per agent
    Box uncertainty_box;
    std::vector<ObjectiveHandle> phi;  // phi_i on z_i
    std::vector<ObjectiveHandle> h;    // h_i on y
    std::vector<ConstraintHandle> g;   // g_i(y, z_i, xi)

    // optional initial iterates (default: box centers)
    std::optional<Vec> initial_y;
    std::vector<Vec> initial_z;  // empty or size n

    void validate() const;

    double network_objective(const std::vector<Vec>& ys, const std::vector<Vec>& zs) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += phi[i].value(zs[i]) + h[i].value(ys[i]);
        return s;
    }
};

// ---------------------------------------------------------------------------
// CutSet: append-only set of points in the uncertainty box
// ---------------------------------------------------------------------------

struct Cut {
    Vec point;
    int round_added = 0;
    double value_at_addition = 0.0;
};

class CutSet {
  public:
    void add(Vec point, int round, double value, const Box& uncertainty_box) {
        if (!uncertainty_box.contains(point, 1e-12))
            throw Error("cut point outside uncertainty box");
        cuts_.push_back(Cut{std::move(point), round, value});
    }

    std::size_t size() const { return cuts_.size(); }
    bool empty() const { return cuts_.empty(); }
    const Cut& operator[](std::size_t i) const { return cuts_[i]; }
    const std::vector<Cut>& all() const { return cuts_; }

  private:
    std::vector<Cut> cuts_;
};

// Sentinel for "max over an empty cut set": only box constraints are active.
inline double empty_max_sentinel() { return -std::numeric_limits<double>::infinity(); }

// Max of g_agent(y, z, xi_bar) over the stored cut points; -inf sentinel when
// the cut set is empty.
double max_cut_violation(int agent, const Vec& y, const Vec& z, const CutSet& cuts,
                         const GenericSIP& sip);

// ---------------------------------------------------------------------------
// Convexity spot check (debugging aid, not a proof):
// f((a+b)/2) <= (f(a)+f(b))/2 + tol on random pairs from the box.
// ---------------------------------------------------------------------------

bool midpoint_convexity_check(const std::function<double(const Vec&)>& f, const Box& box,
                              int trials, std::uint64_t seed, double tol = 1e-9);

}  // namespace wdro
