#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "beamcover/bitset.hpp"
#include "beamcover/errors.hpp"
#include "beamcover/geometry.hpp"

namespace beamcover {

/// Undirected user visibility graph: vertex i ~ vertex k iff one beam can
/// serve both users. Dense symmetric bitset rows; the diagonal is always
/// zero. Immutable after construction in all solver paths.
class VisibilityGraph {
public:
    VisibilityGraph() = default;

    explicit VisibilityGraph(int n, double alpha_max_deg = 0.0)
        : n_(n), alpha_max_deg_(alpha_max_deg), rows_(n, Bitset(n)) {
        if (n < 0) throw config_error("graph size must be >= 0");
    }

    int size() const { return n_; }
    double alpha_max_deg() const { return alpha_max_deg_; }

    bool adjacent(int i, int k) const { return rows_[i].test(k); }

    void add_edge(int i, int k) {
        check_vertex(i);
        check_vertex(k);
        if (i == k) throw config_error("self-loops are not allowed");
        rows_[i].set(k);
        rows_[k].set(i);
    }

    int degree(int i) const { return rows_[i].count(); }

    std::vector<int> neighbors(int i) const {
        std::vector<int> out;
        for (int v = rows_[i].next_set(0); v >= 0; v = rows_[i].next_set(v + 1)) out.push_back(v);
        return out;
    }

    const Bitset& row(int i) const { return rows_[i]; }

    int edge_count() const {
        int total = 0;
        for (const auto& r : rows_) total += r.count();
        return total / 2;
    }

    void check_vertex(int v) const {
        if (v < 0 || v >= n_)
            throw std::out_of_range("vertex index " + std::to_string(v) +
                                    " out of range [0, " + std::to_string(n_) + ")");
    }

    friend bool operator==(const VisibilityGraph& a, const VisibilityGraph& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i) {
            auto wa = a.rows_[i].words();
            auto wb = b.rows_[i].words();
            if (!std::equal(wa.begin(), wa.end(), wb.begin())) return false;
        }
        return true;
    }

private:
    int n_ = 0;
    double alpha_max_deg_ = 0.0;
    std::vector<Bitset> rows_;
};

/// Builds the visibility graph: edge iff angular separation <= alpha_max/2,
/// boundary inclusive, compared directly with no epsilon. Deterministic for
/// fixed inputs.
inline VisibilityGraph build_graph(const UserSet& users, const SatelliteConfig& sat,
                                   PairDistance model = PairDistance::chord) {
    sat.validate();
    const int n = static_cast<int>(users.size());
    if (n < 1) throw config_error("build_graph requires at least one user");
    VisibilityGraph g(n, sat.alpha_max_deg);

    const Vec3 sat_pos = sat.position();
    std::vector<double> slant(n);
    for (int i = 0; i < n; ++i) slant[i] = distance(sat_pos, users[i].ecef);

    const double threshold_deg = sat.alpha_max_deg / 2.0;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            double d2;
            if (model == PairDistance::chord) {
                d2 = distance2(users[i].ecef, users[k].ecef);
            } else {
                const double d = great_circle_distance_km(users[i], users[k]);
                d2 = d * d;
            }
            const double sep = detail::separation_from_triangle_deg(slant[i], slant[k], d2);
            if (sep <= threshold_deg) g.add_edge(i, k);
        }
    }
    return g;
}

/// True iff every pair in s is adjacent. The empty set and singletons are
/// cliques. Vertices must be distinct and in range.
inline bool is_clique(const VisibilityGraph& g, std::span<const int> s) {
    for (const int v : s) g.check_vertex(v);
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            if (s[a] == s[b])
                throw config_error("duplicate vertex " + std::to_string(s[a]) + " in clique test");
            if (!g.adjacent(s[a], s[b])) return false;
        }
    }
    return true;
}

/// Off-diagonal edge complement. Involutive.
inline VisibilityGraph complement(const VisibilityGraph& g) {
    const int n = g.size();
    VisibilityGraph c(n, g.alpha_max_deg());
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            if (!g.adjacent(i, k)) c.add_edge(i, k);
    return c;
}

/// Subgraph induced by `vertices`; local index j maps to vertices[j].
inline VisibilityGraph induced_subgraph(const VisibilityGraph& g, std::span<const int> vertices) {
    const int m = static_cast<int>(vertices.size());
    VisibilityGraph sub(m, g.alpha_max_deg());
    for (int a = 0; a < m; ++a) {
        g.check_vertex(vertices[a]);
        for (int b = a + 1; b < m; ++b)
            if (g.adjacent(vertices[a], vertices[b])) sub.add_edge(a, b);
    }
    return sub;
}

/// Partition of the vertex set into cliques; the solver output shape.
struct CliqueCover {
    std::vector<std::vector<int>> cliques;

    int nonempty_count() const {
        int c = 0;
        for (const auto& q : cliques) c += !q.empty();
        return c;
    }
};

/// Throws with a reason unless cover is a disjoint, exhaustive partition of
/// g's vertices into cliques.
inline void validate_cover(const VisibilityGraph& g, const CliqueCover& cover) {
    std::vector<char> seen(g.size(), 0);
    int covered = 0;
    for (const auto& q : cover.cliques) {
        for (int v : q) {
            g.check_vertex(v);
            if (seen[v]) throw error("cover is not disjoint: vertex " + std::to_string(v) + " repeated");
            seen[v] = 1;
            ++covered;
        }
        if (!is_clique(g, q))
            throw error("cover contains a non-clique set of size " + std::to_string(q.size()));
    }
    if (covered != g.size())
        throw error("cover misses " + std::to_string(g.size() - covered) + " vertices");
}

// ---------------------------------------------------------------------------
// Line-oriented text exchange format: header "n <N>", then one "i k" edge
// per line. For debugging and cross-checking against other tools.
// ---------------------------------------------------------------------------

inline void write_edge_list(std::ostream& os, const VisibilityGraph& g) {
    os << "n " << g.size() << "\n";
    for (int i = 0; i < g.size(); ++i)
        for (int k = i + 1; k < g.size(); ++k)
            if (g.adjacent(i, k)) os << i << " " << k << "\n";
}

inline VisibilityGraph read_edge_list(std::istream& is, double alpha_max_deg = 0.0) {
    std::string line;
    int lineno = 0;
    int n = -1;
    VisibilityGraph g;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (n < 0) {
            std::string tag;
            if (!(ls >> tag >> n) || tag != "n" || n < 0)
                throw io_error("edge list line " + std::to_string(lineno) +
                               ": expected header \"n <N>\", got \"" + line + "\"");
            g = VisibilityGraph(n, alpha_max_deg);
            continue;
        }
        int i, k;
        if (!(ls >> i >> k))
            throw io_error("edge list line " + std::to_string(lineno) +
                           ": expected \"i k\", got \"" + line + "\"");
        try {
            g.add_edge(i, k);
        } catch (const std::exception& e) {
            throw io_error("edge list line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (n < 0) throw io_error("edge list: missing \"n <N>\" header");
    return g;
}

}  // namespace beamcover
