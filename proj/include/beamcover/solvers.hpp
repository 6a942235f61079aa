#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamcover/enclosing_cap.hpp"
#include "beamcover/errors.hpp"
#include "beamcover/graph.hpp"
#include "beamcover/kmeans.hpp"

namespace beamcover {

/// One active beam: the users it serves and, once geometry is attached, the
/// pointing direction (unit vector from the satellite).
struct Beam {
    std::vector<int> members;        // sorted user ids
    std::optional<Vec3> boresight;   // unset until attach_boresights
};

/// A clique cover of the instance graph plus beam pointing. Solvers that
/// see only the graph leave boresights unset; attach_boresights fills them.
struct BeamSolution {
    std::vector<Beam> beams;
    int nab = 0;  // number of nonempty beams
    std::string source;
    std::string instance_id;
    std::uint64_t seed = 0;

    CliqueCover cover() const {
        CliqueCover c;
        c.cliques.reserve(beams.size());
        for (const auto& b : beams) c.cliques.push_back(b.members);
        return c;
    }
};

namespace detail {

/// Grows a maximal clique from seed_v inside candidate mask `cand`
/// (must contain only neighbors of seed_v). Each step adds the candidate
/// that keeps the most remaining candidates, ties to the lowest index.
inline std::vector<int> grow_clique(const VisibilityGraph& g, int seed_v, Bitset cand) {
    std::vector<int> clique{seed_v};
    while (cand.any()) {
        int pick = -1;
        int best_rem = -1;
        for (int c = cand.next_set(0); c >= 0; c = cand.next_set(c + 1)) {
            const int rem = and_count(cand.words(), g.row(c).words());
            if (rem > best_rem) {
                best_rem = rem;
                pick = c;
            }
        }
        clique.push_back(pick);
        cand &= g.row(pick);
    }
    std::sort(clique.begin(), clique.end());
    return clique;
}

}  // namespace detail

/// Greedy clique cover. Repeatedly seeds a beam at the unserved vertex with
/// the fewest unserved neighbors (ties to the lowest index) and grows a
/// maximal clique around it. Deterministic; O(N^2 * NAB) worst case.
inline BeamSolution solve_greedy(const VisibilityGraph& g, const SolverParams& params) {
    params.validate();
    const int n = g.size();
    BeamSolution sol;
    sol.source = "greedy";
    sol.seed = params.seed;

    Bitset unserved(n);
    for (int v = 0; v < n; ++v) unserved.set(v);
    int remaining = n;

    while (remaining > 0) {
        int seed_v = -1;
        int fewest = INT_MAX;
        for (int v = unserved.next_set(0); v >= 0; v = unserved.next_set(v + 1)) {
            const int c = and_count(g.row(v).words(), unserved.words());
            if (c < fewest) {
                fewest = c;
                seed_v = v;
            }
        }
        Bitset cand = g.row(seed_v);
        cand &= unserved;
        std::vector<int> clique = detail::grow_clique(g, seed_v, std::move(cand));
        for (int v : clique) unserved.reset(v);
        remaining -= static_cast<int>(clique.size());
        sol.beams.push_back(Beam{std::move(clique), std::nullopt});
    }
    sol.nab = static_cast<int>(sol.beams.size());
    return sol;
}

// ---------------------------------------------------------------------------
// Exact minimum clique cover: branch-and-bound coloring of the complement.
// ---------------------------------------------------------------------------

struct ExactOptions {
    int vertex_cap = 20;
    long long node_budget = 2'000'000;
};

namespace detail {

/// DSATUR greedy coloring; returns colors and sets k_out to the color count.
inline std::vector<int> dsatur_greedy(const VisibilityGraph& h, int& k_out) {
    const int n = h.size();
    std::vector<int> colors(n, -1);
    std::vector<char> used(n + 1, 0);
    k_out = 0;
    for (int step = 0; step < n; ++step) {
        int v = -1, best_sat = -1, best_deg = -1;
        for (int u = 0; u < n; ++u) {
            if (colors[u] >= 0) continue;
            std::fill(used.begin(), used.end(), 0);
            int sat = 0;
            for (int w = h.row(u).next_set(0); w >= 0; w = h.row(u).next_set(w + 1))
                if (colors[w] >= 0 && !used[colors[w]]) {
                    used[colors[w]] = 1;
                    ++sat;
                }
            const int deg = h.degree(u);
            if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
                best_sat = sat;
                best_deg = deg;
                v = u;
            }
        }
        std::fill(used.begin(), used.end(), 0);
        for (int w = h.row(v).next_set(0); w >= 0; w = h.row(v).next_set(w + 1))
            if (colors[w] >= 0) used[colors[w]] = 1;
        int c = 0;
        while (used[c]) ++c;
        colors[v] = c;
        k_out = std::max(k_out, c + 1);
    }
    return colors;
}

struct ColoringBnB {
    const VisibilityGraph& h;
    int n;
    long long budget;
    long long nodes = 0;
    int lb;
    int best_k;
    std::vector<int> best_colors;
    std::vector<int> colors;

    ColoringBnB(const VisibilityGraph& graph, long long node_budget)
        : h(graph), n(graph.size()), budget(node_budget), colors(graph.size(), -1) {}

    // Returns true when the search proved optimality early (best_k == lb).
    bool expand(int colored, int used) {
        if (++nodes > budget)
            throw budget_error("exact solver exceeded its node budget of " + std::to_string(budget));
        if (best_k == lb) return true;
        if (colored == n) {
            best_k = used;
            best_colors = colors;
            return best_k == lb;
        }

        // DSATUR vertex choice: max saturation, then max degree, then index.
        int v = -1, best_sat = -1, best_deg = -1;
        std::vector<char> seen(n, 0);
        for (int u = 0; u < n; ++u) {
            if (colors[u] >= 0) continue;
            std::fill(seen.begin(), seen.end(), 0);
            int sat = 0;
            for (int w = h.row(u).next_set(0); w >= 0; w = h.row(u).next_set(w + 1))
                if (colors[w] >= 0 && !seen[colors[w]]) {
                    seen[colors[w]] = 1;
                    ++sat;
                }
            const int deg = h.degree(u);
            if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
                best_sat = sat;
                best_deg = deg;
                v = u;
            }
        }

        // best_k can shrink inside the recursion, so the bound is live.
        for (int c = 0; c <= std::min(used, best_k - 2); ++c) {
            bool conflict = false;
            for (int w = h.row(v).next_set(0); w >= 0; w = h.row(v).next_set(w + 1))
                if (colors[w] == c) {
                    conflict = true;
                    break;
                }
            if (conflict) continue;
            colors[v] = c;
            if (expand(colored + 1, std::max(used, c + 1))) {
                colors[v] = -1;
                return true;
            }
            colors[v] = -1;
        }
        return false;
    }
};

}  // namespace detail

/// Provably minimum clique cover, for instances up to opt.vertex_cap
/// vertices. Runs branch-and-bound coloring on the complement graph with a
/// DSATUR upper bound and a greedy-clique lower bound. Throws
/// size_cap_error above the cap and budget_error when the node budget runs
/// out, rather than returning a silent suboptimal answer.
inline BeamSolution solve_exact(const VisibilityGraph& g, const ExactOptions& opt = {}) {
    const int n = g.size();
    if (n > opt.vertex_cap)
        throw size_cap_error("exact solver limited to " + std::to_string(opt.vertex_cap) +
                             " vertices, instance has " + std::to_string(n));

    BeamSolution sol;
    sol.source = "exact";
    if (n == 0) return sol;

    const VisibilityGraph h = complement(g);

    int ub = 0;
    std::vector<int> colors = detail::dsatur_greedy(h, ub);

    // Any clique of the complement is a set of mutually incompatible users,
    // so its size lower-bounds the cover.
    int max_deg_v = 0;
    for (int v = 1; v < n; ++v)
        if (h.degree(v) > h.degree(max_deg_v)) max_deg_v = v;
    const int lb = static_cast<int>(detail::grow_clique(h, max_deg_v, h.row(max_deg_v)).size());

    if (ub > lb) {
        detail::ColoringBnB bnb(h, opt.node_budget);
        bnb.lb = lb;
        bnb.best_k = ub;
        bnb.best_colors = colors;
        bnb.expand(0, 0);
        ub = bnb.best_k;
        colors = bnb.best_colors;
    }

    std::vector<std::vector<int>> classes(ub);
    for (int v = 0; v < n; ++v) classes[colors[v]].push_back(v);
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (auto& q : classes) sol.beams.push_back(Beam{std::move(q), std::nullopt});
    sol.nab = ub;
    return sol;
}

// ---------------------------------------------------------------------------
// Clique-constrained K-Means.
// ---------------------------------------------------------------------------

/// Clustering-based cover. Searches over the cluster count K (bisection,
/// from a clique-size-based lower bound) and runs seeded K-Means on user
/// ECEF positions at each probe. Clusterings whose clusters are all cliques
/// are feasible as-is; otherwise each non-clique cluster is split with the
/// greedy solver on its induced subgraph. Returns the fewest-beam solution
/// found within params.mu outer iterations, boresights attached.
inline BeamSolution solve_bkmeans(const UserSet& users, const SatelliteConfig& sat,
                                  const VisibilityGraph& g, const SolverParams& params) {
    params.validate();
    sat.validate();
    const int n = g.size();
    if (n != static_cast<int>(users.size()))
        throw config_error("solve_bkmeans: graph and user set sizes differ");

    std::vector<Vec3> points(n);
    for (int i = 0; i < n; ++i) points[i] = users[i].ecef;

    // Estimate the largest servable group from the busiest vertex.
    int max_deg_v = 0;
    for (int v = 1; v < n; ++v)
        if (g.degree(v) > g.degree(max_deg_v)) max_deg_v = v;
    const int est = static_cast<int>(detail::grow_clique(g, max_deg_v, g.row(max_deg_v)).size());

    int k_lo = (n + est - 1) / est;
    int k_hi = n;
    std::vector<std::vector<int>> best_cover;
    int best_beams = INT_MAX;

    int outer = 0;
    while (k_lo <= k_hi && outer < params.mu) {
        ++outer;
        const int k = k_lo + (k_hi - k_lo) / 2;

        SolverParams kp = params;
        kp.seed = params.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k));
        const KMeansState km = kmeans(points, k, kp);

        std::vector<std::vector<int>> clusters(k);
        for (int p = 0; p < n; ++p) clusters[km.assignment[p]].push_back(p);

        bool all_cliques = true;
        std::vector<std::vector<int>> cover;
        for (auto& cluster : clusters) {
            if (cluster.empty()) continue;
            if (is_clique(g, cluster)) {
                cover.push_back(std::move(cluster));
                continue;
            }
            all_cliques = false;
            const VisibilityGraph sub = induced_subgraph(g, cluster);
            const BeamSolution pieces = solve_greedy(sub, params);
            for (const auto& piece : pieces.beams) {
                std::vector<int> mapped;
                mapped.reserve(piece.members.size());
                for (int local : piece.members) mapped.push_back(cluster[local]);
                cover.push_back(std::move(mapped));
            }
        }

        if (static_cast<int>(cover.size()) < best_beams) {
            best_beams = static_cast<int>(cover.size());
            best_cover = std::move(cover);
        }
        if (all_cliques)
            k_hi = k - 1;
        else
            k_lo = k + 1;
    }

    BeamSolution sol;
    sol.source = "bkmeans";
    sol.seed = params.seed;
    for (auto& q : best_cover) sol.beams.push_back(Beam{std::move(q), std::nullopt});
    sol.nab = static_cast<int>(sol.beams.size());

    const Vec3 sat_pos = sat.position();
    for (auto& beam : sol.beams) {
        std::vector<Vec3> dirs;
        dirs.reserve(beam.members.size());
        for (int m : beam.members) dirs.push_back(normalized(users[m].ecef - sat_pos));
        beam.boresight = min_enclosing_cap(dirs).center;
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Beam pointing.
// ---------------------------------------------------------------------------

/// Angular 1-center of the member directions as seen from the satellite.
/// For a clique the enclosing radius is at most alpha_max/(2*sqrt(3)), so
/// every member ends up well inside alpha_max/2 of the returned direction.
inline Vec3 boresight(std::span<const int> members, const UserSet& users,
                      const SatelliteConfig& sat) {
    if (members.empty()) throw config_error("boresight: empty member set");
    const Vec3 sat_pos = sat.position();
    std::vector<Vec3> dirs;
    dirs.reserve(members.size());
    for (int m : members) {
        if (m < 0 || m >= static_cast<int>(users.size()))
            throw std::out_of_range("boresight: user id " + std::to_string(m) + " out of range");
        dirs.push_back(normalized(users[m].ecef - sat_pos));
    }
    return min_enclosing_cap(dirs).center;
}

inline void attach_boresights(BeamSolution& sol, const UserSet& users, const SatelliteConfig& sat) {
    for (auto& beam : sol.beams)
        if (!beam.members.empty()) beam.boresight = boresight(beam.members, users, sat);
}

// ---------------------------------------------------------------------------
// Validation and dispatch.
// ---------------------------------------------------------------------------

/// Graph-level feasibility: disjoint exhaustive cover into cliques, with a
/// consistent beam count.
inline void validate_solution(const BeamSolution& sol, const VisibilityGraph& g) {
    const CliqueCover cover = sol.cover();
    validate_cover(g, cover);
    if (sol.nab != cover.nonempty_count())
        throw error("solution nab=" + std::to_string(sol.nab) + " but cover has " +
                    std::to_string(cover.nonempty_count()) + " nonempty beams");
}

/// Full feasibility: additionally requires a boresight on every nonempty
/// beam with each member within alpha_max/2 of it.
inline void validate_solution(const BeamSolution& sol, const VisibilityGraph& g,
                              const UserSet& users, const SatelliteConfig& sat) {
    validate_solution(sol, g);
    const Vec3 sat_pos = sat.position();
    const double limit_deg = sat.alpha_max_deg / 2.0 + 1e-9;
    for (const auto& beam : sol.beams) {
        if (beam.members.empty()) continue;
        if (!beam.boresight) throw error("nonempty beam is missing its boresight");
        const Vec3& bs = *beam.boresight;
        if (std::abs(norm(bs) - 1.0) > 1e-9) throw error("boresight is not a unit vector");
        for (int m : beam.members) {
            const double theta = rad_to_deg(angle_between_rad(bs, users[m].ecef - sat_pos));
            if (theta > limit_deg)
                throw error("user " + std::to_string(m) + " is " + std::to_string(theta) +
                            " deg off boresight, beyond alpha_max/2");
        }
    }
}

enum class Algo { greedy, bkmeans, exact };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::greedy: return "greedy";
        case Algo::bkmeans: return "bkmeans";
        default: return "exact";
    }
}

inline Algo parse_algo(const std::string& name) {
    if (name == "greedy") return Algo::greedy;
    if (name == "bkmeans") return Algo::bkmeans;
    if (name == "exact") return Algo::exact;
    throw config_error("unknown algorithm \"" + name + "\" (expected greedy, bkmeans, or exact)");
}

/// Runs one solver on one instance and returns a fully-attached solution.
inline BeamSolution solve_instance(Algo algo, const UserSet& users, const SatelliteConfig& sat,
                                   const VisibilityGraph& g, const SolverParams& params,
                                   const ExactOptions& exact_opts = {}) {
    BeamSolution sol;
    switch (algo) {
        case Algo::greedy: sol = solve_greedy(g, params); break;
        case Algo::bkmeans: sol = solve_bkmeans(users, sat, g, params); break;
        case Algo::exact: sol = solve_exact(g, exact_opts); break;
    }
    if (algo != Algo::bkmeans) attach_boresights(sol, users, sat);
    return sol;
}

}  // namespace beamcover
