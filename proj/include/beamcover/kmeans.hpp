#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "beamcover/errors.hpp"
#include "beamcover/rng.hpp"
#include "beamcover/vec3.hpp"

namespace beamcover {

/// Shared solver knobs. mu caps the outer search loop of the clustering
/// solver; i_max caps Lloyd iterations inside one K-Means run.
struct SolverParams {
    int mu = 400;
    int i_max = 400;
    std::uint64_t seed = 0;
    double tol_km = 1e-6;  // centroid movement below this ends a K-Means run

    void validate() const {
        if (mu < 1) throw config_error("solver.mu must be >= 1");
        if (i_max < 1) throw config_error("solver.i_max must be >= 1");
        if (!(tol_km > 0.0)) throw config_error("solver.tol_km must be > 0");
    }

    friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct KMeansState {
    int k = 0;
    std::vector<Vec3> centroids;
    std::vector<int> assignment;        // point index -> cluster index
    std::vector<double> wcss_history;   // objective after each iteration
    int iterations = 0;
    bool converged = false;
};

/// Seeded Lloyd iteration over 3D points.
///
/// Initialization picks k distinct input points. Each iteration assigns
/// every point to its nearest centroid (ties to the lowest cluster index),
/// reseeds any empty cluster with the point farthest from its current
/// centroid, then recomputes centroids as member means. Stops when the
/// maximum centroid movement drops below tol_km, or after i_max iterations.
/// The objective recorded in wcss_history never increases.
inline KMeansState kmeans(std::span<const Vec3> points, int k, const SolverParams& params) {
    params.validate();
    const int n = static_cast<int>(points.size());
    if (n == 0) throw config_error("kmeans: empty input");
    if (k < 1 || k > n)
        throw config_error("kmeans: k must be in [1, n], got k=" + std::to_string(k) +
                           " n=" + std::to_string(n));

    KMeansState st;
    st.k = k;
    st.assignment.assign(n, -1);
    st.centroids.resize(k);

    auto rng = make_rng(params.seed);
    const std::vector<int> init = sample_distinct(rng, n, k);
    for (int c = 0; c < k; ++c) st.centroids[c] = points[init[c]];

    std::vector<int> members(k, 0);
    std::vector<Vec3> sums(k);

    for (int iter = 1; iter <= params.i_max; ++iter) {
        st.iterations = iter;

        // Assignment step.
        for (int p = 0; p < n; ++p) {
            int best = 0;
            double best_d2 = distance2(points[p], st.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d2 = distance2(points[p], st.centroids[c]);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            st.assignment[p] = best;
        }

        std::fill(members.begin(), members.end(), 0);
        for (int p = 0; p < n; ++p) ++members[st.assignment[p]];

        // Empty clusters steal the point farthest from its own centroid,
        // from donor clusters that keep at least one member. k <= n
        // guarantees a donor exists.
        for (int c = 0; c < k; ++c) {
            if (members[c] > 0) continue;
            int far_p = -1;
            double far_d2 = -1.0;
            for (int p = 0; p < n; ++p) {
                if (members[st.assignment[p]] < 2) continue;
                const double d2 = distance2(points[p], st.centroids[st.assignment[p]]);
                if (d2 > far_d2) {
                    far_d2 = d2;
                    far_p = p;
                }
            }
            assert(far_p >= 0);  // k <= n: some cluster has >= 2 members
            --members[st.assignment[far_p]];
            st.assignment[far_p] = c;
            members[c] = 1;
            st.centroids[c] = points[far_p];
        }

        // Update step: centroids become member means.
        std::fill(sums.begin(), sums.end(), Vec3{});
        for (int p = 0; p < n; ++p) sums[st.assignment[p]] += points[p];
        double move2 = 0.0;
        for (int c = 0; c < k; ++c) {
            const Vec3 nc = sums[c] / static_cast<double>(members[c]);
            move2 = std::max(move2, distance2(nc, st.centroids[c]));
            st.centroids[c] = nc;
        }

        double wcss = 0.0;
        for (int p = 0; p < n; ++p) wcss += distance2(points[p], st.centroids[st.assignment[p]]);
        st.wcss_history.push_back(wcss);

        if (move2 < params.tol_km * params.tol_km) {
            st.converged = true;
            break;
        }
    }
    return st;
}

/// Within-cluster sum of squares for an explicit assignment, centroids taken
/// as member means.
inline double wcss_of_assignment(std::span<const Vec3> points, std::span<const int> assignment, int k) {
    std::vector<Vec3> sums(k);
    std::vector<int> cnt(k, 0);
    for (std::size_t p = 0; p < points.size(); ++p) {
        sums[assignment[p]] += points[p];
        ++cnt[assignment[p]];
    }
    std::vector<Vec3> mean(k);
    for (int c = 0; c < k; ++c)
        if (cnt[c] > 0) mean[c] = sums[c] / static_cast<double>(cnt[c]);
    double total = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) total += distance2(points[p], mean[assignment[p]]);
    return total;
}

}  // namespace beamcover
