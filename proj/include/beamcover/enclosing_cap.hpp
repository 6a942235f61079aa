#pragma once

#include <array>
#include <span>
#include <vector>

#include "beamcover/errors.hpp"
#include "beamcover/rng.hpp"
#include "beamcover/vec3.hpp"

namespace beamcover {

/// Smallest spherical cap (on the unit direction sphere) containing a set
/// of unit vectors: center is the angular 1-center, radius_deg the largest
/// deviation from it.
struct EnclosingCap {
    Vec3 center;        // unit vector
    double radius_deg;  // max angle from center to any input direction
};

namespace detail {

struct Ball {
    Vec3 c;
    double r2 = -1.0;  // negative: empty ball, contains nothing

    bool contains(const Vec3& p) const {
        if (r2 < 0.0) return false;
        return distance2(p, c) <= r2 + 1e-12 * (1.0 + r2);
    }
};

inline Ball ball_of_1(const Vec3& a) { return {a, 0.0}; }

inline Ball ball_of_2(const Vec3& a, const Vec3& b) {
    const Vec3 c = 0.5 * (a + b);
    return {c, std::max(distance2(a, c), distance2(b, c))};
}

inline Ball ball_of_3(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a;
    const Vec3 v = c - a;
    const double uu = dot(u, u), vv = dot(v, v), uv = dot(u, v);
    const double det = uu * vv - uv * uv;
    if (det <= 1e-14 * uu * vv) {
        // Collinear: the widest pair ball covers all three.
        const std::array<std::array<Vec3, 3>, 3> combos = {{{a, b, c}, {a, c, b}, {b, c, a}}};
        Ball best;
        for (const auto& t : combos) {
            const Ball bb = ball_of_2(t[0], t[1]);
            if (bb.contains(t[2]) && (best.r2 < 0.0 || bb.r2 < best.r2)) best = bb;
        }
        if (best.r2 >= 0.0) return best;
        return ball_of_2(a, b);
    }
    const double s = vv * (uu - uv) / (2.0 * det);
    const double t = uu * (vv - uv) / (2.0 * det);
    const Vec3 center = a + s * u + t * v;
    const double r2 = std::max({distance2(a, center), distance2(b, center), distance2(c, center)});
    return {center, r2};
}

inline Ball ball_of_4(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    // Circumsphere: 2 (X - a) . p = |X|^2 - |a|^2 for X in {b, c, d}.
    const Vec3 r1 = b - a, r2v = c - a, r3 = d - a;
    const double k1 = 0.5 * (norm2(b) - norm2(a));
    const double k2 = 0.5 * (norm2(c) - norm2(a));
    const double k3 = 0.5 * (norm2(d) - norm2(a));
    const double det = dot(r1, cross(r2v, r3));
    const double scale = norm(r1) * norm(r2v) * norm(r3);
    if (std::abs(det) <= 1e-14 * std::max(scale, 1e-300)) {
        // Coplanar: some face ball covers the fourth point.
        Ball best;
        const Vec3 pts[4] = {a, b, c, d};
        for (int skip = 0; skip < 4; ++skip) {
            Vec3 tri[3];
            int m = 0;
            for (int i = 0; i < 4; ++i)
                if (i != skip) tri[m++] = pts[i];
            const Ball bb = ball_of_3(tri[0], tri[1], tri[2]);
            if (bb.contains(pts[skip]) && (best.r2 < 0.0 || bb.r2 < best.r2)) best = bb;
        }
        if (best.r2 >= 0.0) return best;
        return ball_of_3(a, b, c);
    }
    // Cramer solve for the center in the (r1, r2v, r3) frame.
    const Vec3 cx = cross(r2v, r3), cy = cross(r3, r1), cz = cross(r1, r2v);
    const Vec3 center = (k1 / det) * cx + (k2 / det) * cy + (k3 / det) * cz;
    const double rr = std::max({distance2(a, center), distance2(b, center),
                                distance2(c, center), distance2(d, center)});
    return {center, rr};
}

inline Ball ball_of_support(std::span<const Vec3> r) {
    switch (r.size()) {
        case 0: return {};
        case 1: return ball_of_1(r[0]);
        case 2: return ball_of_2(r[0], r[1]);
        case 3: return ball_of_3(r[0], r[1], r[2]);
        default: return ball_of_4(r[0], r[1], r[2], r[3]);
    }
}

inline Ball welzl(std::vector<Vec3>& pts, std::size_t n, std::vector<Vec3>& support) {
    if (n == 0 || support.size() == 4) return ball_of_support(support);
    const Vec3 p = pts[n - 1];
    Ball b = welzl(pts, n - 1, support);
    if (b.contains(p)) return b;
    support.push_back(p);
    b = welzl(pts, n - 1, support);
    support.pop_back();
    return b;
}

}  // namespace detail

/// Exact minimum enclosing ball of the direction points, center projected
/// back onto the unit sphere. For directions within an open hemisphere the
/// projected center is the angular 1-center. Deterministic: the internal
/// shuffle uses a fixed seed.
inline EnclosingCap min_enclosing_cap(std::span<const Vec3> unit_dirs) {
    if (unit_dirs.empty()) throw config_error("min_enclosing_cap: empty direction set");
    std::vector<Vec3> pts(unit_dirs.begin(), unit_dirs.end());
    auto rng = make_rng(0x1CE2B0A7D15CULL);
    for (std::size_t i = pts.size() - 1; i > 0; --i)
        std::swap(pts[i], pts[uniform_index(rng, i + 1)]);

    std::vector<Vec3> support;
    support.reserve(4);
    detail::Ball ball = detail::welzl(pts, pts.size(), support);

    Vec3 center = ball.c;
    if (norm(center) < 1e-12) center = unit_dirs[0];  // degenerate, all dirs ~antipodal pairs
    center = normalized(center);

    double worst = 0.0;
    for (const auto& d : unit_dirs) worst = std::max(worst, angle_between_rad(center, d));
    return {center, rad_to_deg(worst)};
}

}  // namespace beamcover
