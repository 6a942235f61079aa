#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "beamcover/geometry.hpp"
#include "beamcover/rng.hpp"
#include "oracles.hpp"

using namespace beamcover;
using Catch::Approx;

namespace {

SatelliteConfig default_sat() { return SatelliteConfig{}; }  // 550 km, nadir at (0, 0)

}  // namespace

TEST_CASE("ground users sit exactly on the Earth sphere") {
    auto rng = make_rng(11);
    for (int i = 0; i < 200; ++i) {
        const double lat = -90.0 + 180.0 * uniform01(rng);
        const double lon = -179.0 + 359.0 * uniform01(rng);
        const GroundUser u = make_user(0, lat, lon);
        REQUIRE(norm(u.ecef) == Approx(kEarthRadiusKm).epsilon(1e-9));
    }
}

TEST_CASE("user set requires contiguous ids from zero") {
    std::vector<GroundUser> ok{make_user(0, 1, 2), make_user(1, 3, 4)};
    REQUIRE_NOTHROW(UserSet(ok));
    std::vector<GroundUser> dup{make_user(0, 1, 2), make_user(0, 3, 4)};
    REQUIRE_THROWS_AS(UserSet(dup), config_error);
    std::vector<GroundUser> gap{make_user(1, 1, 2)};
    REQUIRE_THROWS_AS(UserSet(gap), config_error);
}

TEST_CASE("satellite config validation") {
    SatelliteConfig sat = default_sat();
    REQUIRE_NOTHROW(sat.validate());
    sat.altitude_km = 0.0;
    REQUIRE_THROWS_AS(sat.validate(), config_error);
    sat = default_sat();
    sat.alpha_max_deg = 180.0;
    REQUIRE_THROWS_AS(sat.validate(), config_error);
    sat = default_sat();
    sat.g_max_dbi = std::numeric_limits<double>::infinity();
    REQUIRE_THROWS_AS(sat.validate(), config_error);
}

TEST_CASE("slant range: nadir user sees exactly the altitude") {
    const GroundUser u = make_user(0, 0.0, 0.0);
    REQUIRE(slant_range_km(u, default_sat()) == Approx(550.0).margin(1e-9));
}

TEST_CASE("slant range: antipodal user lies a full diameter plus altitude away") {
    const GroundUser u = make_user(0, 0.0, 180.0);
    REQUIRE(slant_range_km(u, default_sat()) == Approx(2.0 * kEarthRadiusKm + 550.0).margin(1e-6));
}

TEST_CASE("slant range: 5 degree offset matches an independent ECEF oracle") {
    const GroundUser u = make_user(0, 5.0, 0.0);
    // Oracle: build both ECEF vectors from scratch and take the norm.
    const double lat = 5.0 * kPi / 180.0;
    const double sx = kEarthRadiusKm + 550.0;
    const double ux = kEarthRadiusKm * std::cos(lat);
    const double uz = kEarthRadiusKm * std::sin(lat);
    const double expected = std::sqrt((sx - ux) * (sx - ux) + uz * uz);
    REQUIRE(slant_range_km(u, default_sat()) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("slant range is minimized at the sub-satellite point") {
    const SatelliteConfig sat = default_sat();
    const double nadir = slant_range_km(make_user(0, 0.0, 0.0), sat);
    for (double lat = -10.0; lat <= 10.0; lat += 1.0)
        for (double lon = -10.0; lon <= 10.0; lon += 1.0) {
            const double s = slant_range_km(make_user(0, lat, lon), sat);
            REQUIRE(s >= nadir - 1e-12);
            REQUIRE(s >= sat.altitude_km);
        }
}

TEST_CASE("chord distance basics") {
    const GroundUser a = make_user(0, 12.5, 33.25);
    REQUIRE(chord_distance_km(a, a) == 0.0);

    const GroundUser north = make_user(0, 90.0, 0.0);
    const GroundUser south = make_user(1, -90.0, 0.0);
    REQUIRE(chord_distance_km(north, south) == Approx(2.0 * kEarthRadiusKm).epsilon(1e-12));

    // One degree apart on the equator: closed-form chord 2 R sin(0.5 deg).
    const GroundUser e0 = make_user(0, 0.0, 10.0);
    const GroundUser e1 = make_user(1, 0.0, 11.0);
    const double expected = 2.0 * kEarthRadiusKm * std::sin(0.5 * kPi / 180.0);
    REQUIRE(chord_distance_km(e0, e1) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("great circle distance dominates the chord") {
    auto rng = make_rng(5);
    for (int i = 0; i < 100; ++i) {
        const GroundUser a = make_user(0, -80.0 + 160.0 * uniform01(rng), -179.0 + 358.0 * uniform01(rng));
        const GroundUser b = make_user(1, -80.0 + 160.0 * uniform01(rng), -179.0 + 358.0 * uniform01(rng));
        REQUIRE(great_circle_distance_km(a, b) >= chord_distance_km(a, b) - 1e-9);
    }
}

TEST_CASE("angular separation of a user with itself is zero") {
    const GroundUser u = make_user(0, 3.0, -2.0);
    REQUIRE(angular_separation_deg(u, u, default_sat()) == 0.0);
}

TEST_CASE("angular separation is exactly symmetric") {
    const SatelliteConfig sat = default_sat();
    auto rng = make_rng(17);
    for (int i = 0; i < 500; ++i) {
        const GroundUser a = make_user(0, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const GroundUser b = make_user(1, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        REQUIRE(angular_separation_deg(a, b, sat) == angular_separation_deg(b, a, sat));
    }
}

TEST_CASE("law-of-cosines separation agrees with the dot-product oracle") {
    const SatelliteConfig sat = default_sat();
    auto rng = make_rng(23);
    for (int i = 0; i < 10000; ++i) {
        const GroundUser a = make_user(0, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const GroundUser b = make_user(1, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const double lib_rad = angular_separation_deg(a, b, sat) * kPi / 180.0;
        const double oracle_rad = oracles::dot_product_separation_rad(a, b, sat);
        REQUIRE(std::abs(lib_rad - oracle_rad) < 1e-9);
    }
}

TEST_CASE("separation hits alpha_max/2 on a pair placed at the beam edge") {
    SatelliteConfig sat = default_sat();
    // Bisect the symmetric offset until the dot-product oracle reads
    // exactly half of the default 3.2 degree HPBW.
    const double target_rad = 1.6 * kPi / 180.0;
    double lo = 0.01, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const GroundUser a = make_user(0, 0.0, -mid);
        const GroundUser b = make_user(1, 0.0, mid);
        (oracles::dot_product_separation_rad(a, b, sat) < target_rad ? lo : hi) = mid;
    }
    const GroundUser a = make_user(0, 0.0, -lo);
    const GroundUser b = make_user(1, 0.0, lo);
    const double sep = angular_separation_deg(a, b, sat);
    REQUIRE(sep == Approx(1.6).margin(1e-9));
}

TEST_CASE("separation obeys the triangle inequality on the view sphere") {
    const SatelliteConfig sat = default_sat();
    auto rng = make_rng(31);
    for (int i = 0; i < 2000; ++i) {
        const GroundUser a = make_user(0, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const GroundUser b = make_user(1, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const GroundUser c = make_user(2, -8.0 + 16.0 * uniform01(rng), -8.0 + 16.0 * uniform01(rng));
        const double ab = angular_separation_deg(a, b, sat);
        const double bc = angular_separation_deg(b, c, sat);
        const double ac = angular_separation_deg(a, c, sat);
        REQUIRE(ac <= ab + bc + 1e-6);
    }
}

TEST_CASE("great-circle distance model stays close to chord for small separations") {
    SatelliteConfig sat = default_sat();
    const GroundUser a = make_user(0, 0.1, -0.1);
    const GroundUser b = make_user(1, -0.15, 0.2);
    const double chord = angular_separation_deg(a, b, sat, PairDistance::chord);
    const double gc = angular_separation_deg(a, b, sat, PairDistance::great_circle);
    REQUIRE(gc == Approx(chord).epsilon(1e-5));
    REQUIRE(gc >= chord);  // longer side, wider angle
}

TEST_CASE("coordinate validation rejects out-of-range input") {
    REQUIRE_THROWS_AS(make_user(0, 91.0, 0.0), config_error);
    REQUIRE_THROWS_AS(make_user(0, 0.0, -180.0), config_error);
    REQUIRE_THROWS_AS(make_user(0, 0.0, 181.0), config_error);
}
