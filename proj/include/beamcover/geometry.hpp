#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "beamcover/errors.hpp"
#include "beamcover/vec3.hpp"

namespace beamcover {

/// Spherical Earth model. Degrees at every interface, radians internally.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Unit vector for a (lat, lon) point on the sphere.
inline Vec3 latlon_to_unit(double lat_deg, double lon_deg) {
    const double lat = deg_to_rad(lat_deg);
    const double lon = deg_to_rad(lon_deg);
    const double cl = std::cos(lat);
    return {cl * std::cos(lon), cl * std::sin(lon), std::sin(lat)};
}

/// Inverse of latlon_to_unit: lat in [-90, 90], lon in (-180, 180].
inline std::pair<double, double> unit_to_latlon(const Vec3& u) {
    double lat = rad_to_deg(std::asin(std::clamp(u.z, -1.0, 1.0)));
    double lon = rad_to_deg(std::atan2(u.y, u.x));
    if (lon <= -180.0) lon = 180.0;
    return {lat, lon};
}

/// Central angle between two surface points in degrees (atan2 form, stable
/// for both tiny and near-antipodal separations).
inline double central_angle_deg(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg) {
    const Vec3 a = latlon_to_unit(lat1_deg, lon1_deg);
    const Vec3 b = latlon_to_unit(lat2_deg, lon2_deg);
    return rad_to_deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

/// A ground terminal pinned to the Earth sphere.
struct GroundUser {
    int id = 0;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    Vec3 ecef;  // km, |ecef| == kEarthRadiusKm
};

/// Builds a user with its ECEF position derived from (lat, lon). This is
/// the only construction path, so positions are reproducible from the
/// coordinates alone (CSV round-trips bit-exactly).
inline GroundUser make_user(int id, double lat_deg, double lon_deg) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
        throw config_error("user lat out of range [-90, 90]: " + std::to_string(lat_deg));
    if (!(lon_deg > -180.0 && lon_deg <= 180.0))
        throw config_error("user lon out of range (-180, 180]: " + std::to_string(lon_deg));
    GroundUser u;
    u.id = id;
    u.lat_deg = lat_deg;
    u.lon_deg = lon_deg;
    u.ecef = kEarthRadiusKm * latlon_to_unit(lat_deg, lon_deg);
    return u;
}

/// Immutable user collection; ids are unique and contiguous from 0, with
/// users[i].id == i.
class UserSet {
public:
    UserSet() = default;

    explicit UserSet(std::vector<GroundUser> users) : users_(std::move(users)) {
        for (std::size_t i = 0; i < users_.size(); ++i) {
            if (users_[i].id != static_cast<int>(i))
                throw config_error("user ids must be contiguous from 0; position " +
                                   std::to_string(i) + " has id " + std::to_string(users_[i].id));
        }
    }

    std::size_t size() const { return users_.size(); }
    bool empty() const { return users_.empty(); }
    const GroundUser& operator[](std::size_t i) const { return users_[i]; }
    const std::vector<GroundUser>& users() const { return users_; }
    auto begin() const { return users_.begin(); }
    auto end() const { return users_.end(); }

private:
    std::vector<GroundUser> users_;
};

/// Static satellite above a fixed sub-satellite point. No orbital motion;
/// every instance is a single snapshot.
struct SatelliteConfig {
    double altitude_km = 550.0;
    double sub_lat_deg = 0.0;
    double sub_lon_deg = 0.0;
    double alpha_max_deg = 3.2;  // HPBW: full width between the -3 dB points
    double g_max_dbi = 50.0;     // peak beam gain

    void validate() const {
        if (!(altitude_km > 0.0))
            throw config_error("satellite.altitude_km must be > 0");
        if (!(sub_lat_deg >= -90.0 && sub_lat_deg <= 90.0))
            throw config_error("satellite.sub_lat_deg out of range [-90, 90]");
        if (!(sub_lon_deg > -180.0 && sub_lon_deg <= 180.0))
            throw config_error("satellite.sub_lon_deg out of range (-180, 180]");
        if (!(alpha_max_deg > 0.0 && alpha_max_deg < 180.0))
            throw config_error("satellite.alpha_max_deg must be in (0, 180)");
        if (!std::isfinite(g_max_dbi))
            throw config_error("satellite.g_max_dbi must be finite");
    }

    /// Satellite ECEF position: radius R_E + altitude above the sub-satellite point.
    Vec3 position() const {
        return (kEarthRadiusKm + altitude_km) * latlon_to_unit(sub_lat_deg, sub_lon_deg);
    }

    /// Maximum central angle (degrees) from the sub-satellite point at which
    /// the satellite is still on the user's horizon.
    double horizon_central_angle_deg() const {
        return rad_to_deg(std::acos(kEarthRadiusKm / (kEarthRadiusKm + altitude_km)));
    }

    friend bool operator==(const SatelliteConfig&, const SatelliteConfig&) = default;
};

/// Straight-line satellite-to-user distance in km. Always >= altitude.
inline double slant_range_km(const GroundUser& user, const SatelliteConfig& sat) {
    return distance(sat.position(), user.ecef);
}

/// 3D chord between two users' ECEF positions, km.
inline double chord_distance_km(const GroundUser& a, const GroundUser& b) {
    return distance(a.ecef, b.ecef);
}

/// Great-circle surface distance, km.
inline double great_circle_distance_km(const GroundUser& a, const GroundUser& b) {
    return kEarthRadiusKm * deg_to_rad(central_angle_deg(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg));
}

/// Which user-to-user distance feeds the angular separation triangle.
/// Chord is the geometrically consistent side for the law of cosines;
/// great_circle exists for sensitivity runs only.
enum class PairDistance { chord, great_circle };

inline const char* pair_distance_name(PairDistance d) {
    return d == PairDistance::chord ? "chord" : "great_circle";
}

namespace detail {

/// Law-of-cosines separation angle at the satellite, from precomputed slant
/// ranges and the squared user-to-user distance. cos(alpha) is clamped into
/// [-1, 1] before acos to absorb floating-point noise. The parenthesization
/// makes the value exactly symmetric under argument swap.
inline double separation_from_triangle_deg(double s1_km, double s2_km, double d2_km2) {
    const double c = (s1_km * s1_km + s2_km * s2_km - d2_km2) / (2.0 * (s1_km * s2_km));
    return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

}  // namespace detail

/// Angular separation of two users as seen from the satellite, degrees in
/// [0, 180]. Symmetric in (a, b); zero when the users coincide.
inline double angular_separation_deg(const GroundUser& a, const GroundUser& b,
                                     const SatelliteConfig& sat,
                                     PairDistance model = PairDistance::chord) {
    const double s1 = slant_range_km(a, sat);
    const double s2 = slant_range_km(b, sat);
    double d;
    if (model == PairDistance::chord) {
        return detail::separation_from_triangle_deg(s1, s2, distance2(a.ecef, b.ecef));
    }
    d = great_circle_distance_km(a, b);
    return detail::separation_from_triangle_deg(s1, s2, d * d);
}

}  // namespace beamcover
