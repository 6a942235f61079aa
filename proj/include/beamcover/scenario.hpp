#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "beamcover/errors.hpp"
#include "beamcover/geometry.hpp"
#include "beamcover/kmeans.hpp"
#include "beamcover/linkbudget.hpp"
#include "beamcover/rng.hpp"

namespace beamcover {

namespace detail {

/// Shortest round-trip decimal representation of a double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw io_error("cannot parse " + what + " from \"" + s + "\"");
    return v;
}

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const std::string& scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw config_error("unknown field \"" + (scope.empty() ? it.key() : scope + "." + it.key()) + "\"");
    }
}

}  // namespace detail

/// Spherical cap on the Earth surface; radius is great-circle arc degrees.
struct CapRegion {
    double center_lat_deg = 0.0;
    double center_lon_deg = 0.0;
    double radius_deg = 8.0;

    friend bool operator==(const CapRegion&, const CapRegion&) = default;
};

struct Hotspot {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double spread_deg = 1.0;  // per-axis standard deviation of the offset
    double weight = 1.0;

    friend bool operator==(const Hotspot&, const Hotspot&) = default;
};

enum class DistributionKind { uniform, hotspots };

/// One experiment: everything needed to generate instances and solve them.
struct ScenarioConfig {
    int n_users = 0;
    std::uint64_t seed = 0;
    CapRegion region;
    DistributionKind distribution = DistributionKind::uniform;
    std::vector<Hotspot> hotspots;
    SatelliteConfig satellite;
    LinkBudgetConfig link;
    SolverParams solver;  // seed field is runtime-derived, not part of the file
    PairDistance distance_model = PairDistance::chord;

    void validate() const {
        if (n_users < 1) throw config_error("n_users must be >= 1");
        if (!(region.center_lat_deg >= -90.0 && region.center_lat_deg <= 90.0))
            throw config_error("region.center_lat_deg out of range [-90, 90]");
        if (!(region.center_lon_deg > -180.0 && region.center_lon_deg <= 180.0))
            throw config_error("region.center_lon_deg out of range (-180, 180]");
        if (!(region.radius_deg > 0.0 && region.radius_deg <= 90.0))
            throw config_error("region.radius_deg must be in (0, 90]");
        satellite.validate();
        link.validate();
        solver.validate();

        // Every user must see the satellite above its horizon.
        const double offset = central_angle_deg(region.center_lat_deg, region.center_lon_deg,
                                                satellite.sub_lat_deg, satellite.sub_lon_deg);
        const double horizon = satellite.horizon_central_angle_deg();
        if (offset + region.radius_deg > horizon)
            throw config_error("region: cap extends " + detail::format_double(offset + region.radius_deg) +
                               " deg from the sub-satellite point, beyond the " +
                               detail::format_double(horizon) + " deg horizon");

        if (distribution == DistributionKind::uniform) {
            if (!hotspots.empty())
                throw config_error("distribution.hotspots given but distribution.type is \"uniform\"");
        } else {
            if (hotspots.empty())
                throw config_error("distribution.hotspots must be nonempty for type \"hotspots\"");
            for (std::size_t i = 0; i < hotspots.size(); ++i) {
                const auto& h = hotspots[i];
                const std::string tag = "distribution.hotspots[" + std::to_string(i) + "]";
                if (!(h.lat_deg >= -90.0 && h.lat_deg <= 90.0))
                    throw config_error(tag + ".lat_deg out of range [-90, 90]");
                if (!(h.lon_deg > -180.0 && h.lon_deg <= 180.0))
                    throw config_error(tag + ".lon_deg out of range (-180, 180]");
                if (!(h.spread_deg > 0.0)) throw config_error(tag + ".spread_deg must be > 0");
                if (!(h.weight > 0.0)) throw config_error(tag + ".weight must be > 0");
                if (central_angle_deg(h.lat_deg, h.lon_deg, region.center_lat_deg, region.center_lon_deg) >
                    region.radius_deg)
                    throw config_error(tag + " center lies outside the region cap");
            }
        }
    }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

struct TangentBasis {
    Vec3 c, e1, e2;
};

inline TangentBasis tangent_basis(double lat_deg, double lon_deg) {
    const Vec3 c = latlon_to_unit(lat_deg, lon_deg);
    const Vec3 ref = std::abs(c.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    const Vec3 e1 = normalized(cross(ref, c));
    const Vec3 e2 = cross(c, e1);
    return {c, e1, e2};
}

inline Vec3 direction_at(const TangentBasis& b, double theta_rad, double phi_rad) {
    const double st = std::sin(theta_rad);
    return std::cos(theta_rad) * b.c + st * std::cos(phi_rad) * b.e1 + st * std::sin(phi_rad) * b.e2;
}

}  // namespace detail

/// Samples cfg.n_users positions i.i.d. from the configured distribution,
/// strictly inside the region cap. Identical (cfg, seed) give identical
/// users. Uniform sampling inverts the CDF in cos(colatitude), so it is
/// area-correct with no clustering toward the cap center.
inline UserSet generate(const ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto rng = make_rng(seed);
    const auto region_basis = detail::tangent_basis(cfg.region.center_lat_deg, cfg.region.center_lon_deg);
    const double theta_max = deg_to_rad(cfg.region.radius_deg);
    const double cos_theta_max = std::cos(theta_max);

    std::vector<detail::TangentBasis> hot_bases;
    std::vector<double> cum_weights;
    if (cfg.distribution == DistributionKind::hotspots) {
        double total = 0.0;
        for (const auto& h : cfg.hotspots) {
            hot_bases.push_back(detail::tangent_basis(h.lat_deg, h.lon_deg));
            total += h.weight;
            cum_weights.push_back(total);
        }
    }

    std::vector<GroundUser> users;
    users.reserve(cfg.n_users);
    for (int i = 0; i < cfg.n_users; ++i) {
        Vec3 dir;
        if (cfg.distribution == DistributionKind::uniform) {
            const double u = uniform01(rng);
            const double v = uniform01(rng);
            const double cos_theta = 1.0 - u * (1.0 - cos_theta_max);
            dir = detail::direction_at(region_basis, std::acos(std::clamp(cos_theta, -1.0, 1.0)),
                                       2.0 * kPi * v);
        } else {
            int attempts = 0;
            while (true) {
                if (++attempts > 100000)
                    throw config_error("distribution.hotspots: rejection sampling failed to land in the region cap");
                const double r = uniform01(rng) * cum_weights.back();
                std::size_t comp = 0;
                while (comp + 1 < cum_weights.size() && cum_weights[comp] <= r) ++comp;
                const double spread = deg_to_rad(cfg.hotspots[comp].spread_deg);
                const double gx = normal01(rng) * spread;
                const double gy = normal01(rng) * spread;
                const Vec3 cand = detail::direction_at(hot_bases[comp], std::hypot(gx, gy), std::atan2(gy, gx));
                if (angle_between_rad(cand, region_basis.c) < theta_max) {
                    dir = cand;
                    break;
                }
            }
        }
        const auto [lat, lon] = unit_to_latlon(dir);
        users.push_back(make_user(i, lat, lon));
    }
    return UserSet(std::move(users));
}

inline UserSet generate(const ScenarioConfig& cfg) { return generate(cfg, cfg.seed); }

/// Seed for the idx-th instance of a batch: the documented scheme is
/// seed XOR instance index.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t idx) { return seed ^ idx; }

// ---------------------------------------------------------------------------
// Config file (JSON).
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json dist{{"type", cfg.distribution == DistributionKind::uniform ? "uniform" : "hotspots"}};
    if (cfg.distribution == DistributionKind::hotspots) {
        auto arr = nlohmann::json::array();
        for (const auto& h : cfg.hotspots)
            arr.push_back({{"lat_deg", h.lat_deg},
                           {"lon_deg", h.lon_deg},
                           {"spread_deg", h.spread_deg},
                           {"weight", h.weight}});
        dist["hotspots"] = std::move(arr);
    }
    return nlohmann::json{
        {"n_users", cfg.n_users},
        {"seed", cfg.seed},
        {"region",
         {{"center_lat_deg", cfg.region.center_lat_deg},
          {"center_lon_deg", cfg.region.center_lon_deg},
          {"radius_deg", cfg.region.radius_deg}}},
        {"distribution", std::move(dist)},
        {"satellite",
         {{"altitude_km", cfg.satellite.altitude_km},
          {"sub_lat_deg", cfg.satellite.sub_lat_deg},
          {"sub_lon_deg", cfg.satellite.sub_lon_deg},
          {"alpha_max_deg", cfg.satellite.alpha_max_deg},
          {"g_max_dbi", cfg.satellite.g_max_dbi}}},
        {"link",
         {{"frequency_ghz", cfg.link.frequency_ghz},
          {"rx_gain_dbi", cfg.link.rx_gain_dbi},
          {"noise_dbw", cfg.link.noise_dbw},
          {"rolloff_coeff", cfg.link.rolloff_coeff}}},
        {"solver", {{"mu", cfg.solver.mu}, {"i_max", cfg.solver.i_max}, {"tol_km", cfg.solver.tol_km}}},
        {"distance_model", pair_distance_name(cfg.distance_model)},
    };
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    try {
        detail::check_keys(j, {"n_users", "seed", "region", "distribution", "satellite", "link",
                               "solver", "distance_model"}, "");
        if (j.contains("n_users")) j.at("n_users").get_to(cfg.n_users);
        if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
        if (j.contains("region")) {
            const auto& r = j.at("region");
            detail::check_keys(r, {"center_lat_deg", "center_lon_deg", "radius_deg"}, "region");
            if (r.contains("center_lat_deg")) r.at("center_lat_deg").get_to(cfg.region.center_lat_deg);
            if (r.contains("center_lon_deg")) r.at("center_lon_deg").get_to(cfg.region.center_lon_deg);
            if (r.contains("radius_deg")) r.at("radius_deg").get_to(cfg.region.radius_deg);
        }
        if (j.contains("distribution")) {
            const auto& d = j.at("distribution");
            detail::check_keys(d, {"type", "hotspots"}, "distribution");
            std::string type = "uniform";
            if (d.contains("type")) d.at("type").get_to(type);
            if (type == "uniform") {
                cfg.distribution = DistributionKind::uniform;
            } else if (type == "hotspots") {
                cfg.distribution = DistributionKind::hotspots;
            } else {
                throw config_error("distribution.type must be \"uniform\" or \"hotspots\", got \"" + type + "\"");
            }
            if (d.contains("hotspots")) {
                for (const auto& hj : d.at("hotspots")) {
                    detail::check_keys(hj, {"lat_deg", "lon_deg", "spread_deg", "weight"},
                                       "distribution.hotspots[]");
                    Hotspot h;
                    if (hj.contains("lat_deg")) hj.at("lat_deg").get_to(h.lat_deg);
                    if (hj.contains("lon_deg")) hj.at("lon_deg").get_to(h.lon_deg);
                    if (hj.contains("spread_deg")) hj.at("spread_deg").get_to(h.spread_deg);
                    if (hj.contains("weight")) hj.at("weight").get_to(h.weight);
                    cfg.hotspots.push_back(h);
                }
            }
        }
        if (j.contains("satellite")) {
            const auto& s = j.at("satellite");
            detail::check_keys(s, {"altitude_km", "sub_lat_deg", "sub_lon_deg", "alpha_max_deg", "g_max_dbi"},
                               "satellite");
            if (s.contains("altitude_km")) s.at("altitude_km").get_to(cfg.satellite.altitude_km);
            if (s.contains("sub_lat_deg")) s.at("sub_lat_deg").get_to(cfg.satellite.sub_lat_deg);
            if (s.contains("sub_lon_deg")) s.at("sub_lon_deg").get_to(cfg.satellite.sub_lon_deg);
            if (s.contains("alpha_max_deg")) s.at("alpha_max_deg").get_to(cfg.satellite.alpha_max_deg);
            if (s.contains("g_max_dbi")) s.at("g_max_dbi").get_to(cfg.satellite.g_max_dbi);
        }
        if (j.contains("link")) {
            const auto& l = j.at("link");
            detail::check_keys(l, {"frequency_ghz", "rx_gain_dbi", "noise_dbw", "rolloff_coeff"}, "link");
            if (l.contains("frequency_ghz")) l.at("frequency_ghz").get_to(cfg.link.frequency_ghz);
            if (l.contains("rx_gain_dbi")) l.at("rx_gain_dbi").get_to(cfg.link.rx_gain_dbi);
            if (l.contains("noise_dbw")) l.at("noise_dbw").get_to(cfg.link.noise_dbw);
            if (l.contains("rolloff_coeff")) l.at("rolloff_coeff").get_to(cfg.link.rolloff_coeff);
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            detail::check_keys(s, {"mu", "i_max", "tol_km"}, "solver");
            if (s.contains("mu")) s.at("mu").get_to(cfg.solver.mu);
            if (s.contains("i_max")) s.at("i_max").get_to(cfg.solver.i_max);
            if (s.contains("tol_km")) s.at("tol_km").get_to(cfg.solver.tol_km);
        }
        if (j.contains("distance_model")) {
            std::string m;
            j.at("distance_model").get_to(m);
            if (m == "chord") {
                cfg.distance_model = PairDistance::chord;
            } else if (m == "great_circle") {
                cfg.distance_model = PairDistance::great_circle;
            } else {
                throw config_error("distance_model must be \"chord\" or \"great_circle\", got \"" + m + "\"");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Loads, structurally checks (unknown fields are rejected by name) and
/// semantically validates one experiment config.
inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config " + path.string() + ": " + e.what());
    }
    ScenarioConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

inline void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write config file " + path.string());
    out << config_to_json(cfg).dump(2) << "\n";
    if (!out) throw io_error("failed while writing config file " + path.string());
}

// ---------------------------------------------------------------------------
// User set CSV: header "id,lat,lon", one row per user. Coordinates are
// written with shortest round-trip precision, so save/load reproduces the
// exact same positions.
// ---------------------------------------------------------------------------

inline void write_users_csv(std::ostream& os, const UserSet& users) {
    os << "id,lat,lon\n";
    for (const auto& u : users)
        os << u.id << "," << detail::format_double(u.lat_deg) << ","
           << detail::format_double(u.lon_deg) << "\n";
}

inline UserSet read_users_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw io_error("users csv: empty stream");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,lat,lon")
        throw io_error("users csv: expected header \"id,lat,lon\", got \"" + line + "\"");
    std::vector<GroundUser> users;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw io_error("users csv line " + std::to_string(lineno) + ": expected \"id,lat,lon\"");
        try {
            const int id = std::stoi(line.substr(0, c1));
            const double lat = detail::parse_double(line.substr(c1 + 1, c2 - c1 - 1), "lat");
            const double lon = detail::parse_double(line.substr(c2 + 1), "lon");
            users.push_back(make_user(id, lat, lon));
        } catch (const io_error&) {
            throw;
        } catch (const std::exception& e) {
            throw io_error("users csv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    try {
        return UserSet(std::move(users));
    } catch (const std::exception& e) {
        throw io_error(std::string("users csv: ") + e.what());
    }
}

inline void save_users_csv(const UserSet& users, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    write_users_csv(out, users);
    if (!out) throw io_error("failed while writing " + path.string());
}

inline UserSet load_users_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open instance file " + path.string());
    return read_users_csv(in);
}

}  // namespace beamcover
