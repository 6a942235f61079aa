#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "beamcover/errors.hpp"
#include "beamcover/geometry.hpp"
#include "beamcover/graph.hpp"
#include "beamcover/solvers.hpp"

namespace beamcover {

inline constexpr double kSpeedOfLightKmPerS = 299792.458;

/// Deterministic geometric link model: parabolic-in-dB beam pattern,
/// free-space path loss, fixed terminal gain and noise power. Every
/// constant is configurable; nothing is baked into the metric code.
struct LinkBudgetConfig {
    double frequency_ghz = 20.0;
    double rx_gain_dbi = 0.0;
    double noise_dbw = -120.0;
    double rolloff_coeff = 12.0;  // dB loss at theta == alpha_max

    void validate() const {
        if (!(frequency_ghz > 0.0)) throw config_error("link.frequency_ghz must be > 0");
        if (!(rolloff_coeff > 0.0)) throw config_error("link.rolloff_coeff must be > 0");
        if (!std::isfinite(rx_gain_dbi)) throw config_error("link.rx_gain_dbi must be finite");
        if (!std::isfinite(noise_dbw)) throw config_error("link.noise_dbw must be finite");
    }

    friend bool operator==(const LinkBudgetConfig&, const LinkBudgetConfig&) = default;
};

/// Beam gain at theta degrees off boresight:
///   G(theta) = g_max - rolloff * (theta / alpha_max)^2,
/// floored at g_max - 30 dB. With the default rolloff of 12 the pattern is
/// 3 dB down at theta = alpha_max/2, i.e. the -3 dB points span the HPBW.
inline double beam_gain_dbi(double theta_deg, const SatelliteConfig& sat,
                            const LinkBudgetConfig& cfg) {
    if (theta_deg < 0.0) throw config_error("beam_gain: theta_deg must be >= 0");
    const double ratio = theta_deg / sat.alpha_max_deg;
    return std::max(sat.g_max_dbi - cfg.rolloff_coeff * ratio * ratio, sat.g_max_dbi - 30.0);
}

/// Free-space path loss 20*log10(4*pi*d/lambda) in dB.
inline double fspl_db(double distance_km, double frequency_ghz) {
    if (!(distance_km > 0.0)) throw config_error("fspl: distance_km must be > 0");
    if (!(frequency_ghz > 0.0)) throw config_error("fspl: frequency_ghz must be > 0");
    return 20.0 * std::log10(4.0 * kPi * distance_km * frequency_ghz * 1e9 / kSpeedOfLightKmPerS);
}

/// Per-user statistical channel gain to noise ratio in dB:
///   beam gain at the user's off-boresight angle, plus terminal gain,
///   minus path loss over the slant range, minus noise power.
inline double scgnr_db(const GroundUser& user, const Beam& beam, const SatelliteConfig& sat,
                       const LinkBudgetConfig& cfg) {
    if (std::find(beam.members.begin(), beam.members.end(), user.id) == beam.members.end())
        throw config_error("scgnr: user " + std::to_string(user.id) + " is not served by this beam");
    if (!beam.boresight) throw error("scgnr: beam has no boresight");
    const double theta_deg = rad_to_deg(angle_between_rad(*beam.boresight, user.ecef - sat.position()));
    return beam_gain_dbi(theta_deg, sat, cfg) + cfg.rx_gain_dbi -
           fspl_db(slant_range_km(user, sat), cfg.frequency_ghz) - cfg.noise_dbw;
}

/// The three evaluation metrics for one solved instance.
struct MetricsReport {
    int nab = 0;
    int load_gap = 0;                 // max beam load minus min beam load
    std::vector<double> scgnr_db;     // indexed by user id
    double mean_scgnr_db = 0.0;
    double min_scgnr_db = 0.0;
};

/// Computes NAB, the load-balancing gap and per-user SCGNR for a solution.
/// Pass the instance graph to get full clique validation; without it only
/// cover shape and boresight coverage are checked.
inline MetricsReport evaluate(const BeamSolution& sol, const UserSet& users,
                              const SatelliteConfig& sat, const LinkBudgetConfig& cfg,
                              const VisibilityGraph* g = nullptr) {
    cfg.validate();
    if (g != nullptr)
        validate_solution(sol, *g, users, sat);

    MetricsReport rep;
    rep.scgnr_db.assign(users.size(), 0.0);
    std::vector<char> served(users.size(), 0);

    int max_load = 0;
    int min_load = INT_MAX;
    for (const auto& beam : sol.beams) {
        if (beam.members.empty()) continue;
        ++rep.nab;
        const int load = static_cast<int>(beam.members.size());
        max_load = std::max(max_load, load);
        min_load = std::min(min_load, load);
        for (int m : beam.members) {
            if (m < 0 || m >= static_cast<int>(users.size()))
                throw error("evaluate: member id " + std::to_string(m) + " out of range");
            if (served[m]) throw error("evaluate: user " + std::to_string(m) + " served twice");
            served[m] = 1;
            rep.scgnr_db[m] = scgnr_db(users[m], beam, sat, cfg);
        }
    }
    for (std::size_t i = 0; i < users.size(); ++i)
        if (!served[i]) throw error("evaluate: user " + std::to_string(i) + " is unserved");

    rep.load_gap = rep.nab > 0 ? max_load - min_load : 0;
    double total = 0.0;
    double lowest = rep.scgnr_db.empty() ? 0.0 : rep.scgnr_db.front();
    for (double v : rep.scgnr_db) {
        total += v;
        lowest = std::min(lowest, v);
    }
    rep.mean_scgnr_db = rep.scgnr_db.empty() ? 0.0 : total / static_cast<double>(rep.scgnr_db.size());
    rep.min_scgnr_db = lowest;
    return rep;
}

/// Right-continuous empirical CDF: at the k-th sorted sample the
/// probability is k/n; tied samples share the higher step.
inline std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> samples) {
    if (samples.empty()) throw config_error("empirical_cdf: empty input");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> cdf;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

}  // namespace beamcover
