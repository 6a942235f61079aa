#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "beamcover/linkbudget.hpp"
#include "beamcover/solvers.hpp"
#include "oracles.hpp"

using namespace beamcover;
using Catch::Approx;

namespace {

const SatelliteConfig kSat{};       // 550 km, alpha_max 3.2, g_max 50
const LinkBudgetConfig kLink{};     // 20 GHz, 0 dBi rx, -120 dBW noise, rolloff 12

}  // namespace

TEST_CASE("beam gain pattern anchor points") {
    REQUIRE(beam_gain_dbi(0.0, kSat, kLink) == 50.0);
    // Half the HPBW off boresight is the half-power point.
    REQUIRE(beam_gain_dbi(1.6, kSat, kLink) == Approx(47.0).margin(1e-12));
    REQUIRE(beam_gain_dbi(3.2, kSat, kLink) == Approx(38.0).margin(1e-12));
    // Far off boresight the pattern floors at g_max - 30.
    REQUIRE(beam_gain_dbi(60.0, kSat, kLink) == Approx(20.0).margin(1e-12));
    REQUIRE_THROWS_AS(beam_gain_dbi(-0.1, kSat, kLink), config_error);
}

TEST_CASE("free-space path loss matches the canonical dB form") {
    // 92.45 + 20 log10(f_GHz) + 20 log10(d_km), evaluated independently.
    const double alt = 92.45 + 20.0 * std::log10(20.0) + 20.0 * std::log10(550.0);
    REQUIRE(fspl_db(550.0, 20.0) == Approx(alt).margin(5e-3));
    REQUIRE(fspl_db(550.0, 20.0) == Approx(173.28).margin(0.01));
    REQUIRE(fspl_db(1.0, 1.0) == Approx(92.45).margin(0.01));
}

TEST_CASE("doubling the distance adds exactly 6.02 dB") {
    const double add = fspl_db(1100.0, 20.0) - fspl_db(550.0, 20.0);
    REQUIRE(add == Approx(20.0 * std::log10(2.0)).margin(1e-12));
}

TEST_CASE("fspl rejects non-positive input") {
    REQUIRE_THROWS_AS(fspl_db(0.0, 20.0), config_error);
    REQUIRE_THROWS_AS(fspl_db(550.0, 0.0), config_error);
}

TEST_CASE("scgnr of a boresight-centered singleton beam is the closed form") {
    const UserSet users({make_user(0, 0.0, 0.0)});
    Beam beam;
    beam.members = {0};
    beam.boresight = normalized(users[0].ecef - kSat.position());
    const double expected = 50.0 + 0.0 - fspl_db(550.0, 20.0) - (-120.0);
    REQUIRE(scgnr_db(users[0], beam, kSat, kLink) == Approx(expected).margin(1e-9));
}

TEST_CASE("moving to the half-power edge costs exactly 3 dB") {
    const UserSet users({make_user(0, 0.0, 0.0)});
    const Vec3 on_axis = normalized(users[0].ecef - kSat.position());
    Beam centered;
    centered.members = {0};
    centered.boresight = on_axis;

    // Tilt the boresight by alpha_max/2 away from the user.
    const double tilt = deg_to_rad(kSat.alpha_max_deg / 2.0);
    const Vec3 axis = normalized(cross(on_axis, Vec3{0.0, 0.0, 1.0}));
    const Vec3 tilted = normalized(std::cos(tilt) * on_axis + std::sin(tilt) * axis);
    Beam edge = centered;
    edge.boresight = tilted;

    const double drop = scgnr_db(users[0], centered, kSat, kLink) - scgnr_db(users[0], edge, kSat, kLink);
    REQUIRE(drop == Approx(3.0).margin(1e-6));
}

TEST_CASE("users symmetric about the boresight get equal scgnr") {
    const UserSet users({make_user(0, 0.0, -0.4), make_user(1, 0.0, 0.4)});
    Beam beam;
    beam.members = {0, 1};
    beam.boresight = boresight(beam.members, users, kSat);
    const double s0 = scgnr_db(users[0], beam, kSat, kLink);
    const double s1 = scgnr_db(users[1], beam, kSat, kLink);
    REQUIRE(s0 == Approx(s1).margin(1e-9));
}

TEST_CASE("scgnr input validation") {
    const UserSet users({make_user(0, 0.0, 0.0), make_user(1, 0.5, 0.5)});
    Beam beam;
    beam.members = {0};
    beam.boresight = normalized(users[0].ecef - kSat.position());
    REQUIRE_THROWS_AS(scgnr_db(users[1], beam, kSat, kLink), config_error);
    beam.boresight.reset();
    REQUIRE_THROWS_AS(scgnr_db(users[0], beam, kSat, kLink), error);
}

TEST_CASE("evaluate reports load gaps by definition") {
    // Three tight groups, far enough apart to force three distinct beams.
    std::vector<GroundUser> raw;
    int id = 0;
    const double centers[3] = {-3.0, 0.0, 3.0};
    for (double c : centers)
        for (int i = 0; i < 4; ++i) raw.push_back(make_user(id++, 0.001 * i, c));
    const UserSet users(raw);
    BeamSolution sol;
    sol.source = "manual";
    for (int b = 0; b < 3; ++b) {
        Beam beam;
        for (int i = 0; i < 4; ++i) beam.members.push_back(4 * b + i);
        sol.beams.push_back(beam);
    }
    sol.nab = 3;
    attach_boresights(sol, users, kSat);
    const MetricsReport even = evaluate(sol, users, kSat, kLink);
    REQUIRE(even.nab == 3);
    REQUIRE(even.load_gap == 0);

    // Loads [7, 2] over two groups.
    std::vector<GroundUser> raw2;
    for (int i = 0; i < 7; ++i) raw2.push_back(make_user(i, 0.001 * i, -3.0));
    for (int i = 0; i < 2; ++i) raw2.push_back(make_user(7 + i, 0.001 * i, 3.0));
    const UserSet users2(raw2);
    BeamSolution sol2;
    sol2.beams.push_back(Beam{{0, 1, 2, 3, 4, 5, 6}, std::nullopt});
    sol2.beams.push_back(Beam{{7, 8}, std::nullopt});
    sol2.nab = 2;
    attach_boresights(sol2, users2, kSat);
    REQUIRE(evaluate(sol2, users2, kSat, kLink).load_gap == 5);
}

TEST_CASE("load gap is zero for a single beam") {
    const UserSet users = oracles::random_instance(6, 0.04, 2);
    const VisibilityGraph g = build_graph(users, kSat);
    const BeamSolution sol = solve_instance(Algo::greedy, users, kSat, g, SolverParams{});
    const MetricsReport rep = evaluate(sol, users, kSat, kLink, &g);
    REQUIRE(rep.nab == 1);
    REQUIRE(rep.load_gap == 0);
}

TEST_CASE("per-user scgnr matches an independent recomputation") {
    const UserSet users = oracles::random_instance(50, 1.0, 8);
    const VisibilityGraph g = build_graph(users, kSat);
    SolverParams params;
    params.seed = 8;
    const BeamSolution sol = solve_instance(Algo::bkmeans, users, kSat, g, params);
    const MetricsReport rep = evaluate(sol, users, kSat, kLink, &g);
    REQUIRE(rep.nab == sol.nab);

    // Second pass, computed from scratch.
    const Vec3 sp = kSat.position();
    for (const auto& beam : sol.beams) {
        for (int m : beam.members) {
            const Vec3 dir = users[m].ecef - sp;
            const double theta = rad_to_deg(angle_between_rad(*beam.boresight, dir));
            const double gain = 50.0 - 12.0 * (theta / 3.2) * (theta / 3.2);
            const double loss = 20.0 * std::log10(4.0 * kPi * norm(dir) * 20.0 * 1e9 / 299792.458);
            const double expected = gain + 0.0 - loss + 120.0;
            REQUIRE(rep.scgnr_db[m] == Approx(expected).margin(1e-9));
        }
    }
}

TEST_CASE("served users stay within 3 dB of their beam peak") {
    const UserSet users = oracles::random_instance(80, 0.8, 15);
    const VisibilityGraph g = build_graph(users, kSat);
    SolverParams params;
    params.seed = 15;
    for (const Algo algo : {Algo::greedy, Algo::bkmeans}) {
        const BeamSolution sol = solve_instance(algo, users, kSat, g, params);
        for (const auto& beam : sol.beams) {
            for (int m : beam.members) {
                const double user_gain = beam_gain_dbi(
                    rad_to_deg(angle_between_rad(*beam.boresight, users[m].ecef - kSat.position())),
                    kSat, kLink);
                REQUIRE(user_gain >= 50.0 - 3.0 - 1e-9);
            }
        }
    }
}

TEST_CASE("raising the noise floor shifts every scgnr and nothing else") {
    const UserSet users = oracles::random_instance(40, 1.5, 4);
    const VisibilityGraph g = build_graph(users, kSat);
    const BeamSolution sol = solve_instance(Algo::greedy, users, kSat, g, SolverParams{});
    LinkBudgetConfig louder = kLink;
    louder.noise_dbw += 7.5;
    const MetricsReport base = evaluate(sol, users, kSat, kLink, &g);
    const MetricsReport shifted = evaluate(sol, users, kSat, louder, &g);
    REQUIRE(shifted.nab == base.nab);
    REQUIRE(shifted.load_gap == base.load_gap);
    for (std::size_t i = 0; i < base.scgnr_db.size(); ++i)
        REQUIRE(shifted.scgnr_db[i] == Approx(base.scgnr_db[i] - 7.5).margin(1e-12));
}

TEST_CASE("evaluate rejects invalid solutions") {
    const UserSet users = oracles::random_instance(10, 0.6, 3);
    const VisibilityGraph g = build_graph(users, kSat);
    BeamSolution sol = solve_instance(Algo::greedy, users, kSat, g, SolverParams{});
    sol.beams.pop_back();  // drop a beam: some user is now unserved
    sol.nab = static_cast<int>(sol.beams.size());
    REQUIRE_THROWS_AS(evaluate(sol, users, kSat, kLink, &g), error);
    REQUIRE_THROWS_AS(evaluate(sol, users, kSat, kLink), error);  // shape check catches it too
}

TEST_CASE("empirical cdf steps") {
    const std::vector<double> one{5.0};
    const auto c1 = empirical_cdf(one);
    REQUIRE(c1.size() == 1);
    REQUIRE(c1[0].first == 5.0);
    REQUIRE(c1[0].second == 1.0);

    const std::vector<double> four{4.0, 2.0, 3.0, 1.0};
    const auto c4 = empirical_cdf(four);
    REQUIRE(c4.size() == 4);
    for (int i = 0; i < 4; ++i) {
        REQUIRE(c4[i].first == double(i + 1));
        REQUIRE(c4[i].second == Approx(0.25 * (i + 1)));
    }

    // Ties share the higher step.
    const std::vector<double> tied{2.0, 2.0, 3.0};
    const auto ct = empirical_cdf(tied);
    REQUIRE(ct.size() == 2);
    REQUIRE(ct[0].first == 2.0);
    REQUIRE(ct[0].second == Approx(2.0 / 3.0));
    REQUIRE(ct[1].second == 1.0);

    REQUIRE_THROWS_AS(empirical_cdf(std::vector<double>{}), config_error);
}

TEST_CASE("empirical cdf of uniform samples passes a KS check") {
    auto rng = make_rng(99);
    std::vector<double> samples(1000);
    for (auto& s : samples) s = uniform01(rng);
    REQUIRE(oracles::ks_distance_uniform(samples) < 0.06);

    // And the library's own CDF evaluates to the same staircase.
    const auto cdf = empirical_cdf(samples);
    REQUIRE(cdf.back().second == 1.0);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        REQUIRE(cdf[i].first > cdf[i - 1].first);
        REQUIRE(cdf[i].second > cdf[i - 1].second);
    }
}

TEST_CASE("link config validation names the field") {
    LinkBudgetConfig bad = kLink;
    bad.frequency_ghz = 0.0;
    REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("frequency_ghz"));
    bad = kLink;
    bad.rolloff_coeff = -1.0;
    REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("rolloff_coeff"));
}
