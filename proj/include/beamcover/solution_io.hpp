#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "beamcover/errors.hpp"
#include "beamcover/solvers.hpp"

namespace beamcover {

inline nlohmann::json solution_to_json(const BeamSolution& sol) {
    auto beams = nlohmann::json::array();
    for (const auto& b : sol.beams) {
        nlohmann::json jb{{"members", b.members}};
        if (b.boresight)
            jb["boresight"] = {b.boresight->x, b.boresight->y, b.boresight->z};
        else
            jb["boresight"] = nullptr;
        beams.push_back(std::move(jb));
    }
    return nlohmann::json{{"instance_id", sol.instance_id},
                          {"solver", sol.source},
                          {"seed", sol.seed},
                          {"nab", sol.nab},
                          {"beams", std::move(beams)}};
}

inline BeamSolution solution_from_json(const nlohmann::json& j) {
    BeamSolution sol;
    try {
        j.at("instance_id").get_to(sol.instance_id);
        j.at("solver").get_to(sol.source);
        j.at("seed").get_to(sol.seed);
        j.at("nab").get_to(sol.nab);
        for (const auto& jb : j.at("beams")) {
            Beam b;
            jb.at("members").get_to(b.members);
            const auto& bs = jb.at("boresight");
            if (!bs.is_null()) {
                if (!bs.is_array() || bs.size() != 3)
                    throw config_error("solution: boresight must be null or a 3-array");
                b.boresight = Vec3{bs[0].get<double>(), bs[1].get<double>(), bs[2].get<double>()};
            }
            sol.beams.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("solution: ") + e.what());
    }
    return sol;
}

inline void save_solution(const BeamSolution& sol, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << solution_to_json(sol).dump(2) << "\n";
    if (!out) throw io_error("failed while writing " + path.string());
}

inline BeamSolution load_solution(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open solution file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("solution " + path.string() + ": " + e.what());
    }
    return solution_from_json(j);
}

}  // namespace beamcover
