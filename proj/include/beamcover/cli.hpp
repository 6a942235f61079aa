#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "beamcover/errors.hpp"
#include "beamcover/linkbudget.hpp"
#include "beamcover/scenario.hpp"
#include "beamcover/solution_io.hpp"
#include "beamcover/solvers.hpp"
#include "beamcover/version.hpp"

namespace beamcover::cli {

namespace fs = std::filesystem;

// Exit codes, stable and documented: 0 success, 1 unexpected failure,
// 2 config error, 3 I/O error, 4 exact-solver limit (vertex cap or budget).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitSolverLimit = 4;

struct InstanceRecord {
    std::string instance_id;
    std::string solver;
    int n = 0;
    double runtime_ms = 0.0;
    int nab = 0;
    int load_gap = 0;
    double mean_scgnr_db = 0.0;
    double min_scgnr_db = 0.0;
};

/// Run metadata written next to the data files. Runtimes live here, never
/// in the data CSVs, so identical runs reproduce identical data files.
struct RunManifest {
    std::string tool_version = kVersion;
    std::string command_line;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> outputs;  // file names relative to the out dir
    std::vector<InstanceRecord> records;
    nlohmann::json trends;  // compare only; null otherwise
};

inline std::string config_hash(const ScenarioConfig& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), h, 16);
    return "fnv1a64:" + std::string(buf, res.ptr);
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    auto records = nlohmann::json::array();
    for (const auto& r : m.records)
        records.push_back({{"instance_id", r.instance_id},
                           {"solver", r.solver},
                           {"n", r.n},
                           {"runtime_ms", r.runtime_ms},
                           {"nab", r.nab},
                           {"load_gap", r.load_gap},
                           {"mean_scgnr_db", r.mean_scgnr_db},
                           {"min_scgnr_db", r.min_scgnr_db}});
    return nlohmann::json{{"tool_version", m.tool_version},
                          {"command_line", m.command_line},
                          {"seed", m.seed},
                          {"config_hash", m.config_hash},
                          {"outputs", m.outputs},
                          {"records", std::move(records)},
                          {"trends", m.trends}};
}

/// Writes manifest.json, first checking that every referenced output
/// actually exists in out_dir.
inline void save_manifest(const RunManifest& m, const fs::path& out_dir) {
    for (const auto& name : m.outputs)
        if (!fs::exists(out_dir / name))
            throw io_error("manifest references missing output " + name);
    std::ofstream out(out_dir / "manifest.json");
    if (!out) throw io_error("cannot write " + (out_dir / "manifest.json").string());
    out << manifest_to_json(m).dump(2) << "\n";
    if (!out) throw io_error("failed while writing manifest.json");
}

inline constexpr const char* kMetricsHeader = "instance_id,solver,n,nab,load_gap,mean_scgnr_db,min_scgnr_db";

inline std::string metrics_row(const InstanceRecord& r) {
    return r.instance_id + "," + r.solver + "," + std::to_string(r.n) + "," + std::to_string(r.nab) +
           "," + std::to_string(r.load_gap) + "," + detail::format_double(r.mean_scgnr_db) + "," +
           detail::format_double(r.min_scgnr_db);
}

namespace detail_cli {

inline int guard(std::ostream& err, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const config_error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const io_error& e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const size_cap_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolverLimit;
    } catch (const budget_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolverLimit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw io_error("cannot create output directory " + dir.string() +
                       (ec ? ": " + ec.message() : std::string{}));
}

inline std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw io_error("cannot write " + p.string());
    return out;
}

inline std::string instance_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "instance_%04d.csv", idx);
    return buf;
}

}  // namespace detail_cli

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

/// Writes `count` seeded instances (user CSVs) plus the run manifest.
/// Instance i uses seed XOR i.
inline int cmd_generate(const fs::path& config_path, int count, const fs::path& out_dir,
                        std::optional<std::uint64_t> seed_override, const std::string& command_line,
                        std::ostream& /*out*/, std::ostream& err) {
    return detail_cli::guard(err, [&] {
        ScenarioConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (count < 1) throw config_error("count must be >= 1");
        detail_cli::ensure_dir(out_dir);

        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = cfg.seed;
        manifest.config_hash = config_hash(cfg);
        for (int i = 0; i < count; ++i) {
            const UserSet users = generate(cfg, instance_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const std::string name = detail_cli::instance_name(i);
            save_users_csv(users, out_dir / name);
            manifest.outputs.push_back(name);
        }
        save_manifest(manifest, out_dir);
    });
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

/// Solves one instance file with one algorithm; writes the solution JSON
/// and a one-row metrics CSV, and prints NAB on standard output.
inline int cmd_solve(const fs::path& config_path, const fs::path& instance_path,
                     const std::string& algo_name_str, const fs::path& out_dir,
                     std::optional<std::uint64_t> seed_override, int exact_cap, bool per_user,
                     const std::string& command_line, std::ostream& out, std::ostream& err) {
    return detail_cli::guard(err, [&] {
        ScenarioConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        const Algo algo = parse_algo(algo_name_str);
        if (exact_cap < 1) throw config_error("exact-cap must be >= 1");

        const UserSet users = load_users_csv(instance_path);
        const VisibilityGraph g = build_graph(users, cfg.satellite, cfg.distance_model);

        SolverParams params = cfg.solver;
        params.seed = cfg.seed;
        ExactOptions exact_opts;
        exact_opts.vertex_cap = exact_cap;

        const auto t0 = std::chrono::steady_clock::now();
        BeamSolution sol = solve_instance(algo, users, cfg.satellite, g, params, exact_opts);
        const auto t1 = std::chrono::steady_clock::now();
        sol.instance_id = instance_path.stem().string();

        validate_solution(sol, g, users, cfg.satellite);
        const MetricsReport rep = evaluate(sol, users, cfg.satellite, cfg.link, &g);

        detail_cli::ensure_dir(out_dir);
        const std::string stem = sol.instance_id + "_" + algo_name_str;

        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = cfg.seed;
        manifest.config_hash = config_hash(cfg);

        save_solution(sol, out_dir / (stem + ".solution.json"));
        manifest.outputs.push_back(stem + ".solution.json");

        InstanceRecord rec{sol.instance_id,
                           algo_name_str,
                           static_cast<int>(users.size()),
                           std::chrono::duration<double, std::milli>(t1 - t0).count(),
                           rep.nab,
                           rep.load_gap,
                           rep.mean_scgnr_db,
                           rep.min_scgnr_db};
        {
            auto os = detail_cli::open_out(out_dir / (stem + ".metrics.csv"));
            os << kMetricsHeader << "\n" << metrics_row(rec) << "\n";
        }
        manifest.outputs.push_back(stem + ".metrics.csv");

        if (per_user) {
            auto os = detail_cli::open_out(out_dir / (stem + ".users.csv"));
            os << "user_id,scgnr_db\n";
            for (std::size_t i = 0; i < rep.scgnr_db.size(); ++i)
                os << i << "," << beamcover::detail::format_double(rep.scgnr_db[i]) << "\n";
            manifest.outputs.push_back(stem + ".users.csv");
        }

        manifest.records.push_back(std::move(rec));
        save_manifest(manifest, out_dir);
        out << rep.nab << "\n";
    });
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

namespace detail_cli {

struct CompareTask {
    int idx = 0;  // global instance index, drives the derived seed
    int size = 0;
    int trial = 0;
};

struct TaskOutput {
    std::vector<InstanceRecord> records;  // one per algorithm
    std::exception_ptr error;
};

/// Mean of a projected field over records matching (size, algo).
template <typename Proj>
inline double mean_over(const std::vector<InstanceRecord>& recs, int size, const std::string& algo,
                        Proj proj) {
    double total = 0.0;
    int count = 0;
    for (const auto& r : recs)
        if (r.n == size && r.solver == algo) {
            total += proj(r);
            ++count;
        }
    return count > 0 ? total / count : 0.0;
}

}  // namespace detail_cli

/// Monte Carlo grid: for every (size, trial) generates one instance and
/// runs every requested algorithm on it. Emits per-trial rows
/// (trials.csv), a per-size summary (summary.csv, also echoed to standard
/// output), per-algo CDFs of the per-instance mean and min SCGNR, and the
/// manifest with runtimes and trend analysis. Rows are written in a fixed
/// order and flushed as they complete, whatever --jobs is.
inline int cmd_compare(const fs::path& config_path, int trials, std::vector<int> sizes,
                       std::vector<std::string> algo_names, int jobs, const fs::path& out_dir,
                       std::optional<std::uint64_t> seed_override, int exact_cap,
                       const std::string& command_line, std::ostream& out, std::ostream& err) {
    return detail_cli::guard(err, [&] {
        ScenarioConfig cfg = load_config(config_path);
        if (seed_override) cfg.seed = *seed_override;
        if (trials < 1) throw config_error("trials must be >= 1");
        if (sizes.empty()) throw config_error("sizes must be nonempty");
        for (int s : sizes)
            if (s < 1) throw config_error("sizes entries must be >= 1");
        if (algo_names.empty()) throw config_error("algos must be nonempty");
        std::vector<Algo> algos;
        for (const auto& a : algo_names) algos.push_back(parse_algo(a));
        if (exact_cap < 1) throw config_error("exact-cap must be >= 1");
        if (jobs < 1) jobs = 1;

        detail_cli::ensure_dir(out_dir);

        std::vector<detail_cli::CompareTask> tasks;
        for (std::size_t si = 0; si < sizes.size(); ++si)
            for (int t = 0; t < trials; ++t)
                tasks.push_back({static_cast<int>(tasks.size()), sizes[si], t});

        ExactOptions exact_opts;
        exact_opts.vertex_cap = exact_cap;

        auto run_task = [&](const detail_cli::CompareTask& task) {
            detail_cli::TaskOutput output;
            try {
                ScenarioConfig inst_cfg = cfg;
                inst_cfg.n_users = task.size;
                const std::uint64_t iseed = instance_seed(cfg.seed, static_cast<std::uint64_t>(task.idx));
                const UserSet users = generate(inst_cfg, iseed);
                const VisibilityGraph g = build_graph(users, cfg.satellite, cfg.distance_model);
                const std::string instance_id =
                    "n" + std::to_string(task.size) + "_t" + std::to_string(task.trial);

                for (std::size_t ai = 0; ai < algos.size(); ++ai) {
                    SolverParams params = cfg.solver;
                    params.seed = iseed;
                    const auto t0 = std::chrono::steady_clock::now();
                    BeamSolution sol =
                        solve_instance(algos[ai], users, cfg.satellite, g, params, exact_opts);
                    const auto t1 = std::chrono::steady_clock::now();
                    sol.instance_id = instance_id;
                    const MetricsReport rep = evaluate(sol, users, cfg.satellite, cfg.link, &g);
                    output.records.push_back(
                        {instance_id, algo_names[ai], task.size,
                         std::chrono::duration<double, std::milli>(t1 - t0).count(), rep.nab,
                         rep.load_gap, rep.mean_scgnr_db, rep.min_scgnr_db});
                }
            } catch (...) {
                output.error = std::current_exception();
            }
            return output;
        };

        std::vector<detail_cli::TaskOutput> results(tasks.size());
        auto trials_csv = detail_cli::open_out(out_dir / "trials.csv");
        trials_csv << kMetricsHeader << "\n";
        std::vector<InstanceRecord> all_records;

        if (jobs == 1) {
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                results[i] = run_task(tasks[i]);
                if (results[i].error) std::rethrow_exception(results[i].error);
                for (const auto& r : results[i].records) {
                    trials_csv << metrics_row(r) << "\n";
                    all_records.push_back(r);
                }
                trials_csv.flush();
            }
        } else {
            std::atomic<std::size_t> next{0};
            std::mutex mu;
            std::condition_variable cv;
            std::vector<char> done(tasks.size(), 0);
            auto worker = [&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) break;
                    detail_cli::TaskOutput r = run_task(tasks[i]);
                    {
                        std::lock_guard<std::mutex> lk(mu);
                        results[i] = std::move(r);
                        done[i] = 1;
                    }
                    cv.notify_all();
                }
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);

            std::exception_ptr first_error;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                {
                    std::unique_lock<std::mutex> lk(mu);
                    cv.wait(lk, [&] { return done[i] != 0; });
                }
                if (results[i].error) {
                    first_error = results[i].error;
                    break;
                }
                for (const auto& r : results[i].records) {
                    trials_csv << metrics_row(r) << "\n";
                    all_records.push_back(r);
                }
                trials_csv.flush();
            }
            for (auto& th : pool) th.join();
            if (first_error) std::rethrow_exception(first_error);
        }
        trials_csv.close();

        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = cfg.seed;
        manifest.config_hash = config_hash(cfg);
        manifest.outputs.push_back("trials.csv");
        manifest.records = all_records;

        // Per-size summary.
        const std::string summary_header =
            "size,algo,trials,mean_nab,mean_load_gap,mean_scgnr_db,mean_min_scgnr_db";
        std::string summary_text = summary_header + "\n";
        for (int size : sizes) {
            for (const auto& algo : algo_names) {
                const double m_nab = detail_cli::mean_over(all_records, size, algo,
                                                           [](const auto& r) { return double(r.nab); });
                const double m_gap = detail_cli::mean_over(
                    all_records, size, algo, [](const auto& r) { return double(r.load_gap); });
                const double m_mean = detail_cli::mean_over(
                    all_records, size, algo, [](const auto& r) { return r.mean_scgnr_db; });
                const double m_min = detail_cli::mean_over(all_records, size, algo,
                                                           [](const auto& r) { return r.min_scgnr_db; });
                summary_text += std::to_string(size) + "," + algo + "," + std::to_string(trials) + "," +
                                beamcover::detail::format_double(m_nab) + "," +
                                beamcover::detail::format_double(m_gap) + "," +
                                beamcover::detail::format_double(m_mean) + "," +
                                beamcover::detail::format_double(m_min) + "\n";
            }
        }
        {
            auto os = detail_cli::open_out(out_dir / "summary.csv");
            os << summary_text;
        }
        manifest.outputs.push_back("summary.csv");
        out << summary_text;

        // Per-(algo, size) CDFs of the per-instance mean and min SCGNR.
        for (const auto& algo : algo_names) {
            for (int size : sizes) {
                std::vector<double> means, mins;
                for (const auto& r : all_records)
                    if (r.n == size && r.solver == algo) {
                        means.push_back(r.mean_scgnr_db);
                        mins.push_back(r.min_scgnr_db);
                    }
                const auto write_cdf = [&](const std::string& name, const std::vector<double>& vals) {
                    auto os = detail_cli::open_out(out_dir / name);
                    os << "value_db,probability\n";
                    for (const auto& [v, p] : empirical_cdf(vals))
                        os << beamcover::detail::format_double(v) << ","
                           << beamcover::detail::format_double(p) << "\n";
                    manifest.outputs.push_back(name);
                };
                write_cdf("cdf_mean_scgnr_" + algo + "_n" + std::to_string(size) + ".csv", means);
                write_cdf("cdf_min_scgnr_" + algo + "_n" + std::to_string(size) + ".csv", mins);
            }
        }

        // Trend report: directional comparisons between the two heuristics,
        // plus the link-model parameters they are sensitive to.
        const bool have_pair =
            std::find(algo_names.begin(), algo_names.end(), "greedy") != algo_names.end() &&
            std::find(algo_names.begin(), algo_names.end(), "bkmeans") != algo_names.end();
        if (have_pair) {
            nlohmann::json per_size = nlohmann::json::array();
            nlohmann::json notes = nlohmann::json::array();
            bool nab_ok = true, gap_ok = true, scgnr_mean_ok = true, scgnr_min_ok = true;
            for (int size : sizes) {
                const auto mg = [&](auto proj) { return detail_cli::mean_over(all_records, size, "greedy", proj); };
                const auto mb = [&](auto proj) { return detail_cli::mean_over(all_records, size, "bkmeans", proj); };
                const double nab_g = mg([](const auto& r) { return double(r.nab); });
                const double nab_b = mb([](const auto& r) { return double(r.nab); });
                const double gap_g = mg([](const auto& r) { return double(r.load_gap); });
                const double gap_b = mb([](const auto& r) { return double(r.load_gap); });
                const double sm_g = mg([](const auto& r) { return r.mean_scgnr_db; });
                const double sm_b = mb([](const auto& r) { return r.mean_scgnr_db; });
                const double sn_g = mg([](const auto& r) { return r.min_scgnr_db; });
                const double sn_b = mb([](const auto& r) { return r.min_scgnr_db; });
                per_size.push_back({{"size", size},
                                    {"mean_nab", {{"greedy", nab_g}, {"bkmeans", nab_b}}},
                                    {"mean_load_gap", {{"greedy", gap_g}, {"bkmeans", gap_b}}},
                                    {"mean_scgnr_db", {{"greedy", sm_g}, {"bkmeans", sm_b}}},
                                    {"mean_min_scgnr_db", {{"greedy", sn_g}, {"bkmeans", sn_b}}}});
                if (nab_g > nab_b) {
                    nab_ok = false;
                    notes.push_back("mean nab: greedy > bkmeans at size " + std::to_string(size));
                }
                if (gap_b > gap_g) {
                    gap_ok = false;
                    notes.push_back("mean load_gap: bkmeans > greedy at size " + std::to_string(size));
                }
                if (sm_b < sm_g) {
                    scgnr_mean_ok = false;
                    notes.push_back("mean scgnr: bkmeans < greedy at size " + std::to_string(size));
                }
                if (sn_b < sn_g) {
                    scgnr_min_ok = false;
                    notes.push_back("mean min scgnr: bkmeans < greedy at size " + std::to_string(size));
                }
            }
            manifest.trends = {
                {"per_size", std::move(per_size)},
                {"comparisons",
                 {{"nab_greedy_le_bkmeans", nab_ok},
                  {"load_gap_bkmeans_le_greedy", gap_ok},
                  {"scgnr_mean_bkmeans_ge_greedy", scgnr_mean_ok},
                  {"scgnr_min_bkmeans_ge_greedy", scgnr_min_ok}}},
                {"sensitivity_parameters",
                 {{"frequency_ghz", cfg.link.frequency_ghz},
                  {"rx_gain_dbi", cfg.link.rx_gain_dbi},
                  {"noise_dbw", cfg.link.noise_dbw},
                  {"rolloff_coeff", cfg.link.rolloff_coeff},
                  {"alpha_max_deg", cfg.satellite.alpha_max_deg},
                  {"g_max_dbi", cfg.satellite.g_max_dbi},
                  {"region_radius_deg", cfg.region.radius_deg},
                  {"distance_model", pair_distance_name(cfg.distance_model)}}},
                {"notes", std::move(notes)}};
        }

        save_manifest(manifest, out_dir);
    });
}

}  // namespace beamcover::cli
