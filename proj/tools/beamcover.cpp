// beamcover: benchmark CLI for LEO beam placement via minimum clique cover.
//
// Subcommands: generate (instance files), solve (one instance, one
// algorithm), compare (Monte Carlo grid over sizes and algorithms).
// Standard output carries data only; diagnostics go to standard error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamcover/cli.hpp"
#include "beamcover/version.hpp"

int main(int argc, char** argv) {
    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }

    CLI::App app{"LEO satellite beam placement: clique-cover solvers and benchmarks"};
    app.set_version_flag("--version", beamcover::kVersion);
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "out";
    std::uint64_t seed_value = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "Experiment config (JSON)")->required();
        sub->add_option("--seed", seed_value, "Override the config seed")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--out", out_dir, "Output directory (default: out)");
    };

    auto* gen = app.add_subcommand("generate", "Write seeded user-set instances");
    int count = 1;
    add_common(gen);
    gen->add_option("--count", count, "Number of instances to generate");

    auto* solve = app.add_subcommand("solve", "Solve one instance with one algorithm");
    std::string instance;
    std::string algo;
    int exact_cap = 20;
    bool per_user = false;
    add_common(solve);
    solve->add_option("--instance", instance, "Instance CSV (id,lat,lon)")->required();
    solve->add_option("--algo", algo, "greedy | bkmeans | exact")->required();
    solve->add_option("--exact-cap", exact_cap, "Vertex cap for the exact solver (default 20)");
    solve->add_flag("--per-user", per_user, "Also write per-user SCGNR CSV");

    auto* compare = app.add_subcommand("compare", "Monte Carlo comparison grid");
    int trials = 30;
    int jobs = 1;
    std::vector<int> sizes{100, 500, 1000, 1500};
    std::vector<std::string> algos{"greedy", "bkmeans"};
    int compare_exact_cap = 20;
    add_common(compare);
    compare->add_option("--trials", trials, "Trials per size (default 30)");
    compare->add_option("--sizes", sizes, "User-set sizes (default 100,500,1000,1500)")->delimiter(',');
    compare->add_option("--algos", algos, "Algorithms to run (default greedy,bkmeans)")->delimiter(',');
    compare->add_option("--jobs", jobs, "Concurrent instances (default 1)");
    compare->add_option("--exact-cap", compare_exact_cap, "Vertex cap for the exact solver (default 20)");

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::uint64_t> seed =
        have_seed ? std::optional<std::uint64_t>(seed_value) : std::nullopt;

    if (gen->parsed())
        return beamcover::cli::cmd_generate(config, count, out_dir, seed, command_line, std::cout,
                                            std::cerr);
    if (solve->parsed())
        return beamcover::cli::cmd_solve(config, instance, algo, out_dir, seed, exact_cap, per_user,
                                         command_line, std::cout, std::cerr);
    return beamcover::cli::cmd_compare(config, trials, sizes, algos, jobs, out_dir, seed,
                                       compare_exact_cap, command_line, std::cout, std::cerr);
}
