#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nilab/scenario.hpp"

#ifndef NILAB_DEFAULT_SCENARIO_DIR
#define NILAB_DEFAULT_SCENARIO_DIR ""
#endif

int main(int argc, char** argv) {
    CLI::App app{"nilab: a laboratory for finite nilspaces and their dynamics"};
    app.require_subcommand(1);

    nilab::scenario::RunFlags flags;
    flags.scenario_dir = NILAB_DEFAULT_SCENARIO_DIR;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--nmax", flags.nmax,
                        "default cube dimension bound for verification tasks (-1: step + 1)");
        cmd->add_option("--budget", flags.budget, "work budget in ticks before giving up")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", flags.seed, "seed echoed into machine reports");
        cmd->add_option("--report", flags.report, "output format")
            ->check(CLI::IsMember({"text", "machine"}));
        cmd->add_option("--paranoid", flags.paranoid,
                        "re-verify every constructed space up to this cube dimension");
        cmd->add_flag("--timings", flags.timings,
                      "include elapsed milliseconds (not deterministic)");
        cmd->add_option("--scenario-dir", flags.scenario_dir, "directory with scenario documents");
    };

    std::string file, name;
    CLI::App* run = app.add_subcommand("run", "run a task document from a JSON file");
    run->add_option("file", file, "path to the document")->required();
    add_common(run);

    CLI::App* scen = app.add_subcommand("scenario", "run a bundled scenario by name");
    scen->add_option("name", name, "scenario name")->required();
    add_common(scen);

    CLI::App* list = app.add_subcommand("list-scenarios", "list the bundled scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& n : nilab::scenario::builtin_scenario_names())
                std::cout << n << "\n";
            return 0;
        }
        if (run->parsed()) return nilab::scenario::run_file(file, flags, std::cout);
        return nilab::scenario::run_scenario(name, flags, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
