#include <CLI11.hpp>

#include "../src/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"grafluid - maximum-entropy carrier hydrodynamics toolkit"};
    app.require_subcommand(1);

    grafluid::cli::RunOptions opts;
    std::string command;
    const std::vector<std::string> names = {"tabulate",    "invert",     "regimes",
                                            "solve-hydro", "solve-dd",   "solve-wave",
                                            "solve-collimation", "selftest"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "run configuration file");
        sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", opts.seed, "seed for randomized sampling")
            ->capture_default_str();
        sub->add_option("--threads", opts.threads, "worker threads for cell loops")
            ->capture_default_str();
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return grafluid::cli::exit_usage;
    }
    return grafluid::cli::run_command(command, opts);
}
