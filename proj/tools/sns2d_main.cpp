#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "sns/experiment.hpp"
#include "sns/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sns2d: pseudo-spectral time-integration lab for the stochastic "
                 "2D Navier-Stokes equations on the torus"};
    app.set_version_flag("--version", sns::kVersion);

    std::string config_path;
    std::string output_dir;
    int workers = 0;
    std::uint64_t seed_override = 0;
    bool have_seed_override = false;
    bool dry_run = false;

    app.add_option("--config", config_path, "configuration file (JSON)")->required();
    app.add_option("--output", output_dir, "output directory (overrides the config)");
    app.add_option("--workers", workers, "Monte Carlo worker threads");
    app.add_option("--seed-override", seed_override, "replace the study base seed")
        ->each([&](const std::string&) { have_seed_override = true; });
    app.add_flag("--dry-run", dry_run, "validate the configuration and exit");

    CLI11_PARSE(app, argc, argv);

    sns::ValidationResult v = sns::load_config_file(config_path);
    if (!v.ok()) {
        std::cerr << "configuration invalid (" << v.errors.size() << " problem"
                  << (v.errors.size() == 1 ? "" : "s") << "):\n";
        for (const auto& e : v.errors) std::cerr << "  - " << e << "\n";
        return sns::exit_config_error;
    }
    if (!output_dir.empty()) v.config.output_dir = output_dir;
    if (workers > 0) v.config.workers = workers;
    if (have_seed_override) v.config.base_seed = seed_override;

    if (dry_run) {
        std::cout << "config OK: command=" << sns::command_name(v.config.command)
                  << " output=" << v.config.output_dir << "\n";
        return sns::exit_ok;
    }

    const int code = sns::run_experiment(v.config);
    if (code == sns::exit_ok) {
        std::cout << "wrote " << v.config.output_dir << "/manifest.json\n";
    } else {
        std::cerr << "run failed with exit code " << code << "; see "
                  << v.config.output_dir << "/failed/error.json\n";
    }
    return code;
}
