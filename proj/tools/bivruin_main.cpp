// Command-line front end: simulate | wh | transform | validate | reproduce-paper.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bivruin/commands.hpp"
#include "bivruin/version.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, GlobalArgs& args, bool config_required) {
    auto* config =
        cmd->add_option("--config", args.config_path, "experiment config file (JSON)");
    if (config_required) config->required();
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; }, "override the config seed");
    cmd->add_option_function<int>(
        "--workers", [&args](int v) { args.workers = v; },
        "worker threads (0: hardware concurrency)");
    cmd->add_option_function<std::string>(
        "--out", [&args](const std::string& v) { args.out_dir = v; },
        "output directory (beats BIVRUIN_OUT and the config)");
}

int with_config(const GlobalArgs& args, int (*cmd)(const bivruin::ExperimentConfig&)) {
    try {
        bivruin::ExperimentConfig cfg = bivruin::load_config(args.config_path);
        cfg = bivruin::cli::apply_overrides(
            cfg, {args.seed, args.workers, args.out_dir});
        return cmd(cfg);
    } catch (const bivruin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bivariate ruin model toolkit: simulation and transform evaluation"};
    app.set_version_flag("--version", bivruin::kVersion);
    app.require_subcommand(1);

    GlobalArgs sim_args, wh_args, tr_args, rep_args, val_args;

    auto* simulate =
        app.add_subcommand("simulate", "survival / transform estimates by direct simulation");
    add_common(simulate, sim_args, true);

    auto* wh = app.add_subcommand("wh", "estimate the Wiener-Hopf factor samples and curves");
    add_common(wh, wh_args, true);

    auto* transform =
        app.add_subcommand("transform", "evaluate the analytic survival transform on a grid");
    add_common(transform, tr_args, true);

    auto* validate = app.add_subcommand("validate", "run the full validation suite");
    validate->add_option_function<std::uint64_t>(
        "--seed", [&val_args](std::uint64_t v) { val_args.seed = v; }, "suite seed");
    validate->add_option_function<int>(
        "--workers", [&val_args](int v) { val_args.workers = v; }, "worker threads");
    validate->add_option_function<std::string>(
        "--out", [&val_args](const std::string& v) { val_args.out_dir = v; },
        "report directory");

    auto* reproduce = app.add_subcommand(
        "reproduce-paper", "rerun the shipped experiment configs end to end");
    add_common(reproduce, rep_args, false);
    rep_args.config_path = "paper/experiment.json";

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) return with_config(sim_args, bivruin::cli::cmd_simulate);
    if (wh->parsed()) return with_config(wh_args, bivruin::cli::cmd_wh);
    if (transform->parsed()) return with_config(tr_args, bivruin::cli::cmd_transform);
    if (reproduce->parsed()) return with_config(rep_args, bivruin::cli::cmd_reproduce);
    if (validate->parsed()) {
        bivruin::ValidationOptions options;
        if (val_args.seed) options.seed = *val_args.seed;
        if (val_args.workers) options.workers = *val_args.workers;
        std::string dir = "out";
        if (val_args.out_dir) {
            dir = *val_args.out_dir;
        } else if (const char* env = std::getenv("BIVRUIN_OUT"); env && *env) {
            dir = env;
        }
        return bivruin::cli::cmd_validate(options, dir);
    }
    return 0;
}
