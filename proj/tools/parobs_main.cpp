#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "parobs/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"time-parallelized Luenberger observer experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment configuration");
    std::string config_path;
    parobs::RunOptions opt;
    std::string out_dir = "out";
    opt.workers = 0;
    run->add_option("config-file", config_path, "experiment configuration file")
        ->required();
    run->add_option("--workers", opt.workers, "worker threads for the fine sweeps");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--efficiency-mode", opt.efficiency_mode,
                    "modeled (default) or measured")
        ->check(CLI::IsMember({"modeled", "measured"}));

    CLI11_PARSE(app, argc, argv);

    parobs::ExperimentConfig cfg;
    try {
        cfg = parobs::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        opt.out_dir = out_dir;
        if (opt.workers <= 0)
            opt.workers = parobs::default_workers(cfg.N);
        opt.workers = std::min(opt.workers, cfg.N);
        const parobs::RunReport report = parobs::run_experiment(cfg, opt);
        std::printf("wrote %zu csv files under %s\n", report.csv_files.size(),
                    opt.out_dir.string().c_str());
    } catch (const parobs::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const parobs::UnknownKey& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
