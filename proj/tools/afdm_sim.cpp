// afdm_sim - command-line front end for the AFDM phase-security campaigns
//
//   afdm_sim run <config> [--seed S] [--trials T] [--out DIR]
//   afdm_sim validate <config>
//   afdm_sim bound-report <config>
//
// Exit codes: 0 ok, 1 runtime failure, 2 configuration error, 3 singular system.

#include "afdm/afdm.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRank = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::optional<std::string> out;
};

afdm::ExperimentConfig load(const std::string& path, const Overrides& ov) {
    afdm::ExperimentConfig cfg = afdm::load_config(path);
    if (ov.seed) cfg.scenario.master_seed = *ov.seed;
    if (ov.trials) cfg.scenario.trials = *ov.trials;
    if (ov.out) cfg.output = *ov.out;
    afdm::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AFDM chirp phase-function security simulator"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config file")->required();
        sub->add_option("--seed", ov.seed, "override the master seed");
        sub->add_option("--trials", ov.trials, "override Monte Carlo frames per point");
        sub->add_option("--out", ov.out, "override the output directory");
    };
    auto* run = app.add_subcommand("run", "execute the configured campaign");
    add_overrides(run);
    auto* check = app.add_subcommand("validate", "check a config without running it");
    add_overrides(check);
    auto* bounds = app.add_subcommand("bound-report", "print analytic mismatch bounds and complexity orders");
    add_overrides(bounds);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const afdm::ExperimentConfig cfg = load(config_path, ov);
        if (check->parsed()) {
            std::cout << config_path << ": ok (" << afdm::to_string(cfg.campaign) << ", hash "
                      << afdm::config_hash(cfg) << ")\n";
        } else if (bounds->parsed()) {
            std::cout << afdm::bound_report(cfg);
        } else {
            for (const auto& path : afdm::run_campaign(cfg, std::cout)) std::cout << "wrote " << path << "\n";
        }
        return kExitOk;
    } catch (const afdm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const afdm::RankError& e) {
        std::cerr << "numerical rank error: " << e.what() << "\n";
        return kExitRank;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
