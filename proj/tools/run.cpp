#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "peacock/errors.hpp"

namespace peacock::cli {

namespace {

struct Shared {
    std::string config;
    std::string out;
    std::string seed;
    std::string paths;
    std::string dt;
    std::string tol;
};

void add_common(CLI::App* sub, Shared& shared) {
    sub->add_option("--config", shared.config, "run configuration file")->required();
    sub->add_option("--out", shared.out, "output directory override");
    sub->add_option("--seed", shared.seed, "embedding seed override");
    sub->add_option("--paths", shared.paths, "embedding path count override");
    sub->add_option("--dt", shared.dt, "embedding step override");
    sub->add_option("--tol", shared.tol, "relative tolerance override");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"mean residual life order toolkit"};
    app.require_subcommand(1);
    Shared shared;
    CLI::App* mrl = app.add_subcommand("mrl", "order verdicts and barycentre curves");
    CLI::App* tp2 = app.add_subcommand("tp2", "minor scans of kernels, grids, families");
    CLI::App* embed = app.add_subcommand("embed", "Brownian barrier embedding run");
    CLI::App* verify = app.add_subcommand("verify", "every check the config requests");
    for (CLI::App* sub : {mrl, tp2, embed, verify}) add_common(sub, shared);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = parse_run_config(shared.config);
        if (!shared.out.empty()) cfg.set("output", "dir", shared.out);
        if (!shared.seed.empty()) cfg.set("embed", "seed", shared.seed);
        if (!shared.paths.empty()) cfg.set("embed", "paths", shared.paths);
        if (!shared.dt.empty()) cfg.set("embed", "dt", shared.dt);
        if (!shared.tol.empty()) cfg.set("tolerances", "relative", shared.tol);

        if (mrl->parsed()) return cmd_mrl(cfg);
        if (tp2->parsed()) return cmd_tp2(cfg);
        if (embed->parsed()) return cmd_embed(cfg);
        return cmd_verify(cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace peacock::cli
