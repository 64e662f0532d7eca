#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dyadnet/cli/tasks.hpp"

namespace {

struct Common {
    std::string config;
    dyadnet::cli::Overrides overrides;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.overrides.out, "output directory (overrides 'output')");
    sub->add_option("--seed", c.overrides.seed, "root seed (overrides 'seed')");
    sub->add_option("--threads", c.overrides.threads, "worker threads (overrides 'threads')");
    sub->add_option("--slack", c.overrides.slack, "verdict slack in standard errors (overrides 'bounds.slack')");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic dyadic network formation with fixed effects: simulation, moment bounds and conditional logit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dyadnet::cli::kToolVersion));

    Common common;
    std::string report_dir;
    const char* tasks[] = {"simulate", "bounds", "idset", "clogit", "verify-all"};
    const char* help[] = {"simulate a panel and write it with its covariates",
                          "evaluate every configured restriction family at theta0",
                          "screen a theta grid against the restriction menu",
                          "build the conditional-logit sample and fit theta",
                          "check every family at the truth and fit the conditional logit"};
    for (int k = 0; k < 5; ++k) add_common(app.add_subcommand(tasks[k], help[k]), common);
    auto* rep = app.add_subcommand("report", "summarise an existing results directory into plot-ready tables");
    rep->add_option("--out", report_dir, "results directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rep->parsed()) {
            for (const auto& f : dyadnet::cli::report(report_dir, std::cout)) std::cout << "wrote " << f << "\n";
            return 0;
        }
        const std::string task = app.get_subcommands().front()->get_name();
        auto rc = dyadnet::cli::load_run_config(common.config);
        dyadnet::cli::check_task(rc, task);
        dyadnet::cli::apply(rc, common.overrides);
        const int status = dyadnet::cli::run_task(rc, task, std::cout);
        std::cout << "results in " << std::filesystem::absolute(rc.output).string() << "\n";
        if (status != 0) std::cerr << "error: at least one asserted check failed\n";
        return status;
    } catch (const dyadnet::ConfigError& e) {
        std::cerr << common.config << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
