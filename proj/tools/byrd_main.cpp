#include "byrd/config.hpp"
#include "byrd/engine.hpp"
#include "byrd/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace fs = std::filesystem;
using namespace byrd;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::uint64_t* seed_override, bool verbose) {
    ConfigFile cf;
    try {
        cf = parse_config_file(config_path);
        if (seed_override) {
            cf.run.seed = *seed_override;
            cf.run.validate();
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    try {
        fs::create_directories(out_dir);
        RunResult res = run_training(cf.run);
        write_metrics_csv(out_dir + "/metrics.csv", res.reports);
        write_summary(out_dir + "/summary.txt", res.summary);
        if (verbose)
            for (const RoundReport& r : res.reports)
                std::fprintf(stderr, "k=%ld train_loss=%.6f test_loss=%.6f acc=%.4f\n",
                             r.k, r.train_loss, r.test_loss, r.test_acc);
        std::printf("best_acc=%.6f final_acc=%.6f final_loss=%.6f (%.1fs)\n",
                    res.summary.best_acc, res.summary.final_acc,
                    res.summary.final_loss, res.summary.wall_time_sec);
        return 0;
    } catch (const EngineError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 2;
    }
}

int cmd_grid(const std::string& config_path, const std::string& out_dir, int jobs,
             const std::uint64_t* seed_override) {
    ConfigFile cf;
    std::vector<RunConfig> cells;
    try {
        cf = parse_config_file(config_path);
        if (seed_override) cf.run.seed = *seed_override;
        cells = expand_grid(cf.run, cf.grid);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    try {
        fs::create_directories(out_dir + "/cells");
        for (const RunConfig& c : cells)
            fs::create_directories(out_dir + "/cells/" + cell_name(c));

        const auto summaries = run_matrix(cells, jobs, [&](std::size_t i,
                                                           const RunResult& res) {
            const std::string dir = out_dir + "/cells/" + cell_name(cells[i]);
            if (res.summary.error.empty())
                write_metrics_csv(dir + "/metrics.csv", res.reports);
            write_summary(dir + "/summary.txt", res.summary);
            std::printf("[%zu/%zu] %s %s\n", i + 1, cells.size(),
                        cell_name(cells[i]).c_str(),
                        res.summary.error.empty() ? "done"
                                                  : res.summary.error.c_str());
            std::fflush(stdout);
        });

        std::ofstream table(out_dir + "/table.csv", std::ios::binary);
        table << "rule,attack,eps,optimizer,best_acc,final_loss\n";
        bool any_failed = false;
        char buf[160];
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const RunConfig& c = cells[i];
            const RunSummary& s = summaries[i];
            if (!s.error.empty()) any_failed = true;
            std::snprintf(buf, sizeof(buf), "%s,%s,%g,%s,%.10g,%.10g\n",
                          rule_name(c.rule.kind), attack_name(c.attack.kind),
                          c.byz_ratio, optimizer_name(c.optimizer),
                          s.error.empty() ? s.best_acc
                                          : std::numeric_limits<double>::quiet_NaN(),
                          s.error.empty() ? s.final_loss
                                          : std::numeric_limits<double>::quiet_NaN());
            table << buf;
        }
        return any_failed ? 2 : 0;
    } catch (const std::exception& e) {
        std::cerr << "grid failed: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const std::string& suite) {
    std::vector<SuiteResult> results;
    try {
        results = run_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "verify error: " << e.what() << "\n";
        return 1;
    }
    bool all_ok = true;
    for (const SuiteResult& sr : results) {
        for (const CheckResult& c : sr.checks) {
            std::printf("[%s] %-32s %s  %s\n", sr.suite.c_str(), c.name.c_str(),
                        c.passed ? "PASS" : "FAIL", c.detail.c_str());
            if (!c.passed) all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-resilient Nesterov-accelerated federated learning "
                 "simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite = "all";
    int jobs = 1;
    std::uint64_t seed = 0;
    bool have_seed = false, verbose = false;

    CLI::App* run = app.add_subcommand("run", "execute one training run");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_flag("--verbose", verbose, "print metric rows to stderr");

    CLI::App* grid = app.add_subcommand("grid", "execute a config's [grid] matrix");
    grid->add_option("--config", config_path, "config file")->required();
    grid->add_option("--out", out_dir, "output directory");
    grid->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
    grid->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });

    CLI::App* verify = app.add_subcommand("verify", "run invariant self-checks");
    verify->add_option("suite", suite,
                       "all|gradients|nesterov|aggregation|attacks|resilience|theorem");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(config_path, out_dir, have_seed ? &seed : nullptr, verbose);
    if (grid->parsed())
        return cmd_grid(config_path, out_dir, jobs, have_seed ? &seed : nullptr);
    return cmd_verify(suite);
}
