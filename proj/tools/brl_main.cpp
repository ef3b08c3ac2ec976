#include "brl/constructions.hpp"
#include "brl/diagnostics.hpp"
#include "brl/experiment.hpp"
#include "brl/io.hpp"
#include "brl/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

// Exit codes: 0 all checks pass / run complete, 1 check failure, 2 usage or
// config error.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
    std::vector<brl::CheckResult> checks;
    try {
        checks = brl::verify_suite(suite, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    for (const auto& c : checks)
        std::printf("%-28s %s  measured=%.6g %s threshold=%.6g\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.measured, c.comparator.c_str(), c.threshold);
    if (!out.empty()) brl::write_check_report(checks, out);
    return brl::all_passed(checks) ? kExitOk : kExitCheckFailed;
}

int cmd_chain(int length, double gamma, const std::string& out) {
    const auto [mdp, mu] = brl::chain_mdp(length, gamma);
    brl::DeterministicPolicy only;
    only.action.assign(static_cast<std::size_t>(length) + 1, 0);
    const int t_max = length + 3;
    const std::vector<double> per_step = brl::per_step_coefficients(mdp, mu, {only}, t_max);
    const brl::QClass trivial(std::vector<brl::QFunction>{brl::QFunction(mdp.num_states(), 1, 0.0)},
                              0.0);
    const double ce = brl::c_eff(mdp, mu, trivial);
    const double ci = brl::c_inf(mdp, mu, trivial);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "error: cannot open " << out << '\n';
            return kExitUsage;
        }
        os = &file;
    }
    *os << "t,c_t_computed,c_t_formula\n";
    double worst = 0.0;
    for (int t = 0; t <= t_max; ++t) {
        const double computed = per_step[static_cast<std::size_t>(t)];
        const double formula = brl::chain_per_step_formula(length, gamma, t);
        worst = std::max(worst, std::fabs(computed - formula));
        *os << t << ',' << brl::format_double(computed) << ',' << brl::format_double(formula) << '\n';
    }
    *os << "c_eff," << brl::format_double(ce) << ",1\n";
    *os << "c_inf," << brl::format_double(ci) << ",1\n";
    worst = std::max(worst, std::max(std::fabs(ce - 1.0), std::fabs(ci - 1.0)));
    return worst <= 1e-12 ? kExitOk : kExitCheckFailed;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& format_override) {
    brl::ExperimentConfig config = brl::parse_experiment_config_file(config_path);
    if (!out_override.empty()) config.output_path = out_override;
    if (!format_override.empty()) {
        if (format_override != "json" && format_override != "csv") {
            std::cerr << "error: --format must be json or csv\n";
            return kExitUsage;
        }
        config.output_format = format_override;
    }
    const std::vector<brl::BoundReport> reports = brl::run_experiment(config);
    if (config.output_path.empty()) {
        // No output file configured: print the rows.
        std::cout << brl::bound_report_csv_header() << '\n';
        for (const auto& r : reports) std::cout << brl::bound_report_csv_row(r) << '\n';
    }
    return kExitOk;
}

int cmd_fqi_gap(int iterations, std::uint64_t class_seed, const std::string& out) {
    const brl::FqiGapDemo demo = brl::fqi_gap_demo(iterations, class_seed);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) {
            std::cerr << "error: cannot open " << out << '\n';
            return kExitUsage;
        }
        os = &file;
    }
    *os << "iteration,member_index,q_s0,q_s1,bellman_error_sq\n";
    for (const auto& row : demo.rows)
        *os << row.iteration << ',' << row.member_index << ',' << brl::format_double(row.q_s0)
            << ',' << brl::format_double(row.q_s1) << ',' << brl::format_double(row.bellman_sq)
            << '\n';
    *os << "msbo_gap," << brl::format_double(demo.msbo_gap) << ",,,\n";
    *os << "mabo_gap," << brl::format_double(demo.mabo_gap) << ",,,\n";
    *os << "grid_resolution," << brl::format_double(demo.grid_resolution) << ",,,\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch value-function approximation laboratory for tabular MDPs"};
    app.require_subcommand(1);

    std::string suite = "all";
    std::uint64_t seed = 0;
    std::string out;
    auto* verify = app.add_subcommand("verify", "Run a named invariant suite");
    verify->add_option("suite", suite,
                       "one of: all, telescoping, bounds, counterexamples, lowrank, span, rates");
    verify->add_option("--seed", seed, "seed for the randomized corpora");
    verify->add_option("--out", out, "write a JSON check report here");

    int length = 2;
    double gamma = 0.5;
    auto* chain = app.add_subcommand("chain", "Per-step coefficient table of the chain instance");
    chain->add_option("--length", length, "chain length")->check(CLI::PositiveNumber);
    chain->add_option("--gamma", gamma, "discount factor")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    chain->add_option("--out", out, "write the CSV here instead of stdout");

    std::string config_path;
    std::string format;
    auto* run = app.add_subcommand("run", "Run experiments from a JSON config");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out, "override the config's output path");
    run->add_option("--format", format, "override the config's output format (json or csv)");

    int iters = 20;
    std::uint64_t class_seed = brl::kFqiGapClassSeed;
    auto* gap = app.add_subcommand("fqi-gap", "Two-state demo: per-iteration Bellman error");
    gap->add_option("--iters", iters, "iteration count")->check(CLI::PositiveNumber);
    gap->add_option("--seed", class_seed, "grid-class shuffle seed");
    gap->add_option("--out", out, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints its own message; --help lands here with exit code 0.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(suite, seed, out);
        if (chain->parsed()) return cmd_chain(length, gamma, out);
        if (run->parsed()) return cmd_run(config_path, out, format);
        if (gap->parsed()) return cmd_fqi_gap(iters, class_seed, out);
    } catch (const brl::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
