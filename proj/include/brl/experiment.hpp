#pragma once

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/diagnostics.hpp"
#include "brl/mdp.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace brl {

/// Config validation failure with one entry per offending field, addressed by
/// its JSON path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// A fully resolved experiment: model, logging distribution, classes, and run
/// parameters. Built from a JSON config file or string; every file the config
/// references is opened during validation.
struct ExperimentConfig {
    TabularMdp mdp;
    DataDistribution mu;
    QClass q_class;
    std::optional<QClass> f_class;
    std::optional<WClass> w_class;
    std::vector<std::string> algorithms; // subset of fqi, msbo, mabo
    int n = 0;
    std::vector<std::uint64_t> seeds;
    double delta = 0.05;
    std::string mode = "empirical"; // or "population"
    int fqi_iterations = 30;
    int fqi_init_index = 0;
    int t_max = 20; // horizon for the per-step coefficient table
    std::string output_path;
    std::string output_format = "json"; // or "csv"
};

ExperimentConfig parse_experiment_config_file(const std::string& path);
ExperimentConfig parse_experiment_config_string(const std::string& text,
                                                const std::string& base_dir = ".");

/// One report per (seed, algorithm), in seed-major order. Rows are appended
/// to the output file as each seed completes, so partial results survive a
/// per-seed failure.
std::vector<BoundReport> run_experiment(const ExperimentConfig& config);

/// Diagnostics shared by every algorithm on this instance (everything in a
/// BoundReport except the solver-dependent fields).
BoundReport instance_diagnostics(const ExperimentConfig& config);

void write_reports_json(const std::vector<BoundReport>& reports, const std::string& path);
void write_reports_csv(const std::vector<BoundReport>& reports, const std::string& path);

} // namespace brl
