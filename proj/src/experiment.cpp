#include "brl/experiment.hpp"

#include "brl/constructions.hpp"
#include "brl/io.hpp"
#include "brl/solvers.hpp"
#include "json_detail.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace brl {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::ostringstream out;
    out << "invalid experiment config:";
    for (const auto& p : problems) out << "\n  " << p;
    return out.str();
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

namespace {

struct ConfigProblems {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& what) { list.push_back(path + ": " + what); }
    void raise_if_any() const {
        if (!list.empty()) throw ConfigError(list);
    }
};

std::string resolve(const std::string& base_dir, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

TabularMdp build_mdp(const json& j, const std::string& base_dir, ConfigProblems& problems) {
    if (j.contains("file")) {
        const std::string path = resolve(base_dir, j.at("file").get<std::string>());
        if (!std::filesystem::exists(path)) {
            problems.add("mdp.file", "file does not exist: " + path);
            problems.raise_if_any();
        }
        return load_mdp(path);
    }
    if (!j.contains("generator")) {
        problems.add("mdp", "need either 'file' or 'generator'");
        problems.raise_if_any();
    }
    const json& g = j.at("generator");
    const std::string type = g.value("type", "");
    if (type == "random") {
        return random_mdp(g.at("num_states").get<int>(), g.at("num_actions").get<int>(),
                          g.at("gamma").get<double>(), g.value("seed", std::uint64_t{0}),
                          g.value("r_max", 1.0));
    }
    if (type == "chain") {
        return chain_mdp(g.at("length").get<int>(), g.at("gamma").get<double>()).first;
    }
    if (type == "lowrank") {
        return random_lowrank_mdp(g.at("num_states").get<int>(), g.at("num_actions").get<int>(),
                                  g.at("k").get<int>(), g.value("seed", std::uint64_t{0}),
                                  g.value("gamma", 0.9), g.value("r_max", 1.0))
            .second;
    }
    problems.add("mdp.generator.type", "unknown generator '" + type + "'");
    problems.raise_if_any();
    throw std::logic_error("unreachable");
}

DataDistribution build_mu(const json& j, const TabularMdp& mdp, const std::string& base_dir,
                          ConfigProblems& problems) {
    const std::string type = j.value("type", "uniform");
    if (type == "uniform") return DataDistribution::uniform(mdp.num_states(), mdp.num_actions());
    if (type == "occupancy") {
        DeterministicPolicy pi;
        pi.action = j.at("policy").get<std::vector<int>>();
        return DataDistribution::from_occupancy(mdp, pi);
    }
    if (type == "file") {
        const std::string path = resolve(base_dir, j.at("path").get<std::string>());
        if (!std::filesystem::exists(path)) {
            problems.add("mu.path", "file does not exist: " + path);
            problems.raise_if_any();
        }
        return DataDistribution(detail::table_from_json(detail::load_json_file(path)));
    }
    problems.add("mu.type", "unknown type '" + type + "'");
    problems.raise_if_any();
    throw std::logic_error("unreachable");
}

QClass build_q_class(const json& j, const TabularMdp& mdp, const std::string& base_dir) {
    if (j.contains("file"))
        return load_q_class(resolve(base_dir, j.at("file").get<std::string>()), mdp);
    return detail::q_class_from_json(j, mdp);
}

WClass build_w_class(const json& j, const TabularMdp& mdp, const DataDistribution& mu,
                     const QClass& q_class, const std::string& base_dir) {
    if (j.contains("file"))
        return load_w_class(resolve(base_dir, j.at("file").get<std::string>()), mdp, &mu);
    if (j.contains("type")) {
        const std::string type = j.at("type").get<std::string>();
        if (type == "importance_weights") {
            std::vector<WeightFunction> members;
            for (const auto& pi : greedy_policies(q_class))
                members.push_back(importance_weight(mdp, pi, mu));
            return WClass(std::move(members));
        }
        if (type == "occupancy_spanner") return build_w_occupancy_spanner(mdp, mu, q_class);
    }
    return detail::w_class_from_json(j, mdp, &mu);
}

ExperimentConfig parse_config(const json& j, const std::string& base_dir) {
    ConfigProblems problems;

    if (!j.contains("mdp")) problems.add("mdp", "required");
    if (!j.contains("q_class")) problems.add("q_class", "required");
    problems.raise_if_any();

    TabularMdp mdp = build_mdp(j.at("mdp"), base_dir, problems);
    DataDistribution mu = j.contains("mu")
                              ? build_mu(j.at("mu"), mdp, base_dir, problems)
                              : DataDistribution::uniform(mdp.num_states(), mdp.num_actions());
    QClass q_class = build_q_class(j.at("q_class"), mdp, base_dir);

    ExperimentConfig cfg{std::move(mdp), std::move(mu), std::move(q_class),
                         std::nullopt,   std::nullopt,  {},
                         0,              {},            0.05,
                         "empirical",    30,            0,
                         20,             "",            "json"};

    if (j.contains("f_class")) cfg.f_class = build_q_class(j.at("f_class"), cfg.mdp, base_dir);
    if (j.contains("w_class"))
        cfg.w_class = build_w_class(j.at("w_class"), cfg.mdp, cfg.mu, cfg.q_class, base_dir);

    cfg.algorithms = j.value("algorithms", std::vector<std::string>{});
    if (cfg.algorithms.empty()) problems.add("algorithms", "at least one of fqi, msbo, mabo required");
    for (const auto& alg : cfg.algorithms) {
        if (alg != "fqi" && alg != "msbo" && alg != "mabo")
            problems.add("algorithms", "unknown algorithm '" + alg + "'");
        if (alg == "msbo" && !cfg.f_class) problems.add("f_class", "required by msbo");
        if (alg == "mabo" && !cfg.w_class) problems.add("w_class", "required by mabo");
    }

    cfg.n = j.value("n", 0);
    if (cfg.n < 1) problems.add("n", "must be at least 1");
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    if (cfg.seeds.empty()) problems.add("seeds", "need at least one seed");
    cfg.delta = j.value("delta", 0.05);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) problems.add("delta", "must be in (0,1)");
    cfg.mode = j.value("mode", "empirical");
    if (cfg.mode != "empirical" && cfg.mode != "population")
        problems.add("mode", "must be 'empirical' or 'population'");
    if (j.contains("fqi")) {
        cfg.fqi_iterations = j.at("fqi").value("iterations", 30);
        cfg.fqi_init_index = j.at("fqi").value("init_index", 0);
        if (cfg.fqi_iterations < 1) problems.add("fqi.iterations", "must be at least 1");
        if (cfg.fqi_init_index < 0 || cfg.fqi_init_index >= cfg.q_class.size())
            problems.add("fqi.init_index", "out of range for the q class");
    }
    cfg.t_max = j.value("t_max", 20);
    if (cfg.t_max < 0) problems.add("t_max", "must be nonnegative");
    if (j.contains("output")) {
        cfg.output_path = j.at("output").value("path", "");
        cfg.output_format = j.at("output").value("format", "json");
        if (cfg.output_format != "json" && cfg.output_format != "csv")
            problems.add("output.format", "must be 'json' or 'csv'");
    }

    problems.raise_if_any();
    return cfg;
}

} // namespace

ExperimentConfig parse_experiment_config_file(const std::string& path) {
    const json j = detail::load_json_file(path);
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

ExperimentConfig parse_experiment_config_string(const std::string& text,
                                                const std::string& base_dir) {
    return parse_config(json::parse(text), base_dir);
}

BoundReport instance_diagnostics(const ExperimentConfig& config) {
    BoundReport r;
    r.mode = config.mode;
    r.n = config.n;
    r.delta = config.delta;
    r.gamma = config.mdp.gamma();
    r.v_max = config.mdp.v_max();
    r.q_size = config.q_class.size();
    r.f_size = config.f_class ? config.f_class->size() : 0;
    r.w_size = config.w_class ? config.w_class->size() : 0;

    r.c_eff = c_eff(config.mdp, config.mu, config.q_class);
    r.c_inf = c_inf(config.mdp, config.mu, config.q_class);
    const auto policies = greedy_policies(config.q_class);
    r.per_step = per_step_coefficients(config.mdp, config.mu, policies, config.t_max);
    r.c_ps = per_step_combined(r.per_step, default_beta(config.mdp.gamma(), config.t_max));
    r.eps_q_sq = eps_q_sq(config.mdp, config.mu, config.q_class);

    if (config.f_class) {
        r.eps_qf_sq = eps_qf_sq(config.mdp, config.mu, config.q_class, *config.f_class);
        r.msbo_bound_rhs = msbo_bound_rhs(r.c_eff, r.eps_q_sq, r.eps_qf_sq, r.v_max, r.gamma, r.n,
                                          r.delta, r.q_size, r.f_size);
    }
    if (config.w_class) {
        const auto cw = c_w_coefficients(*config.w_class, config.mu);
        r.c_eff_w = cw.first;
        r.c_inf_w = cw.second;
        r.eps_q_avg = eps_q_avg(config.mdp, config.mu, config.q_class, *config.w_class);
        r.eps_w = eps_w(config.mdp, config.mu, config.q_class, *config.w_class);
        r.eps_stat = config.mode == "population"
                         ? 0.0
                         : eps_stat(r.c_eff_w, r.c_inf_w, r.v_max, r.n, r.delta, r.q_size, r.w_size);
        r.mabo_bound_rhs = mabo_bound_rhs(r.eps_q_avg, r.eps_w, r.eps_stat, r.gamma);
    }
    return r;
}

namespace {

class ReportSink {
public:
    ReportSink(const std::string& path, const std::string& format) : format_(format) {
        if (path.empty()) return;
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        if (format_ == "csv") out_ << bound_report_csv_header() << '\n';
        else out_ << "[\n";
    }
    void push(const BoundReport& r) {
        if (!out_.is_open()) return;
        if (format_ == "csv") {
            out_ << bound_report_csv_row(r) << '\n';
        } else {
            if (count_) out_ << ",\n";
            out_ << bound_report_to_json_string(r);
        }
        out_.flush();
        ++count_;
    }
    ~ReportSink() {
        if (out_.is_open() && format_ == "json") out_ << "\n]\n";
    }

private:
    std::string format_;
    std::ofstream out_;
    int count_ = 0;
};

} // namespace

std::vector<BoundReport> run_experiment(const ExperimentConfig& config) {
    const BoundReport shared = instance_diagnostics(config);
    ReportSink sink(config.output_path, config.output_format);

    std::vector<BoundReport> reports;
    for (const std::uint64_t seed : config.seeds) {
        BatchDataset data;
        LossContext loss = LossContext::population(config.mdp, config.mu);
        if (config.mode == "empirical") {
            data = generate_batch(config.mdp, config.mu, config.n, seed);
            loss = LossContext::empirical(data, config.mdp.gamma());
        }
        for (const auto& alg : config.algorithms) {
            SolverResult result;
            if (alg == "fqi")
                result = fqi(loss, config.q_class, config.fqi_iterations, config.fqi_init_index);
            else if (alg == "msbo")
                result = msbo(loss, config.q_class, *config.f_class);
            else
                result = mabo(loss, config.q_class, *config.w_class);

            BoundReport r = shared;
            r.algorithm = alg;
            r.seed = seed;
            r.chosen_index = result.chosen_index;
            r.objective_value = result.objective_value;
            r.suboptimality = suboptimality(config.mdp, config.q_class, result.chosen_q);
            sink.push(r);
            reports.push_back(std::move(r));
        }
    }
    return reports;
}

void write_reports_json(const std::vector<BoundReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) out << ",\n";
        out << bound_report_to_json_string(reports[i]);
    }
    out << "\n]\n";
}

void write_reports_csv(const std::vector<BoundReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << bound_report_csv_header() << '\n';
    for (const auto& r : reports) out << bound_report_csv_row(r) << '\n';
}

} // namespace brl
