#include "brl/io.hpp"

#include "json_detail.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace brl {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

json table_to_json(const StateActionTable& t) {
    json rows = json::array();
    for (int s = 0; s < t.num_states; ++s) {
        json row = json::array();
        for (int a = 0; a < t.num_actions; ++a) row.push_back(t(s, a));
        rows.push_back(std::move(row));
    }
    return rows;
}

StateActionTable table_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::runtime_error("table: expected a nested array");
    const int s = static_cast<int>(j.size());
    const int a = static_cast<int>(j[0].size());
    StateActionTable t(s, a, 0.0);
    for (int i = 0; i < s; ++i) {
        if (static_cast<int>(j[static_cast<std::size_t>(i)].size()) != a)
            throw std::runtime_error("table: ragged rows");
        for (int k = 0; k < a; ++k)
            t(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
    }
    return t;
}

json mdp_to_json(const TabularMdp& mdp) {
    json j;
    j["num_states"] = mdp.num_states();
    j["num_actions"] = mdp.num_actions();
    j["gamma"] = mdp.gamma();
    j["r_max"] = mdp.r_max();
    json transition = json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        json per_action = json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            json row = json::array();
            for (int sp = 0; sp < mdp.num_states(); ++sp) row.push_back(mdp.p(s, a, sp));
            per_action.push_back(std::move(row));
        }
        transition.push_back(std::move(per_action));
    }
    j["transition"] = std::move(transition);
    json reward = json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        json row = json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) row.push_back(mdp.r(s, a));
        reward.push_back(std::move(row));
    }
    j["reward"] = std::move(reward);
    j["init_dist"] = mdp.init_dist();
    return j;
}

TabularMdp mdp_from_json(const json& j) {
    const int s = j.at("num_states").get<int>();
    const int a = j.at("num_actions").get<int>();
    if (s <= 0 || a <= 0) throw std::runtime_error("mdp: invalid dimensions");
    std::vector<double> transition;
    transition.reserve(static_cast<std::size_t>(s) * a * s);
    const json& tj = j.at("transition");
    if (static_cast<int>(tj.size()) != s) throw std::runtime_error("mdp: transition shape mismatch");
    for (const auto& per_action : tj) {
        if (static_cast<int>(per_action.size()) != a)
            throw std::runtime_error("mdp: transition shape mismatch");
        for (const auto& row : per_action) {
            if (static_cast<int>(row.size()) != s)
                throw std::runtime_error("mdp: transition shape mismatch");
            for (const auto& v : row) transition.push_back(v.get<double>());
        }
    }
    std::vector<double> reward;
    reward.reserve(static_cast<std::size_t>(s) * a);
    const json& rj = j.at("reward");
    if (static_cast<int>(rj.size()) != s) throw std::runtime_error("mdp: reward shape mismatch");
    for (const auto& row : rj) {
        if (static_cast<int>(row.size()) != a) throw std::runtime_error("mdp: reward shape mismatch");
        for (const auto& v : row) reward.push_back(v.get<double>());
    }
    return TabularMdp(s, a, std::move(transition), std::move(reward), j.at("gamma").get<double>(),
                      j.at("init_dist").get<std::vector<double>>(), j.at("r_max").get<double>());
}

json q_class_to_json(const QClass& cls) {
    json j;
    j["v_max"] = cls.v_max();
    json members = json::array();
    for (const auto& m : cls.members()) members.push_back(table_to_json(m));
    j["members"] = std::move(members);
    return j;
}

QClass q_class_from_json(const json& j, const TabularMdp& mdp) {
    if (j.contains("type")) {
        const std::string type = j.at("type").get<std::string>();
        if (type == "linear") {
            std::vector<std::vector<double>> phi =
                j.at("phi").get<std::vector<std::vector<double>>>();
            const auto theta_set = j.at("theta_set").get<std::vector<std::vector<double>>>();
            LinearQClass cls(mdp, std::move(phi), theta_set);
            return linear_q_members(cls, mdp);
        }
        throw std::runtime_error("q_class: unknown generator type '" + type + "'");
    }
    const double v_max = j.contains("v_max") ? j.at("v_max").get<double>() : mdp.v_max();
    std::vector<QFunction> members;
    for (const auto& mj : j.at("members")) members.emplace_back(table_from_json(mj));
    return QClass(std::move(members), v_max);
}

json w_class_to_json(const WClass& cls) {
    json j;
    json members = json::array();
    for (const auto& m : cls.members()) members.push_back(table_to_json(m));
    j["members"] = std::move(members);
    return j;
}

WClass w_class_from_json(const json& j, const TabularMdp& mdp, const DataDistribution* mu) {
    if (j.contains("type")) {
        const std::string type = j.at("type").get<std::string>();
        if (type == "indicator") {
            const bool scaled = j.value("scaled", false);
            return indicator_w_class(mdp.num_states(), mdp.num_actions(), scaled, mu);
        }
        throw std::runtime_error("w_class: unknown generator type '" + type + "'");
    }
    std::vector<WeightFunction> members;
    for (const auto& mj : j.at("members")) members.emplace_back(table_from_json(mj));
    return WClass(std::move(members));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

} // namespace detail

void save_mdp(const TabularMdp& mdp, const std::string& path) {
    detail::write_json_file(detail::mdp_to_json(mdp), path);
}

TabularMdp load_mdp(const std::string& path) {
    return detail::mdp_from_json(detail::load_json_file(path));
}

std::string mdp_to_json_string(const TabularMdp& mdp) { return detail::mdp_to_json(mdp).dump(2); }

TabularMdp mdp_from_json_string(const std::string& text) {
    return detail::mdp_from_json(json::parse(text));
}

void save_q_class(const QClass& cls, const std::string& path) {
    detail::write_json_file(detail::q_class_to_json(cls), path);
}

QClass load_q_class(const std::string& path, const TabularMdp& mdp) {
    return detail::q_class_from_json(detail::load_json_file(path), mdp);
}

void save_w_class(const WClass& cls, const std::string& path) {
    detail::write_json_file(detail::w_class_to_json(cls), path);
}

WClass load_w_class(const std::string& path, const TabularMdp& mdp, const DataDistribution* mu) {
    return detail::w_class_from_json(detail::load_json_file(path), mdp, mu);
}

std::string solver_result_to_json_string(const SolverResult& result) {
    json j;
    j["chosen_index"] = result.chosen_index;
    j["objective_value"] = result.objective_value;
    j["inner_index"] = result.inner_index;
    json trace = json::array();
    for (const auto& it : result.trace) trace.push_back({{"index", it.index}, {"loss", it.loss}});
    j["trace"] = std::move(trace);
    j["chosen_q"] = detail::table_to_json(result.chosen_q);
    return j.dump(2);
}

void save_solver_result(const SolverResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << solver_result_to_json_string(result) << '\n';
}

namespace {

json report_to_json(const BoundReport& r) {
    json j;
    auto set = [&j](const char* key, double v) {
        if (std::isnan(v)) j[key] = nullptr;
        else j[key] = v;
    };
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    j["mode"] = r.mode;
    j["n"] = r.n;
    set("delta", r.delta);
    set("gamma", r.gamma);
    set("v_max", r.v_max);
    j["q_size"] = r.q_size;
    j["f_size"] = r.f_size;
    j["w_size"] = r.w_size;
    set("c_eff", r.c_eff);
    set("c_inf", r.c_inf);
    j["per_step"] = r.per_step;
    set("c_ps", r.c_ps);
    set("c_eff_w", r.c_eff_w);
    set("c_inf_w", r.c_inf_w);
    set("eps_q_sq", r.eps_q_sq);
    set("eps_qf_sq", r.eps_qf_sq);
    set("eps_q_avg", r.eps_q_avg);
    set("eps_w", r.eps_w);
    set("eps_stat", r.eps_stat);
    set("msbo_bound_rhs", r.msbo_bound_rhs);
    set("mabo_bound_rhs", r.mabo_bound_rhs);
    j["chosen_index"] = r.chosen_index;
    set("objective_value", r.objective_value);
    set("suboptimality", r.suboptimality);
    return j;
}

} // namespace

std::string bound_report_to_json_string(const BoundReport& report) {
    return report_to_json(report).dump(2);
}

std::string bound_report_csv_header() {
    return "algorithm,seed,mode,n,delta,gamma,v_max,q_size,f_size,w_size,"
           "c_eff,c_inf,per_step,c_ps,c_eff_w,c_inf_w,"
           "eps_q_sq,eps_qf_sq,eps_q_avg,eps_w,eps_stat,"
           "msbo_bound_rhs,mabo_bound_rhs,chosen_index,objective_value,suboptimality";
}

std::string bound_report_csv_row(const BoundReport& r) {
    std::ostringstream out;
    out << r.algorithm << ',' << r.seed << ',' << r.mode << ',' << r.n << ','
        << format_double(r.delta) << ',' << format_double(r.gamma) << ',' << format_double(r.v_max)
        << ',' << r.q_size << ',' << r.f_size << ',' << r.w_size << ',' << format_double(r.c_eff)
        << ',' << format_double(r.c_inf) << ',';
    for (std::size_t i = 0; i < r.per_step.size(); ++i) {
        if (i) out << ';';
        out << format_double(r.per_step[i]);
    }
    out << ',' << format_double(r.c_ps) << ',' << format_double(r.c_eff_w) << ','
        << format_double(r.c_inf_w) << ',' << format_double(r.eps_q_sq) << ','
        << format_double(r.eps_qf_sq) << ',' << format_double(r.eps_q_avg) << ','
        << format_double(r.eps_w) << ',' << format_double(r.eps_stat) << ','
        << format_double(r.msbo_bound_rhs) << ',' << format_double(r.mabo_bound_rhs) << ','
        << r.chosen_index << ',' << format_double(r.objective_value) << ','
        << format_double(r.suboptimality);
    return out.str();
}

} // namespace brl
