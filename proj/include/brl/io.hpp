#pragma once

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/diagnostics.hpp"
#include "brl/mdp.hpp"
#include "brl/solvers.hpp"

#include <string>
#include <vector>

namespace brl {

/// MDP JSON file: num_states, num_actions, gamma, r_max, transition (SxAxS),
/// reward (SxA), init_dist (S). Loading revalidates every invariant,
/// including transition row sums.
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);
std::string mdp_to_json_string(const TabularMdp& mdp);
TabularMdp mdp_from_json_string(const std::string& text);

/// Q-class files hold either explicit member tables
///   {"v_max": ..., "members": [SxA tables]}
/// or a linear generator
///   {"type": "linear", "phi": [(S*A) rows of k], "theta_set": [...]}.
void save_q_class(const QClass& cls, const std::string& path);
QClass load_q_class(const std::string& path, const TabularMdp& mdp);

/// W-class files hold explicit members {"members": [...]} or the indicator
/// generator {"type": "indicator", "scaled": bool}.
void save_w_class(const WClass& cls, const std::string& path);
WClass load_w_class(const std::string& path, const TabularMdp& mdp, const DataDistribution* mu);

std::string solver_result_to_json_string(const SolverResult& result);
void save_solver_result(const SolverResult& result, const std::string& path);

std::string bound_report_to_json_string(const BoundReport& report);
/// Stable column order matching the BoundReport fields; per-step coefficients
/// are packed into one semicolon-separated cell.
std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& report);

/// Round-trip-safe formatting used in every CSV we emit.
std::string format_double(double v);

} // namespace brl
