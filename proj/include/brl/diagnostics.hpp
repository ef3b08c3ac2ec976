#pragma once

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/mdp.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace brl {

/// ||Q - TQ||^2_{2,mu}, exact.
double sq_bellman_error_mu(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q);

/// Occupancy-based concentrability: max over the class's greedy policies of
/// the mu-weighted squared norm of the importance weights.
double c_eff(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class);

/// Max-norm analogue of c_eff.
double c_inf(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class);

/// Per-step coefficients C_t = max over the given policies of
/// ||d_{pi,t} / mu||_inf, for t = 0..t_max.
std::vector<double> per_step_coefficients(const TabularMdp& mdp, const DataDistribution& mu,
                                          const std::vector<DeterministicPolicy>& policies,
                                          int t_max);

/// Canonical convex weighting (1-gamma) gamma^t over 0..t_max, renormalized
/// after truncation.
std::vector<double> default_beta(double gamma, int t_max);

/// sum_t beta(t) C_t with beta renormalized over the truncated range.
double per_step_combined(const std::vector<double>& per_step, const std::vector<double>& beta);

/// (max_w ||w||^2_{2,mu}, max_w ||w||_inf) over the weight class.
std::pair<double, double> c_w_coefficients(const WClass& w_class, const DataDistribution& mu);

/// min over the class of the squared Bellman residual norm.
double eps_q_sq(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class);

/// max_Q min_f ||f - TQ||^2_{2,mu}, by enumeration.
double eps_qf_sq(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
                 const QClass& f_class);

/// min_Q max_w |E_mu[w (TQ - Q)]|, by enumeration.
double eps_q_avg(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
                 const WClass& w_class);

/// For one policy: the best unit-l1 combination of the weight class measured
/// against the worst-case member of the Q class,
///   inf_alpha max_Q | E_mu[(w_pi - sum_i alpha_i w_i)(TQ - Q)] |,
/// solved as a small dense LP. Returns the optimum and the optimal
/// coefficients; throws if the solver cannot certify the value to 1e-9.
std::pair<double, SpanCoefficients> eps_w_for_policy(const TabularMdp& mdp,
                                                     const DataDistribution& mu,
                                                     const QClass& q_class, const WClass& w_class,
                                                     const DeterministicPolicy& policy);

/// Max of eps_w_for_policy over the class's greedy policies.
double eps_w(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
             const WClass& w_class);

/// Statistical term of the averaged-loss bound:
/// 2 V sqrt(2 C_eff,W ln(2|Q||W|/delta) / n) + 4 C_inf,W V ln(2|Q||W|/delta) / (3n).
double eps_stat(double c_eff_w, double c_inf_w, double v_max, int n, double delta, int q_size,
                int w_size);

/// Right-hand side of the squared-loss minimax bound with explicit constants.
double msbo_bound_rhs(double c_eff_value, double eps_q_sq_value, double eps_qf_sq_value,
                      double v_max, double gamma, int n, double delta, int q_size, int f_size);

/// Right-hand side of the averaged-loss minimax bound:
/// 2 (eps_q_avg + eps_w + eps_stat) / (1 - gamma).
double mabo_bound_rhs(double eps_q_avg_value, double eps_w_value, double eps_stat_value,
                      double gamma);

/// Exact max over the class's greedy policies of J(pi) - J(pi_chosen).
double suboptimality(const TabularMdp& mdp, const QClass& q_class, const QFunction& chosen_q);

/// Every evaluated bound quantity for one experiment. Fields not computable
/// from the configured classes stay NaN.
struct BoundReport {
    static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

    std::string algorithm;
    std::uint64_t seed = 0;
    std::string mode; // "empirical" or "population"
    int n = 0;
    double delta = kUnset;
    double gamma = kUnset;
    double v_max = kUnset;
    int q_size = 0;
    int f_size = 0;
    int w_size = 0;

    double c_eff = kUnset;
    double c_inf = kUnset;
    std::vector<double> per_step;
    double c_ps = kUnset;
    double c_eff_w = kUnset;
    double c_inf_w = kUnset;

    double eps_q_sq = kUnset;
    double eps_qf_sq = kUnset;
    double eps_q_avg = kUnset;
    double eps_w = kUnset;
    double eps_stat = kUnset;

    double msbo_bound_rhs = kUnset;
    double mabo_bound_rhs = kUnset;

    int chosen_index = -1;
    double objective_value = kUnset;
    double suboptimality = kUnset;
};

/// Evaluates both bound right-hand sides from a report's components; throws
/// std::invalid_argument when a needed component is unset.
std::pair<double, double> bound_rhs(const BoundReport& report);

} // namespace brl
