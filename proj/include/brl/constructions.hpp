#pragma once

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/mdp.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace brl {

/// Deterministic uncontrolled chain: length+1 states, one action, s_l -> s_{l+1},
/// the last state absorbing, zero rewards, d0 at s_0. The returned data
/// distribution is the occupancy of the unique policy, so there is no
/// distribution shift by construction.
std::pair<TabularMdp, DataDistribution> chain_mdp(int length, double gamma);

/// Closed-form per-step coefficient of the chain: 1/((1-gamma) gamma^t) for
/// t < length and 1/gamma^length beyond. gamma^t is accumulated by repeated
/// multiplication so the value is bit-comparable with the linear-solve route.
double chain_per_step_formula(int length, double gamma, int t);

/// Two states, one action, s_0 -> s_1, s_1 absorbing, zero reward, and a
/// dataset holding only (s_0, a, 0, s_1) tuples. The uncovered pair (s_1, a)
/// is what lets iterated squared-loss fitting lose control of the Bellman
/// error on the data.
std::pair<TabularMdp, BatchDataset> two_state_counterexample(int tuple_count = 100,
                                                             double gamma = 0.9);

struct LowRankMdpSpec {
    int latent_dim = 0;
    std::vector<std::vector<double>> left;  // (S*A) x k, rows are distributions over latents
    std::vector<std::vector<double>> right; // k x S, rows are distributions over states
};

/// Random MDP with transition matrix factored as left * right, so its rank is
/// at most k by construction. Rewards are uniform in [0, r_max].
std::pair<LowRankMdpSpec, TabularMdp> random_lowrank_mdp(int num_states, int num_actions, int k,
                                                         std::uint64_t seed, double gamma = 0.9,
                                                         double r_max = 1.0);

/// Dense random MDP: transition rows and d0 are uniform draws from the
/// simplex, rewards uniform in [0, r_max].
TabularMdp random_mdp(int num_states, int num_actions, double gamma, std::uint64_t seed,
                      double r_max = 1.0);

/// Random Q table with entries uniform in [0, v_max].
QFunction random_q_function(int num_states, int num_actions, double v_max, std::uint64_t seed);

/// One state-occupancy row per policy.
std::vector<std::vector<double>> occupancy_matrix(const TabularMdp& mdp,
                                                  const std::vector<DeterministicPolicy>& policies);

struct SpannerSelection {
    std::vector<int> row_indices;                   // input rows chosen as the spanner
    std::vector<std::vector<double>> coefficients;  // per input row, over selected rows
    double approximation_ratio = 1.0;               // max |coefficient|, 1 for an exact spanner
};

/// Selects up to target_dim rows whose span covers every input row with
/// coefficients bounded near 1: greedy volume maximization followed by swap
/// refinement until no single swap grows the selected volume by a factor
/// above 1 + 1e-9. Rank-deficient inputs yield a smaller selection.
/// coefficients[i] reconstructs rows[i] from the selected rows directly;
/// dividing them by the selection size gives the bounded mixing weights for
/// the selection-size-rescaled spanner members.
SpannerSelection barycentric_select(const std::vector<std::vector<double>>& rows, int target_dim);

/// Weight class covering the importance weights of every greedy policy of the
/// class: spanner rows of the state-occupancy stack, rescaled by the
/// selection size, paired with each policy and divided by mu. Size is at most
/// (selection size) * |Pi_Q|.
WClass build_w_occupancy_spanner(const TabularMdp& mdp, const DataDistribution& mu,
                                 const QClass& q_class);

/// Weight class for a feature-linear Q class: policies are selected by a
/// spanner over their occupancy projections onto [phi | R], and the chosen
/// true importance weights are returned rescaled by the selection size. Size
/// is at most latent_dim + 1.
WClass build_w_feature_projected(const LowRankMdpSpec& spec, const TabularMdp& mdp,
                                 const DataDistribution& mu, const LinearQClass& linear_q);

/// Uncontrolled-transition MDP with two actions where d0 is uniform over the
/// first num_states-1 states and everything moves to the absorbing last
/// state; its transition matrix has rank 1 regardless of size.
TabularMdp contextual_bandit_mdp(int num_states, double gamma);

/// Policies taking action 0 in exactly one non-terminal state and action 1
/// elsewhere; their state-action occupancy stack has rank num_states - 1.
std::vector<DeterministicPolicy> single_deviation_policies(int num_states);

} // namespace brl
