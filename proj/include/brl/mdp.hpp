#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brl {

/// Flat row-major table with one real value per state-action pair.
struct StateActionTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> data;

    StateActionTable() = default;
    StateActionTable(int s, int a, double fill = 0.0)
        : num_states(s), num_actions(a),
          data(static_cast<std::size_t>(s) * static_cast<std::size_t>(a), fill) {}

    double& operator()(int s, int a) {
        return data[static_cast<std::size_t>(s) * num_actions + a];
    }
    double operator()(int s, int a) const {
        return data[static_cast<std::size_t>(s) * num_actions + a];
    }
    int size() const { return num_states * num_actions; }
    bool same_shape(const StateActionTable& o) const {
        return num_states == o.num_states && num_actions == o.num_actions;
    }
};

struct QFunction : StateActionTable {
    using StateActionTable::StateActionTable;
    QFunction() = default;
    explicit QFunction(StateActionTable t) : StateActionTable(std::move(t)) {}

    /// max_a q(s, a)
    double state_value(int s) const;
};

struct DeterministicPolicy {
    std::vector<int> action; // one action index per state

    int operator()(int s) const { return action[static_cast<std::size_t>(s)]; }
    int num_states() const { return static_cast<int>(action.size()); }
    bool operator==(const DeterministicPolicy& o) const { return action == o.action; }
};

/// Normalized discounted state-action occupancy (or a bare state marginal).
struct OccupancyMeasure {
    enum class Kind { state_action, state_only };

    Kind kind = Kind::state_action;
    StateActionTable dist;          // filled when kind == state_action
    std::vector<double> state;      // state marginal, always filled

    double total_mass() const;
};

/// Full tabular MDP model (S, A, P, R, gamma, d0). Immutable after
/// construction; construction validates stochasticity of every P row and d0,
/// the reward range, and the configured dense-size cap.
class TabularMdp {
public:
    TabularMdp(int num_states, int num_actions, std::vector<double> transition,
               std::vector<double> reward, double gamma, std::vector<double> init_dist,
               double r_max);

    int num_states() const { return s_; }
    int num_actions() const { return a_; }
    double gamma() const { return gamma_; }
    double r_max() const { return r_max_; }
    double v_max() const { return r_max_ / (1.0 - gamma_); }

    double p(int s, int a, int s_next) const {
        return transition_[(static_cast<std::size_t>(s) * a_ + a) * s_ + s_next];
    }
    double r(int s, int a) const { return reward_[static_cast<std::size_t>(s) * a_ + a]; }
    const std::vector<double>& transition() const { return transition_; }
    const std::vector<double>& reward() const { return reward_; }
    const std::vector<double>& init_dist() const { return init_dist_; }

private:
    int s_, a_;
    std::vector<double> transition_; // [s][a][s'] flattened
    std::vector<double> reward_;     // [s][a] flattened
    double gamma_;
    std::vector<double> init_dist_;
    double r_max_;

    void validate() const;
};

/// Dense-size cap |S|*|A|; BRL_MAX_STATE_ACTIONS overrides the default 10000.
int max_state_actions();

void validate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// Normalized discounted occupancy d_pi, via the dense linear system
/// nu = (1-gamma) d0 + gamma P_pi' nu. Throws if the solve residual
/// exceeds 1e-8.
OccupancyMeasure compute_occupancy(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// Exact (undiscounted) marginal of (s_t, a_t) under the policy.
OccupancyMeasure compute_step_marginal(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                       int t);

/// (TQ)(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) max_a' q(s',a').
QFunction bellman_optimality(const TabularMdp& mdp, const QFunction& q);

/// Per-state argmax of q; ties go to the lowest action index.
DeterministicPolicy greedy_policy(const QFunction& q);

/// J(pi) = E_{d_pi}[r] / (1 - gamma).
double expected_return(const TabularMdp& mdp, const DeterministicPolicy& policy);

/// (E_{d0}[Q(s,pi)] - J(pi)) - E_{d_pi}[Q(s,a) - r - gamma Q(s',pi)] / (1-gamma),
/// with both sides evaluated exactly from the model. Identically zero up to
/// numerics for every (pi, Q).
double telescoping_residual(const TabularMdp& mdp, const DeterministicPolicy& policy,
                            const QFunction& q);

/// Fixed point of the optimality operator by value iteration, accurate to
/// tol in the max norm.
QFunction optimal_q(const TabularMdp& mdp, double tol = 1e-12);

} // namespace brl
