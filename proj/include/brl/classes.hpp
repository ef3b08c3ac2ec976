#pragma once

#include "brl/batch.hpp"
#include "brl/mdp.hpp"

#include <vector>

namespace brl {

/// Finite, enumerable candidate set of Q-functions, constrained entrywise to
/// [0, v_max]. Out-of-range tables are rejected here rather than clipped.
class QClass {
public:
    QClass(std::vector<QFunction> members, double v_max);

    int size() const { return static_cast<int>(members_.size()); }
    const QFunction& member(int i) const { return members_.at(static_cast<std::size_t>(i)); }
    const std::vector<QFunction>& members() const { return members_; }
    double v_max() const { return v_max_; }

private:
    std::vector<QFunction> members_;
    double v_max_;
};

/// Finite candidate set of importance-weight functions (entries may be
/// negative; only finiteness is required).
class WClass {
public:
    explicit WClass(std::vector<WeightFunction> members);

    int size() const { return static_cast<int>(members_.size()); }
    const WeightFunction& member(int i) const { return members_.at(static_cast<std::size_t>(i)); }
    const std::vector<WeightFunction>& members() const { return members_; }

private:
    std::vector<WeightFunction> members_;
};

/// Mixing coefficients with l1 norm at most 1; the span of a weight class is
/// the set of combinations these coefficients produce.
struct SpanCoefficients {
    std::vector<double> alpha;

    double l1_norm() const;
    void validate() const; // throws on an l1 violation beyond 1e-12
};

/// Pointwise sum of alpha_i * w_i.
WeightFunction span_evaluate(const WClass& w_class, const SpanCoefficients& alpha);

/// max over w in the unit-l1 span of |sum_{s,a} c(s,a) w(s,a)|. For a linear
/// functional the maximum sits at a vertex, so this is just the best member.
double span_max_abs(const WClass& w_class, const StateActionTable& functional);

/// One indicator per state-action pair; when scaled, each is divided by
/// mu(s,a) so that it is the importance weight of a point mass.
WClass indicator_w_class(int num_states, int num_actions, bool scaled,
                         const DataDistribution* mu = nullptr);

/// Q-functions of the form Q(s,a) = R(s,a) + gamma * phi(s,a)' theta over a
/// finite set of coefficient vectors. The feature matrix is stored with the
/// reward appended as its last column; thetas whose Q leaves [0, v_max] are
/// dropped at construction.
class LinearQClass {
public:
    LinearQClass(const TabularMdp& mdp, std::vector<std::vector<double>> phi,
                 const std::vector<std::vector<double>>& theta_set);

    int latent_dim() const { return k_; }
    /// (S*A) x (k+1) rows of [phi | R].
    const std::vector<std::vector<double>>& feature_rows() const { return features_plus_; }
    const std::vector<std::vector<double>>& thetas() const { return thetas_; }
    int size() const { return static_cast<int>(thetas_.size()); }

private:
    int k_;
    std::vector<std::vector<double>> features_plus_;
    std::vector<std::vector<double>> thetas_;
};

/// Materializes the retained members as a QClass with the model's V_max bound.
QClass linear_q_members(const LinearQClass& cls, const TabularMdp& mdp);

/// Greedy policies of all members, deduplicated by exact action-table
/// equality in first-occurrence order.
std::vector<DeterministicPolicy> greedy_policies(const QClass& q_class);

} // namespace brl
