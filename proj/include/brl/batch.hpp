#pragma once

#include "brl/mdp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace brl {

/// Logging distribution over state-action pairs. Full support is part of the
/// data protocol, so construction rejects any zero entry.
class DataDistribution {
public:
    explicit DataDistribution(StateActionTable mu);

    double operator()(int s, int a) const { return mu_(s, a); }
    const StateActionTable& table() const { return mu_; }
    int num_states() const { return mu_.num_states; }
    int num_actions() const { return mu_.num_actions; }

    static DataDistribution uniform(int num_states, int num_actions);
    /// mu = d_pi; requires d_pi to have full support.
    static DataDistribution from_occupancy(const TabularMdp& mdp, const DeterministicPolicy& policy);

private:
    StateActionTable mu_;
};

struct SampledTransition {
    int s = 0;
    int a = 0;
    double r = 0.0;
    int s_next = 0;
};

struct BatchDataset {
    std::vector<SampledTransition> tuples;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(tuples.size()); }
};

/// Marginalized importance weight table; entries may be negative for
/// synthetic members of a weight class.
struct WeightFunction : StateActionTable {
    using StateActionTable::StateActionTable;
    WeightFunction() = default;
    explicit WeightFunction(StateActionTable t) : StateActionTable(std::move(t)) {}
};

/// n i.i.d. tuples with (s,a) ~ mu, r = R(s,a), s' ~ P(.|s,a); byte-for-byte
/// reproducible from the seed.
BatchDataset generate_batch(const TabularMdp& mdp, const DataDistribution& mu, int n,
                            std::uint64_t seed);

/// Pointwise d_pi / mu.
WeightFunction importance_weight(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                 const DataDistribution& mu);

/// (1/n) sum (q(s,a) - r - gamma max_a' q_target(s',a'))^2
double empirical_sq_loss(const BatchDataset& data, double gamma, const QFunction& q,
                         const QFunction& q_target);

/// Exact E_mu[(q - r - gamma max_a' q_target(s',.))^2], split into the squared
/// distance to the backup mean plus the discounted conditional variance of the
/// next-state value (the over-estimation term).
double population_sq_loss(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q,
                          const QFunction& q_target);

/// (1/n) sum w(s,a) (r + gamma max_a' q(s',a') - q(s,a))
double empirical_avg_loss(const BatchDataset& data, double gamma, const QFunction& q,
                          const WeightFunction& w);

/// Exact E_mu[w (TQ - Q)].
double population_avg_loss(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q,
                           const WeightFunction& w);

void save_dataset_csv(const BatchDataset& data, const std::string& path);

/// Loads a dataset written by save_dataset_csv, validating every index and
/// reward against the reference model.
BatchDataset load_dataset_csv(const std::string& path, const TabularMdp& reference);

} // namespace brl
