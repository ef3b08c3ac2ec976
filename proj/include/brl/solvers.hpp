#pragma once

#include "brl/batch.hpp"
#include "brl/classes.hpp"
#include "brl/mdp.hpp"

#include <utility>
#include <vector>

namespace brl {

enum class LossMode { empirical, population };

/// Where the solvers read their losses from: a dataset (empirical mode) or
/// the exact model quantities (population mode, for noise-free verification).
/// Holds non-owning references; the underlying objects must outlive it.
class LossContext {
public:
    static LossContext empirical(const BatchDataset& data, double gamma);
    static LossContext population(const TabularMdp& mdp, const DataDistribution& mu);

    LossMode mode() const { return mode_; }

    /// Squared TD loss of q against the frozen target q_target.
    double sq_loss(const QFunction& q, const QFunction& q_target) const;
    /// Weighted average Bellman error of q under w.
    double avg_loss(const QFunction& q, const WeightFunction& w) const;

private:
    LossContext() = default;
    LossMode mode_ = LossMode::empirical;
    const BatchDataset* data_ = nullptr;
    double gamma_ = 0.0;
    const TabularMdp* mdp_ = nullptr;
    const DataDistribution* mu_ = nullptr;
};

struct FqiIterate {
    int index = 0;    // member chosen at this iteration
    double loss = 0.0; // loss it achieved against the previous iterate
};

struct SolverResult {
    int chosen_index = -1;
    QFunction chosen_q;
    double objective_value = 0.0;
    int inner_index = -1;          // adversarial f or w for the chosen Q; -1 if n/a
    std::vector<FqiIterate> trace; // filled by fqi only
};

/// Iterated squared-loss fitting: each round picks the member minimizing the
/// TD loss against the previous iterate, by exhaustive enumeration with
/// lowest-index tie-breaking.
SolverResult fqi(const LossContext& loss, const QClass& q_class, int iterations, int init_index);

/// argmin_Q max_f ( loss(Q;Q) - loss(f;Q) ) over the finite classes.
SolverResult msbo(const LossContext& loss, const QClass& q_class, const QClass& f_class);

/// argmin_Q max_w | weighted average Bellman error | over the finite classes.
SolverResult mabo(const LossContext& loss, const QClass& q_class, const WClass& w_class);

struct CertaintyEquivalenceResult {
    QFunction q;                                   // optimal Q of the empirical model
    TabularMdp empirical_mdp;
    std::vector<std::pair<int, int>> unobserved;   // pairs defaulted to a zero-reward self-loop
};

/// Builds the frequency-estimate MDP from the data and solves it to 1e-12.
CertaintyEquivalenceResult certainty_equivalence(const BatchDataset& data, int num_states,
                                                 int num_actions, double gamma);

} // namespace brl
