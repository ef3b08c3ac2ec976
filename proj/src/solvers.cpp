#include "brl/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace brl {

LossContext LossContext::empirical(const BatchDataset& data, double gamma) {
    if (data.tuples.empty()) throw std::invalid_argument("LossContext: empty dataset");
    LossContext ctx;
    ctx.mode_ = LossMode::empirical;
    ctx.data_ = &data;
    ctx.gamma_ = gamma;
    return ctx;
}

LossContext LossContext::population(const TabularMdp& mdp, const DataDistribution& mu) {
    if (mu.num_states() != mdp.num_states() || mu.num_actions() != mdp.num_actions())
        throw std::invalid_argument("LossContext: mu shape mismatch");
    LossContext ctx;
    ctx.mode_ = LossMode::population;
    ctx.mdp_ = &mdp;
    ctx.mu_ = &mu;
    ctx.gamma_ = mdp.gamma();
    return ctx;
}

double LossContext::sq_loss(const QFunction& q, const QFunction& q_target) const {
    return mode_ == LossMode::empirical ? empirical_sq_loss(*data_, gamma_, q, q_target)
                                        : population_sq_loss(*mdp_, *mu_, q, q_target);
}

double LossContext::avg_loss(const QFunction& q, const WeightFunction& w) const {
    return mode_ == LossMode::empirical ? empirical_avg_loss(*data_, gamma_, q, w)
                                        : population_avg_loss(*mdp_, *mu_, q, w);
}

SolverResult fqi(const LossContext& loss, const QClass& q_class, int iterations, int init_index) {
    if (iterations <= 0) throw std::invalid_argument("fqi: iterations must be positive");
    if (init_index < 0 || init_index >= q_class.size())
        throw std::invalid_argument("fqi: init_index out of range");

    SolverResult out;
    int current = init_index;
    for (int iter = 0; iter < iterations; ++iter) {
        const QFunction& target = q_class.member(current);
        int best = 0;
        double best_loss = loss.sq_loss(q_class.member(0), target);
        for (int i = 1; i < q_class.size(); ++i) {
            const double v = loss.sq_loss(q_class.member(i), target);
            if (v < best_loss) { best_loss = v; best = i; }
        }
        current = best;
        out.trace.push_back({best, best_loss});
    }
    out.chosen_index = current;
    out.chosen_q = q_class.member(current);
    out.objective_value = out.trace.back().loss;
    return out;
}

SolverResult msbo(const LossContext& loss, const QClass& q_class, const QClass& f_class) {
    SolverResult out;
    for (int qi = 0; qi < q_class.size(); ++qi) {
        const QFunction& q = q_class.member(qi);
        const double base = loss.sq_loss(q, q);
        int worst_f = 0;
        double worst = base - loss.sq_loss(f_class.member(0), q);
        for (int fi = 1; fi < f_class.size(); ++fi) {
            const double v = base - loss.sq_loss(f_class.member(fi), q);
            if (v > worst) { worst = v; worst_f = fi; }
        }
        if (qi == 0 || worst < out.objective_value) {
            out.chosen_index = qi;
            out.objective_value = worst;
            out.inner_index = worst_f;
        }
    }
    out.chosen_q = q_class.member(out.chosen_index);
    return out;
}

SolverResult mabo(const LossContext& loss, const QClass& q_class, const WClass& w_class) {
    SolverResult out;
    for (int qi = 0; qi < q_class.size(); ++qi) {
        const QFunction& q = q_class.member(qi);
        int worst_w = 0;
        double worst = std::fabs(loss.avg_loss(q, w_class.member(0)));
        for (int wi = 1; wi < w_class.size(); ++wi) {
            const double v = std::fabs(loss.avg_loss(q, w_class.member(wi)));
            if (v > worst) { worst = v; worst_w = wi; }
        }
        if (qi == 0 || worst < out.objective_value) {
            out.chosen_index = qi;
            out.objective_value = worst;
            out.inner_index = worst_w;
        }
    }
    out.chosen_q = q_class.member(out.chosen_index);
    return out;
}

CertaintyEquivalenceResult certainty_equivalence(const BatchDataset& data, int num_states,
                                                 int num_actions, double gamma) {
    if (data.tuples.empty()) throw std::invalid_argument("certainty_equivalence: empty dataset");
    if (num_states <= 0 || num_actions <= 0)
        throw std::invalid_argument("certainty_equivalence: dimensions must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("certainty_equivalence: gamma must be in [0,1)");

    const std::size_t sa = static_cast<std::size_t>(num_states) * num_actions;
    std::vector<double> counts(sa, 0.0);
    std::vector<double> transition(sa * num_states, 0.0);
    std::vector<double> reward(sa, 0.0);

    for (const auto& t : data.tuples) {
        if (t.s < 0 || t.s >= num_states || t.s_next < 0 || t.s_next >= num_states || t.a < 0 ||
            t.a >= num_actions)
            throw std::invalid_argument("certainty_equivalence: tuple index out of range");
        const std::size_t idx = static_cast<std::size_t>(t.s) * num_actions + t.a;
        counts[idx] += 1.0;
        transition[idx * num_states + t.s_next] += 1.0;
        reward[idx] = t.r; // rewards are deterministic given (s,a)
    }

    CertaintyEquivalenceResult out{QFunction(), TabularMdp(1, 1, {1.0}, {0.0}, 0.0, {1.0}, 0.0), {}};
    double r_max = 0.0;
    for (std::size_t i = 0; i < sa; ++i) {
        if (counts[i] > 0.0) {
            for (int sp = 0; sp < num_states; ++sp) transition[i * num_states + sp] /= counts[i];
            r_max = std::max(r_max, reward[i]);
        } else {
            const int s = static_cast<int>(i) / num_actions;
            const int a = static_cast<int>(i) % num_actions;
            transition[i * num_states + s] = 1.0; // flagged self-loop, reward 0
            out.unobserved.emplace_back(s, a);
        }
    }

    std::vector<double> d0(num_states, 1.0 / num_states);
    out.empirical_mdp =
        TabularMdp(num_states, num_actions, std::move(transition), std::move(reward), gamma,
                   std::move(d0), r_max);
    out.q = optimal_q(out.empirical_mdp, 1e-12);
    return out;
}

} // namespace brl
