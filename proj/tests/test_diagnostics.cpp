#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brl/constructions.hpp"
#include "brl/diagnostics.hpp"
#include "brl/rng.hpp"

#include <cmath>
#include <vector>

using namespace brl;

namespace {

QClass random_class(CounterRng& rng, const TabularMdp& mdp, int size) {
    std::vector<QFunction> members;
    for (int i = 0; i < size; ++i)
        members.push_back(random_q_function(mdp.num_states(), mdp.num_actions(), mdp.v_max(),
                                            rng.next_u64()));
    return QClass(std::move(members), mdp.v_max());
}

WClass exact_weights(const TabularMdp& mdp, const DataDistribution& mu, const QClass& cls) {
    std::vector<WeightFunction> members;
    for (const auto& pi : greedy_policies(cls)) members.push_back(importance_weight(mdp, pi, mu));
    return WClass(std::move(members));
}

} // namespace

TEST_CASE("occupancy coefficients are 1 when mu is the occupancy itself") {
    const auto [mdp, mu] = chain_mdp(4, 0.9);
    const QClass trivial({QFunction(5, 1, 0.0)}, 0.0);
    CHECK(c_eff(mdp, mu, trivial) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c_inf(mdp, mu, trivial) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("occupancy coefficients hit K for a point-mass occupancy under uniform mu") {
    // Single state, 4 actions: occupancy concentrates on one of K = 4 pairs.
    std::vector<double> transition(4, 1.0);
    std::vector<double> reward(4, 0.0);
    const TabularMdp mdp(1, 4, std::move(transition), std::move(reward), 0.9, {1.0}, 0.0);
    const DataDistribution mu = DataDistribution::uniform(1, 4);
    const QClass trivial({QFunction(1, 4, 0.0)}, 0.0); // greedy picks action 0
    CHECK(c_eff(mdp, mu, trivial) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(c_inf(mdp, mu, trivial) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("c_eff never exceeds c_inf") {
    CounterRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp mdp = random_mdp(5, 3, 0.9, rng.next_u64());
        const DataDistribution mu = DataDistribution::uniform(5, 3);
        const QClass cls = random_class(rng, mdp, 5);
        CHECK(c_eff(mdp, mu, cls) <= c_inf(mdp, mu, cls) + 1e-10);
    }
}

TEST_CASE("per-step coefficients on the chain match the closed form") {
    for (const auto& [length, gamma] : std::vector<std::pair<int, double>>{{2, 0.5}, {5, 0.9}}) {
        const auto [mdp, mu] = chain_mdp(length, gamma);
        DeterministicPolicy only;
        only.action.assign(static_cast<std::size_t>(length) + 1, 0);
        const auto per_step = per_step_coefficients(mdp, mu, {only}, length + 2);
        for (int t = 0; t <= length + 2; ++t)
            CHECK(per_step[static_cast<std::size_t>(t)] ==
                  doctest::Approx(chain_per_step_formula(length, gamma, t)).epsilon(1e-14));
        // At t = 0 the marginal is the start state, so C_0 = 1/mu(s_0) = 1/(1-gamma).
        CHECK(per_step[0] == doctest::Approx(1.0 / (1.0 - gamma)));
    }
}

TEST_CASE("per-step combination: convexity, point masses, input checks") {
    const std::vector<double> flat = {3.0, 3.0, 3.0};
    CHECK(per_step_combined(flat, {0.2, 0.5, 0.3}) == doctest::Approx(3.0));
    CHECK(per_step_combined(flat, default_beta(0.9, 2)) == doctest::Approx(3.0));

    const std::vector<double> varied = {1.0, 7.0, 2.0};
    CHECK(per_step_combined(varied, {0.0, 1.0, 0.0}) == doctest::Approx(7.0));
    CHECK_THROWS(per_step_combined(varied, {0.5, -0.1, 0.6}));
    CHECK_THROWS(per_step_combined(varied, {0.5, 0.5}));

    // Unnormalized weights are renormalized over the truncated range.
    CHECK(per_step_combined(varied, {2.0, 2.0, 0.0}) == doctest::Approx(4.0));
}

TEST_CASE("weight-class coefficients by enumeration") {
    const DataDistribution mu = DataDistribution::uniform(2, 2);
    const WClass ones({WeightFunction(2, 2, 1.0)});
    auto [eff, inf] = c_w_coefficients(ones, mu);
    CHECK(eff == doctest::Approx(1.0));
    CHECK(inf == doctest::Approx(1.0));

    const WClass scaled = indicator_w_class(2, 2, true, &mu);
    std::tie(eff, inf) = c_w_coefficients(scaled, mu);
    CHECK(eff == doctest::Approx(4.0)); // K = 4 pairs
    CHECK(inf == doctest::Approx(4.0));

    // With the exact importance weights the pair reduces to (c_eff, c_inf).
    CounterRng rng(11);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu4 = DataDistribution::uniform(4, 2);
    const QClass cls = random_class(rng, mdp, 4);
    const WClass weights = exact_weights(mdp, mu4, cls);
    std::tie(eff, inf) = c_w_coefficients(weights, mu4);
    CHECK(eff == doctest::Approx(c_eff(mdp, mu4, cls)).epsilon(1e-12));
    CHECK(inf == doctest::Approx(c_inf(mdp, mu4, cls)).epsilon(1e-12));
}

TEST_CASE("eps_q_sq: zero with the optimal Q, residual for singletons, enumeration oracle") {
    CounterRng rng(17);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const QFunction q_star = optimal_q(mdp);

    std::vector<QFunction> with_star = {random_q_function(4, 2, mdp.v_max(), rng.next_u64()), q_star};
    CHECK(eps_q_sq(mdp, mu, QClass(std::move(with_star), mdp.v_max())) < 1e-15);

    const QFunction lone = random_q_function(4, 2, mdp.v_max(), rng.next_u64());
    CHECK(eps_q_sq(mdp, mu, QClass({lone}, mdp.v_max())) ==
          doctest::Approx(sq_bellman_error_mu(mdp, mu, lone)).epsilon(1e-13));

    const QClass cls = random_class(rng, mdp, 6);
    double oracle = 1e300;
    for (const auto& m : cls.members()) oracle = std::min(oracle, sq_bellman_error_mu(mdp, mu, m));
    CHECK(eps_q_sq(mdp, mu, cls) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("eps_qf_sq: covered backups, zero class, enumeration oracle") {
    CounterRng rng(19);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const QClass q_class = random_class(rng, mdp, 4);

    std::vector<QFunction> backups;
    for (const auto& q : q_class.members()) backups.push_back(bellman_optimality(mdp, q));
    CHECK(eps_qf_sq(mdp, mu, q_class, QClass(std::move(backups), mdp.v_max())) < 1e-15);

    const QClass zero_class({QFunction(4, 2, 0.0)}, mdp.v_max());
    double worst_backup_norm = 0.0;
    for (const auto& q : q_class.members()) {
        const QFunction tq = bellman_optimality(mdp, q);
        double norm = 0.0;
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) norm += mu(s, a) * tq(s, a) * tq(s, a);
        worst_backup_norm = std::max(worst_backup_norm, norm);
    }
    CHECK(eps_qf_sq(mdp, mu, q_class, zero_class) == doctest::Approx(worst_backup_norm).epsilon(1e-12));

    const QClass f_class = random_class(rng, mdp, 5);
    double oracle = 0.0;
    for (const auto& q : q_class.members()) {
        const QFunction tq = bellman_optimality(mdp, q);
        double inner = 1e300;
        for (const auto& f : f_class.members()) {
            double norm = 0.0;
            for (int s = 0; s < 4; ++s)
                for (int a = 0; a < 2; ++a) {
                    const double d = f(s, a) - tq(s, a);
                    norm += mu(s, a) * d * d;
                }
            inner = std::min(inner, norm);
        }
        oracle = std::max(oracle, inner);
    }
    CHECK(eps_qf_sq(mdp, mu, q_class, f_class) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("eps_q_avg: zero at the optimum and bounded by Cauchy-Schwarz") {
    CounterRng rng(23);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 2);

    std::vector<QFunction> with_star = {random_q_function(4, 2, mdp.v_max(), rng.next_u64()),
                                        optimal_q(mdp)};
    const QClass star_class(std::move(with_star), mdp.v_max());
    CHECK(eps_q_avg(mdp, mu, star_class, exact_weights(mdp, mu, star_class)) < 1e-11);

    for (int trial = 0; trial < 10; ++trial) {
        const TabularMdp m = random_mdp(4, 2, 0.9, rng.next_u64());
        const QClass cls = random_class(rng, m, 5);
        const WClass weights = exact_weights(m, mu, cls);
        const double lhs = eps_q_avg(m, mu, cls, weights);
        CHECK(lhs <= std::sqrt(c_eff(m, mu, cls) * eps_q_sq(m, mu, cls)) + 1e-10);

        // Enumeration oracle.
        double oracle = 1e300;
        for (const auto& q : cls.members()) {
            double worst = 0.0;
            for (const auto& w : weights.members())
                worst = std::max(worst, std::fabs(population_avg_loss(m, mu, q, w)));
            oracle = std::min(oracle, worst);
        }
        CHECK(lhs == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("eps_w LP: zero when the exact weight is a member") {
    CounterRng rng(29);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const QClass cls = random_class(rng, mdp, 4);
    const auto policies = greedy_policies(cls);
    const WClass weights = exact_weights(mdp, mu, cls);

    for (std::size_t i = 0; i < policies.size(); ++i) {
        const auto [value, alpha] = eps_w_for_policy(mdp, mu, cls, weights, policies[i]);
        CHECK(value < 1e-10);
        alpha.validate();
    }
    CHECK(eps_w(mdp, mu, cls, weights) < 1e-10);
}

TEST_CASE("eps_w LP matches a dense grid search on a 2x2 instance") {
    CounterRng rng(31);
    const TabularMdp mdp = random_mdp(3, 2, 0.85, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(3, 2);
    const QClass cls = random_class(rng, mdp, 2);
    std::vector<WeightFunction> ws;
    for (int i = 0; i < 2; ++i) {
        WeightFunction w(3, 2, 0.0);
        for (auto& v : w.data) v = 3.0 * rng.next_double() - 1.0;
        ws.push_back(std::move(w));
    }
    const WClass w_class(ws);
    DeterministicPolicy pi;
    pi.action = {0, 1, 0};

    const auto [lp_value, alpha] = eps_w_for_policy(mdp, mu, cls, w_class, pi);
    alpha.validate();

    // Dense grid search over the l1 ball at resolution 1e-3.
    const WeightFunction w_pi = importance_weight(mdp, pi, mu);
    double target[2], inner[2][2];
    for (int qi = 0; qi < 2; ++qi) {
        target[qi] = population_avg_loss(mdp, mu, cls.member(qi), w_pi);
        for (int wi = 0; wi < 2; ++wi)
            inner[qi][wi] = population_avg_loss(mdp, mu, cls.member(qi), w_class.member(wi));
    }
    const double step = 1e-3;
    double grid_best = 1e300;
    for (int i = -1000; i <= 1000; ++i) {
        const double a0 = i * step;
        const int j_range = 1000 - std::abs(i);
        for (int j = -j_range; j <= j_range; ++j) {
            const double a1 = j * step;
            double worst = 0.0;
            for (int qi = 0; qi < 2; ++qi)
                worst = std::max(worst,
                                 std::fabs(target[qi] - a0 * inner[qi][0] - a1 * inner[qi][1]));
            grid_best = std::min(grid_best, worst);
        }
    }
    CHECK(lp_value <= grid_best + 1e-12); // the LP can only do better
    CHECK(std::fabs(lp_value - grid_best) < 2e-3);
}

TEST_CASE("eps_stat: exact scaling and input validation") {
    const double base = eps_stat(2.0, 0.0, 10.0, 1000, 0.05, 8, 4);
    const double quadrupled = eps_stat(2.0, 0.0, 10.0, 4000, 0.05, 8, 4);
    CHECK(quadrupled == doctest::Approx(base / 2.0).epsilon(1e-14));

    // Independent transcription of the formula.
    const double log_term = std::log(2.0 * 8 * 4 / 0.05);
    const double expected =
        2.0 * 10.0 * std::sqrt(2.0 * 2.0 * log_term / 1000.0) + 4.0 * 1.5 * 10.0 * log_term / (3.0 * 1000.0);
    CHECK(eps_stat(2.0, 1.5, 10.0, 1000, 0.05, 8, 4) == doctest::Approx(expected).epsilon(1e-14));

    CHECK_THROWS(eps_stat(1.0, 1.0, 10.0, 0, 0.05, 8, 4));
    CHECK_THROWS(eps_stat(1.0, 1.0, 10.0, 100, 1.0, 8, 4));
    CHECK_THROWS(eps_stat(1.0, 1.0, 10.0, 100, 0.0, 8, 4));
}

TEST_CASE("bound right-hand sides: limits, worked example, recomputation") {
    // With all approximation errors zero the remaining terms are pure
    // n^{-1/2}, so quadrupling n halves the bound exactly and it vanishes in
    // the data limit.
    const double at_n = msbo_bound_rhs(1.0, 0.0, 0.0, 10.0, 0.9, 250000000, 0.05, 8, 8);
    const double at_4n = msbo_bound_rhs(1.0, 0.0, 0.0, 10.0, 0.9, 1000000000, 0.05, 8, 8);
    CHECK(at_n == doctest::Approx(2.0 * at_4n).epsilon(1e-12));
    CHECK(at_4n < 1.0);
    CHECK(mabo_bound_rhs(0.0, 0.0, 0.0, 0.9) == 0.0);

    // 2 * (1 + 2 + 3) / (1 - 0.5) = 24.
    CHECK(mabo_bound_rhs(1.0, 2.0, 3.0, 0.5) == doctest::Approx(24.0));

    // Independent transcription of the explicit-constant form.
    const double v2 = 100.0, n = 5000.0;
    const double lq = std::log(2.0 * 6 / 0.1), lqf = std::log(8.0 * 6 * 7 / 0.1);
    const double expected = 2.0 * std::sqrt(3.0) / 0.1 *
                            (std::sqrt(2.0 * 0.4) + std::sqrt(2.0 * 0.7) +
                             std::sqrt(24.0 * v2 * lq / n) + std::sqrt(172.0 * v2 * lqf / n) +
                             std::pow(32.0 * v2 * lq * 0.4 / n, 0.25) +
                             std::pow(3824.0 * v2 * lqf * 0.7 / n, 0.25));
    CHECK(msbo_bound_rhs(3.0, 0.4, 0.7, 10.0, 0.9, 5000, 0.1, 6, 7) ==
          doctest::Approx(expected).epsilon(1e-13));

    BoundReport report;
    report.n = 100;
    CHECK_THROWS_AS(bound_rhs(report), std::invalid_argument);
}

TEST_CASE("suboptimality: chosen best member and singleton give zero") {
    CounterRng rng(37);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const QClass lone = random_class(rng, mdp, 1);
    CHECK(suboptimality(mdp, lone, lone.member(0)) == doctest::Approx(0.0).epsilon(1e-12));

    const QClass cls = random_class(rng, mdp, 5);
    int best = 0;
    double best_j = -1e300;
    for (int i = 0; i < cls.size(); ++i) {
        const double j = expected_return(mdp, greedy_policy(cls.member(i)));
        if (j > best_j) {
            best_j = j;
            best = i;
        }
    }
    CHECK(suboptimality(mdp, cls, cls.member(best)) < 1e-12);

    // Exhaustive oracle over the deduplicated greedy policies.
    const QFunction some = cls.member(2);
    double oracle_best = -1e300;
    for (const auto& pi : greedy_policies(cls)) oracle_best = std::max(oracle_best, expected_return(mdp, pi));
    const double expected = oracle_best - expected_return(mdp, greedy_policy(some));
    CHECK(suboptimality(mdp, cls, some) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("eps_w never increases when the weight class grows") {
    CounterRng rng(41);
    const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const QClass cls = random_class(rng, mdp, 4);

    std::vector<WeightFunction> base;
    for (int i = 0; i < 2; ++i) {
        WeightFunction w(4, 2, 0.0);
        for (auto& v : w.data) v = 2.0 * rng.next_double() - 1.0;
        base.push_back(w);
    }
    const double before = eps_w(mdp, mu, cls, WClass(base));
    // Add two more members, including one exact weight.
    base.push_back(importance_weight(mdp, greedy_policies(cls)[0], mu));
    WeightFunction extra(4, 2, 0.0);
    for (auto& v : extra.data) v = 2.0 * rng.next_double() - 1.0;
    base.push_back(std::move(extra));
    const double after = eps_w(mdp, mu, cls, WClass(base));
    CHECK(after <= before + 1e-10);
}
