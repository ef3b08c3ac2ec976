#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "brl/batch.hpp"
#include "brl/constructions.hpp"
#include "brl/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

using namespace brl;

namespace {

DeterministicPolicy make_policy(std::vector<int> actions) {
    DeterministicPolicy pi;
    pi.action = std::move(actions);
    return pi;
}

} // namespace

TEST_CASE("data distribution rejects zero entries and bad mass") {
    StateActionTable t(2, 1, 0.5);
    CHECK_NOTHROW(DataDistribution{t});
    t(0, 0) = 0.0;
    t(1, 0) = 1.0;
    CHECK_THROWS(DataDistribution{t});
    t(0, 0) = 0.5;
    CHECK_THROWS(DataDistribution{t}); // sums to 1.5
}

TEST_CASE("generate_batch: deterministic chain produces the unique successor") {
    const auto [mdp, mu] = chain_mdp(3, 0.8);
    const BatchDataset data = generate_batch(mdp, mu, 1, 7);
    REQUIRE(data.n() == 1);
    CHECK(data.tuples[0].s_next == data.tuples[0].s + 1);
    CHECK(data.tuples[0].r == 0.0);
}

TEST_CASE("generate_batch: empirical pair frequencies match mu within 3 sigma") {
    const TabularMdp mdp = random_mdp(2, 2, 0.9, 19);
    const DataDistribution mu = DataDistribution::uniform(2, 2);
    const int n = 100000;
    const BatchDataset data = generate_batch(mdp, mu, n, 11);
    std::vector<int> counts(4, 0);
    for (const auto& t : data.tuples) ++counts[static_cast<std::size_t>(t.s * 2 + t.a)];
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    for (int k = 0; k < 4; ++k)
        CHECK(std::fabs(counts[static_cast<std::size_t>(k)] / static_cast<double>(n) - 0.25) < 3 * sigma);
}

TEST_CASE("generate_batch is deterministic per seed and rewards are exact") {
    const TabularMdp mdp = random_mdp(3, 2, 0.9, 23);
    const DataDistribution mu = DataDistribution::uniform(3, 2);
    const BatchDataset a = generate_batch(mdp, mu, 500, 99);
    const BatchDataset b = generate_batch(mdp, mu, 500, 99);
    REQUIRE(a.n() == b.n());
    for (int i = 0; i < a.n(); ++i) {
        const auto& x = a.tuples[static_cast<std::size_t>(i)];
        const auto& y = b.tuples[static_cast<std::size_t>(i)];
        CHECK(x.s == y.s);
        CHECK(x.a == y.a);
        CHECK(x.s_next == y.s_next);
        CHECK(x.r == mdp.r(x.s, x.a)); // exact equality by contract
    }
    const BatchDataset c = generate_batch(mdp, mu, 500, 100);
    bool any_different = false;
    for (int i = 0; i < a.n() && !any_different; ++i)
        any_different = a.tuples[static_cast<std::size_t>(i)].s != c.tuples[static_cast<std::size_t>(i)].s ||
                        a.tuples[static_cast<std::size_t>(i)].a != c.tuples[static_cast<std::size_t>(i)].a;
    CHECK(any_different);
}

TEST_CASE("importance weight of the logging policy is identically one on its support") {
    const auto [chain, chain_mu] = chain_mdp(4, 0.9);
    DeterministicPolicy only = make_policy({0, 0, 0, 0, 0});
    const WeightFunction w = importance_weight(chain, only, chain_mu);
    double max_w = 0.0, sq = 0.0;
    for (int s = 0; s < chain.num_states(); ++s) {
        CHECK(w(s, 0) == doctest::Approx(1.0).epsilon(1e-12));
        max_w = std::max(max_w, std::fabs(w(s, 0)));
        sq += chain_mu(s, 0) * w(s, 0) * w(s, 0);
    }
    CHECK(max_w == doctest::Approx(1.0));
    CHECK(sq == doctest::Approx(1.0));
}

TEST_CASE("importance weight changes measure exactly") {
    CounterRng rng(5);
    const TabularMdp mdp = random_mdp(4, 3, 0.85, rng.next_u64());
    const DataDistribution mu = DataDistribution::uniform(4, 3);
    const DeterministicPolicy pi = make_policy({2, 0, 1, 2});
    const WeightFunction w = importance_weight(mdp, pi, mu);
    const OccupancyMeasure occ = compute_occupancy(mdp, pi);

    double mean_w = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 3; ++a) mean_w += mu(s, a) * w(s, a);
    CHECK(mean_w == doctest::Approx(1.0).epsilon(1e-10));

    for (int trial = 0; trial < 20; ++trial) {
        StateActionTable f(4, 3, 0.0);
        for (auto& v : f.data) v = 2.0 * rng.next_double() - 1.0;
        double lhs = 0.0, rhs = 0.0;
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 3; ++a) {
                lhs += mu(s, a) * w(s, a) * f(s, a);
                rhs += occ.dist(s, a) * f(s, a);
            }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("empirical squared loss on a single tuple") {
    BatchDataset data;
    data.tuples.push_back({0, 0, 0.7, 1});
    QFunction q(2, 1, 0.0);
    q(0, 0) = 1.5;
    const QFunction target(2, 1, 0.0);
    CHECK(empirical_sq_loss(data, 0.9, q, target) == doctest::Approx((1.5 - 0.7) * (1.5 - 0.7)));
    CHECK_THROWS(empirical_sq_loss(BatchDataset{}, 0.9, q, target));
}

TEST_CASE("squared losses vanish at the fixed point of a deterministic mdp") {
    const auto [mdp, mu_chain] = chain_mdp(3, 0.9);
    // Give the chain nonzero rewards so the fixed point is nontrivial.
    std::vector<double> reward = {0.3, 0.1, 0.2, 0.0};
    TabularMdp rewarded(4, 1, mdp.transition(), reward, 0.9, mdp.init_dist(), 0.3);
    const QFunction q_star = optimal_q(rewarded);
    const BatchDataset data = generate_batch(rewarded, mu_chain, 200, 3);
    CHECK(empirical_sq_loss(data, 0.9, q_star, q_star) < 1e-20);
    CHECK(population_sq_loss(rewarded, mu_chain, q_star, q_star) < 1e-20);
}

TEST_CASE("population squared loss equals the weighted residual in deterministic mdps") {
    const auto [mdp, mu] = chain_mdp(4, 0.8);
    CounterRng rng(17);
    const QFunction q = random_q_function(5, 1, 4.0, rng.next_u64());
    const QFunction target = random_q_function(5, 1, 4.0, rng.next_u64());
    double expected = 0.0;
    for (int s = 0; s < 5; ++s) {
        const int succ = s < 4 ? s + 1 : 4;
        const double td = q(s, 0) - mdp.r(s, 0) - 0.8 * target(succ, 0);
        expected += mu(s, 0) * td * td;
    }
    CHECK(population_sq_loss(mdp, mu, q, target) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("population squared loss at the fixed point is the conditional variance term") {
    const TabularMdp mdp = random_mdp(4, 2, 0.9, 41);
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const QFunction q_star = optimal_q(mdp);
    double variance_term = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) {
            double mean = 0.0, second = 0.0;
            for (int sp = 0; sp < 4; ++sp) {
                const double v = q_star.state_value(sp);
                mean += mdp.p(s, a, sp) * v;
                second += mdp.p(s, a, sp) * v * v;
            }
            variance_term += mu(s, a) * 0.81 * (second - mean * mean);
        }
    CHECK(population_sq_loss(mdp, mu, q_star, q_star) == doctest::Approx(variance_term).epsilon(1e-10));
}

TEST_CASE("empirical squared loss converges to the population value") {
    const TabularMdp mdp = random_mdp(4, 2, 0.9, 47);
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    CounterRng rng(53);
    const QFunction q = random_q_function(4, 2, mdp.v_max(), rng.next_u64());
    const QFunction target = random_q_function(4, 2, mdp.v_max(), rng.next_u64());

    const int n = 1000000;
    const BatchDataset data = generate_batch(mdp, mu, n, 2222);
    const double emp = empirical_sq_loss(data, 0.9, q, target);
    const double pop = population_sq_loss(mdp, mu, q, target);

    // Sample standard deviation of the per-tuple squared TD error.
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& t : data.tuples) {
        const double td = q(t.s, t.a) - t.r - 0.9 * target.state_value(t.s_next);
        sum += td * td;
        sum_sq += td * td * td * td;
    }
    const double mean = sum / n;
    const double sigma = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::fabs(emp - pop) < 3 * sigma + 1e-9);
}

TEST_CASE("average losses: unit weights, fixed point, and Monte-Carlo agreement") {
    const TabularMdp mdp = random_mdp(3, 2, 0.9, 61);
    const DataDistribution mu = DataDistribution::uniform(3, 2);
    CounterRng rng(67);
    const QFunction q = random_q_function(3, 2, mdp.v_max(), rng.next_u64());
    const WeightFunction ones(3, 2, 1.0);

    const BatchDataset data = generate_batch(mdp, mu, 1000000, 4444);
    double plain = 0.0;
    for (const auto& t : data.tuples) plain += t.r + 0.9 * q.state_value(t.s_next) - q(t.s, t.a);
    plain /= data.n();
    CHECK(empirical_avg_loss(data, 0.9, q, ones) == doctest::Approx(plain).epsilon(1e-12));

    const QFunction q_star = optimal_q(mdp);
    WeightFunction w(3, 2, 0.0);
    for (auto& v : w.data) v = 4.0 * rng.next_double() - 2.0;
    CHECK(std::fabs(population_avg_loss(mdp, mu, q_star, w)) < 1e-10);

    const double pop = population_avg_loss(mdp, mu, q, w);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& t : data.tuples) {
        const double x = w(t.s, t.a) * (t.r + 0.9 * q.state_value(t.s_next) - q(t.s, t.a));
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / data.n();
    const double sigma = std::sqrt((sum_sq / data.n() - mean * mean) / data.n());
    CHECK(std::fabs(empirical_avg_loss(data, 0.9, q, w) - pop) < 3 * sigma + 1e-9);
}

TEST_CASE("population average loss matches a reordered summation oracle") {
    const TabularMdp mdp = random_mdp(4, 3, 0.85, 71);
    const DataDistribution mu = DataDistribution::uniform(4, 3);
    CounterRng rng(73);
    const QFunction q = random_q_function(4, 3, mdp.v_max(), rng.next_u64());
    WeightFunction w(4, 3, 0.0);
    for (auto& v : w.data) v = 3.0 * rng.next_double() - 1.5;

    const QFunction backup = bellman_optimality(mdp, q);
    double reordered = 0.0;
    for (int a = 2; a >= 0; --a) // action-major, reversed
        for (int s = 3; s >= 0; --s) reordered += mu(s, a) * w(s, a) * (backup(s, a) - q(s, a));
    CHECK(population_avg_loss(mdp, mu, q, w) == doctest::Approx(reordered).epsilon(1e-12));
}

TEST_CASE("average loss with the exact importance weight is the policy's Bellman error") {
    const TabularMdp mdp = random_mdp(4, 2, 0.9, 79);
    const DataDistribution mu = DataDistribution::uniform(4, 2);
    const DeterministicPolicy pi = make_policy({1, 0, 0, 1});
    const WeightFunction w = importance_weight(mdp, pi, mu);
    CounterRng rng(81);
    const QFunction q = random_q_function(4, 2, mdp.v_max(), rng.next_u64());

    const QFunction backup = bellman_optimality(mdp, q);
    const OccupancyMeasure occ = compute_occupancy(mdp, pi);
    double direct = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int a = 0; a < 2; ++a) direct += occ.dist(s, a) * (backup(s, a) - q(s, a));
    CHECK(population_avg_loss(mdp, mu, q, w) == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("empirical average loss is unbiased for the population loss") {
    const TabularMdp mdp = random_mdp(3, 2, 0.9, 83);
    const DataDistribution mu = DataDistribution::uniform(3, 2);
    CounterRng rng(89);
    const QFunction q = random_q_function(3, 2, mdp.v_max(), rng.next_u64());
    WeightFunction w(3, 2, 0.0);
    for (auto& v : w.data) v = 2.0 * rng.next_double();

    const double pop = population_avg_loss(mdp, mu, q, w);
    const int n = 1000, seeds = 200;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < seeds; ++k) {
        const BatchDataset data = generate_batch(mdp, mu, n, 10000 + static_cast<std::uint64_t>(k));
        const double est = empirical_avg_loss(data, 0.9, q, w);
        sum += est;
        sum_sq += est * est;
    }
    const double mean = sum / seeds;
    const double sigma = std::sqrt(sum_sq / seeds - mean * mean);
    CHECK(std::fabs(mean - pop) < 4 * sigma / std::sqrt(static_cast<double>(seeds)));
}

TEST_CASE("squared loss over-estimates the true squared Bellman residual") {
    CounterRng rng(97);
    for (int trial = 0; trial < 20; ++trial) {
        const TabularMdp mdp = random_mdp(4, 2, 0.9, rng.next_u64());
        const DataDistribution mu = DataDistribution::uniform(4, 2);
        const QFunction q = random_q_function(4, 2, mdp.v_max(), rng.next_u64());
        const QFunction backup = bellman_optimality(mdp, q);
        double residual_sq = 0.0;
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) {
                const double d = q(s, a) - backup(s, a);
                residual_sq += mu(s, a) * d * d;
            }
        CHECK(population_sq_loss(mdp, mu, q, q) >= residual_sq - 1e-12);
    }

    // Equality holds exactly when transitions are deterministic.
    const auto [chain, chain_mu] = chain_mdp(3, 0.9);
    const QFunction q = random_q_function(4, 1, 1.0, rng.next_u64());
    const QFunction backup = bellman_optimality(chain, q);
    double residual_sq = 0.0;
    for (int s = 0; s < 4; ++s) {
        const double d = q(s, 0) - backup(s, 0);
        residual_sq += chain_mu(s, 0) * d * d;
    }
    CHECK(population_sq_loss(chain, chain_mu, q, q) == doctest::Approx(residual_sq).epsilon(1e-12));
}

TEST_CASE("dataset csv round-trips and validates against the model") {
    const TabularMdp mdp = random_mdp(3, 2, 0.9, 103);
    const DataDistribution mu = DataDistribution::uniform(3, 2);
    const BatchDataset data = generate_batch(mdp, mu, 50, 31337);
    const std::string path = (std::filesystem::temp_directory_path() / "brl_batch_test.csv").string();
    save_dataset_csv(data, path);
    const BatchDataset loaded = load_dataset_csv(path, mdp);
    REQUIRE(loaded.n() == data.n());
    for (int i = 0; i < data.n(); ++i) {
        CHECK(loaded.tuples[static_cast<std::size_t>(i)].s == data.tuples[static_cast<std::size_t>(i)].s);
        CHECK(loaded.tuples[static_cast<std::size_t>(i)].r == data.tuples[static_cast<std::size_t>(i)].r);
        CHECK(loaded.tuples[static_cast<std::size_t>(i)].s_next == data.tuples[static_cast<std::size_t>(i)].s_next);
    }

    // Indices outside the reference model are rejected.
    const TabularMdp small = random_mdp(2, 1, 0.9, 104);
    CHECK_THROWS(load_dataset_csv(path, small));
    std::filesystem::remove(path);
}
