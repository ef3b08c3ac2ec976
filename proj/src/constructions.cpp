#include "brl/constructions.hpp"

#include "brl/linalg.hpp"
#include "brl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace brl {

std::pair<TabularMdp, DataDistribution> chain_mdp(int length, double gamma) {
    if (length < 1) throw std::invalid_argument("chain_mdp: length must be at least 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("chain_mdp: gamma must be in (0,1)");
    const int n = length + 1;
    std::vector<double> transition(static_cast<std::size_t>(n) * n, 0.0);
    for (int s = 0; s < length; ++s) transition[static_cast<std::size_t>(s) * n + s + 1] = 1.0;
    transition[static_cast<std::size_t>(length) * n + length] = 1.0;
    std::vector<double> reward(static_cast<std::size_t>(n), 0.0);
    std::vector<double> d0(static_cast<std::size_t>(n), 0.0);
    d0[0] = 1.0;
    TabularMdp mdp(n, 1, std::move(transition), std::move(reward), gamma, std::move(d0), 0.0);

    DeterministicPolicy only;
    only.action.assign(static_cast<std::size_t>(n), 0);
    DataDistribution mu = DataDistribution::from_occupancy(mdp, only);
    return {std::move(mdp), std::move(mu)};
}

double chain_per_step_formula(int length, double gamma, int t) {
    if (t < 0) throw std::invalid_argument("chain_per_step_formula: t must be nonnegative");
    double mass;
    if (t < length) {
        mass = 1.0 - gamma;
        for (int i = 0; i < t; ++i) mass *= gamma;
    } else {
        mass = gamma;
        for (int i = 1; i < length; ++i) mass *= gamma;
    }
    return 1.0 / mass;
}

std::pair<TabularMdp, BatchDataset> two_state_counterexample(int tuple_count, double gamma) {
    if (tuple_count < 1) throw std::invalid_argument("two_state_counterexample: need at least one tuple");
    std::vector<double> transition = {0.0, 1.0,  // s0 -> s1
                                      0.0, 1.0}; // s1 absorbing
    TabularMdp mdp(2, 1, std::move(transition), {0.0, 0.0}, gamma, {1.0, 0.0}, 0.0);
    BatchDataset data;
    data.seed = 0;
    data.tuples.assign(static_cast<std::size_t>(tuple_count), {0, 0, 0.0, 1});
    return {std::move(mdp), std::move(data)};
}

namespace {

std::vector<double> random_simplex_point(CounterRng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (auto& x : v) {
        x = -std::log(1.0 - rng.next_double());
        sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
}

} // namespace

std::pair<LowRankMdpSpec, TabularMdp> random_lowrank_mdp(int num_states, int num_actions, int k,
                                                         std::uint64_t seed, double gamma,
                                                         double r_max) {
    if (k < 1 || k > num_states || k > num_states * num_actions)
        throw std::invalid_argument("random_lowrank_mdp: k out of range");
    CounterRng rng(seed);
    const int sa = num_states * num_actions;

    LowRankMdpSpec spec;
    spec.latent_dim = k;
    spec.left.reserve(static_cast<std::size_t>(sa));
    for (int i = 0; i < sa; ++i) spec.left.push_back(random_simplex_point(rng, k));
    spec.right.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) spec.right.push_back(random_simplex_point(rng, num_states));

    std::vector<double> transition(static_cast<std::size_t>(sa) * num_states, 0.0);
    for (int i = 0; i < sa; ++i) {
        double row_sum = 0.0;
        for (int sp = 0; sp < num_states; ++sp) {
            double v = 0.0;
            for (int j = 0; j < k; ++j)
                v += spec.left[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     spec.right[static_cast<std::size_t>(j)][static_cast<std::size_t>(sp)];
            transition[static_cast<std::size_t>(i) * num_states + sp] = v;
            row_sum += v;
        }
        // Normalize away accumulation error so the row is stochastic to full
        // precision; fold the same scaling into the stored left factor.
        for (int sp = 0; sp < num_states; ++sp)
            transition[static_cast<std::size_t>(i) * num_states + sp] /= row_sum;
        for (int j = 0; j < k; ++j) spec.left[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= row_sum;
    }

    std::vector<double> reward(static_cast<std::size_t>(sa));
    for (auto& r : reward) r = r_max * rng.next_double();
    std::vector<double> d0 = random_simplex_point(rng, num_states);
    TabularMdp mdp(num_states, num_actions, std::move(transition), std::move(reward), gamma,
                   std::move(d0), r_max);
    return {std::move(spec), std::move(mdp)};
}

TabularMdp random_mdp(int num_states, int num_actions, double gamma, std::uint64_t seed,
                      double r_max) {
    CounterRng rng(seed);
    const int sa = num_states * num_actions;
    std::vector<double> transition;
    transition.reserve(static_cast<std::size_t>(sa) * num_states);
    for (int i = 0; i < sa; ++i) {
        const std::vector<double> row = random_simplex_point(rng, num_states);
        transition.insert(transition.end(), row.begin(), row.end());
    }
    std::vector<double> reward(static_cast<std::size_t>(sa));
    for (auto& r : reward) r = r_max * rng.next_double();
    std::vector<double> d0 = random_simplex_point(rng, num_states);
    return TabularMdp(num_states, num_actions, std::move(transition), std::move(reward), gamma,
                      std::move(d0), r_max);
}

QFunction random_q_function(int num_states, int num_actions, double v_max, std::uint64_t seed) {
    CounterRng rng(seed);
    QFunction q(num_states, num_actions, 0.0);
    for (auto& v : q.data) v = v_max * rng.next_double();
    return q;
}

std::vector<std::vector<double>> occupancy_matrix(const TabularMdp& mdp,
                                                  const std::vector<DeterministicPolicy>& policies) {
    std::vector<std::vector<double>> rows;
    rows.reserve(policies.size());
    for (const auto& pi : policies) rows.push_back(compute_occupancy(mdp, pi).state);
    return rows;
}

namespace {

constexpr double kSwapGrowth = 1.0 + 1e-9;
constexpr double kRankTol = 1e-8;

// Coefficients beta with y = sum_j beta_j selected_j, both in projected coords.
std::vector<double> represent(const std::vector<std::vector<double>>& selected,
                              const std::vector<double>& y) {
    const int r = static_cast<int>(selected.size());
    std::vector<double> a(static_cast<std::size_t>(r) * r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            a[static_cast<std::size_t>(i) * r + j] = selected[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    return solve_dense(std::move(a), y, r);
}

} // namespace

SpannerSelection barycentric_select(const std::vector<std::vector<double>>& rows, int target_dim) {
    if (rows.empty()) throw std::invalid_argument("barycentric_select: no rows");
    const RowBasis basis = orthonormal_row_basis(rows, kRankTol);
    if (basis.rank == 0) throw std::runtime_error("barycentric_select: all rows numerically zero");
    if (basis.rank > target_dim)
        throw std::invalid_argument("barycentric_select: rows exceed the requested dimension");
    const int r = basis.rank; // may be below target_dim; then fewer rows are selected

    std::vector<std::vector<double>> projected;
    projected.reserve(rows.size());
    for (const auto& row : rows) projected.push_back(project_coordinates(basis, row));

    // Greedy volume maximization: repeatedly take the row with the largest
    // component orthogonal to the span of the current selection.
    std::vector<int> chosen;
    std::vector<std::vector<double>> chosen_basis;
    for (int step = 0; step < r; ++step) {
        RowBasis partial;
        partial.basis = chosen_basis;
        partial.rank = static_cast<int>(chosen_basis.size());
        int best = -1;
        double best_residual = 0.0;
        for (std::size_t i = 0; i < projected.size(); ++i) {
            const double res = projection_residual(partial, projected[i]);
            if (res > best_residual) {
                best_residual = res;
                best = static_cast<int>(i);
            }
        }
        if (best < 0) throw std::runtime_error("barycentric_select: greedy selection stalled");
        chosen.push_back(best);
        // Re-orthogonalize the new direction against the accepted ones.
        std::vector<double> dir = projected[static_cast<std::size_t>(best)];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : chosen_basis) {
                const double c = dot(q, dir);
                for (std::size_t t = 0; t < dir.size(); ++t) dir[t] -= c * q[t];
            }
        const double nrm = norm2(dir);
        for (auto& x : dir) x /= nrm;
        chosen_basis.push_back(std::move(dir));
    }

    // Swap refinement: replacing selected row j by row i scales the selected
    // volume by |beta_j| of i's representation, so any coefficient beyond the
    // growth threshold indicates an improving swap.
    auto selected_rows = [&] {
        std::vector<std::vector<double>> sel;
        sel.reserve(chosen.size());
        for (int idx : chosen) sel.push_back(projected[static_cast<std::size_t>(idx)]);
        return sel;
    };
    for (int rounds = 0;; ++rounds) {
        if (rounds > 10000) throw std::runtime_error("barycentric_select: swap refinement did not settle");
        bool swapped = false;
        const auto sel = selected_rows();
        for (std::size_t i = 0; i < projected.size() && !swapped; ++i) {
            const std::vector<double> beta = represent(sel, projected[i]);
            for (int j = 0; j < r; ++j) {
                if (std::fabs(beta[static_cast<std::size_t>(j)]) > kSwapGrowth) {
                    chosen[static_cast<std::size_t>(j)] = static_cast<int>(i);
                    swapped = true;
                    break;
                }
            }
        }
        if (!swapped) break;
    }

    SpannerSelection out;
    out.row_indices = chosen;
    const auto sel = selected_rows();
    out.coefficients.reserve(rows.size());
    double worst = 1.0;
    for (const auto& y : projected) {
        std::vector<double> beta = represent(sel, y);
        for (double b : beta) worst = std::max(worst, std::fabs(b));
        out.coefficients.push_back(std::move(beta));
    }
    out.approximation_ratio = worst;
    return out;
}

WClass build_w_occupancy_spanner(const TabularMdp& mdp, const DataDistribution& mu,
                                 const QClass& q_class) {
    const std::vector<DeterministicPolicy> policies = greedy_policies(q_class);
    const std::vector<std::vector<double>> stack = occupancy_matrix(mdp, policies);
    const SpannerSelection sel = barycentric_select(stack, mdp.num_states());
    const double scale = static_cast<double>(sel.row_indices.size());

    std::vector<WeightFunction> members;
    members.reserve(sel.row_indices.size() * policies.size());
    for (int idx : sel.row_indices) {
        const std::vector<double>& eta = stack[static_cast<std::size_t>(idx)];
        for (const auto& pi : policies) {
            WeightFunction w(mdp.num_states(), mdp.num_actions(), 0.0);
            for (int s = 0; s < mdp.num_states(); ++s)
                w(s, pi(s)) = scale * eta[static_cast<std::size_t>(s)] / mu(s, pi(s));
            members.push_back(std::move(w));
        }
    }
    return WClass(std::move(members));
}

WClass build_w_feature_projected(const LowRankMdpSpec& spec, const TabularMdp& mdp,
                                 const DataDistribution& mu, const LinearQClass& linear_q) {
    const QClass members = linear_q_members(linear_q, mdp);
    const std::vector<DeterministicPolicy> policies = greedy_policies(members);

    // Row per policy: occupancy projected onto the [phi | R] columns.
    std::vector<std::vector<double>> stack;
    stack.reserve(policies.size());
    std::vector<WeightFunction> weights;
    weights.reserve(policies.size());
    const int kp = spec.latent_dim + 1;
    for (const auto& pi : policies) {
        weights.push_back(importance_weight(mdp, pi, mu));
        const WeightFunction& w = weights.back();
        std::vector<double> row(static_cast<std::size_t>(kp), 0.0);
        std::size_t idx = 0;
        for (int s = 0; s < mdp.num_states(); ++s)
            for (int a = 0; a < mdp.num_actions(); ++a, ++idx)
                for (int j = 0; j < kp; ++j)
                    row[static_cast<std::size_t>(j)] +=
                        w(s, a) * mu(s, a) * linear_q.feature_rows()[idx][static_cast<std::size_t>(j)];
        stack.push_back(std::move(row));
    }

    const SpannerSelection sel = barycentric_select(stack, kp);
    const double scale = static_cast<double>(sel.row_indices.size());
    std::vector<WeightFunction> chosen;
    chosen.reserve(sel.row_indices.size());
    for (int idx : sel.row_indices) {
        WeightFunction w = weights[static_cast<std::size_t>(idx)];
        for (auto& v : w.data) v *= scale;
        chosen.push_back(std::move(w));
    }
    return WClass(std::move(chosen));
}

TabularMdp contextual_bandit_mdp(int num_states, double gamma) {
    if (num_states < 2) throw std::invalid_argument("contextual_bandit_mdp: need at least 2 states");
    const int n = num_states, last = num_states - 1;
    std::vector<double> transition(static_cast<std::size_t>(n) * 2 * n, 0.0);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < 2; ++a)
            transition[(static_cast<std::size_t>(s) * 2 + a) * n + last] = 1.0;
    std::vector<double> reward(static_cast<std::size_t>(n) * 2, 0.0);
    std::vector<double> d0(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < last; ++s) d0[static_cast<std::size_t>(s)] = 1.0 / last;
    return TabularMdp(n, 2, std::move(transition), std::move(reward), gamma, std::move(d0), 0.0);
}

std::vector<DeterministicPolicy> single_deviation_policies(int num_states) {
    if (num_states < 2) throw std::invalid_argument("single_deviation_policies: need at least 2 states");
    std::vector<DeterministicPolicy> out;
    out.reserve(static_cast<std::size_t>(num_states) - 1);
    for (int dev = 0; dev < num_states - 1; ++dev) {
        DeterministicPolicy pi;
        pi.action.assign(static_cast<std::size_t>(num_states), 1);
        pi.action[static_cast<std::size_t>(dev)] = 0;
        out.push_back(std::move(pi));
    }
    return out;
}

} // namespace brl
