#include "brl/diagnostics.hpp"

#include "brl/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace brl {

double sq_bellman_error_mu(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q) {
    const QFunction backup = bellman_optimality(mdp, q);
    double acc = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double d = backup(s, a) - q(s, a);
            acc += mu(s, a) * d * d;
        }
    }
    return acc;
}

namespace {

double weight_sq_norm(const DataDistribution& mu, const WeightFunction& w) {
    double acc = 0.0;
    for (int s = 0; s < w.num_states; ++s)
        for (int a = 0; a < w.num_actions; ++a) acc += mu(s, a) * w(s, a) * w(s, a);
    return acc;
}

double weight_max_norm(const WeightFunction& w) {
    double acc = 0.0;
    for (double v : w.data) acc = std::max(acc, std::fabs(v));
    return acc;
}

} // namespace

double c_eff(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class) {
    double best = 0.0;
    for (const auto& pi : greedy_policies(q_class))
        best = std::max(best, weight_sq_norm(mu, importance_weight(mdp, pi, mu)));
    return best;
}

double c_inf(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class) {
    double best = 0.0;
    for (const auto& pi : greedy_policies(q_class))
        best = std::max(best, weight_max_norm(importance_weight(mdp, pi, mu)));
    return best;
}

std::vector<double> per_step_coefficients(const TabularMdp& mdp, const DataDistribution& mu,
                                          const std::vector<DeterministicPolicy>& policies,
                                          int t_max) {
    if (t_max < 0) throw std::invalid_argument("per_step_coefficients: t_max must be nonnegative");
    if (policies.empty()) throw std::invalid_argument("per_step_coefficients: no policies given");
    std::vector<double> out(static_cast<std::size_t>(t_max) + 1, 0.0);
    for (const auto& pi : policies) {
        for (int t = 0; t <= t_max; ++t) {
            const OccupancyMeasure marginal = compute_step_marginal(mdp, pi, t);
            double worst = 0.0;
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a)
                    worst = std::max(worst, marginal.dist(s, a) / mu(s, a));
            out[static_cast<std::size_t>(t)] = std::max(out[static_cast<std::size_t>(t)], worst);
        }
    }
    return out;
}

std::vector<double> default_beta(double gamma, int t_max) {
    if (t_max < 0) throw std::invalid_argument("default_beta: t_max must be nonnegative");
    std::vector<double> beta(static_cast<std::size_t>(t_max) + 1);
    double v = 1.0 - gamma;
    for (int t = 0; t <= t_max; ++t) {
        beta[static_cast<std::size_t>(t)] = v;
        v *= gamma;
    }
    return beta;
}

double per_step_combined(const std::vector<double>& per_step, const std::vector<double>& beta) {
    if (per_step.size() != beta.size())
        throw std::invalid_argument("per_step_combined: length mismatch");
    if (per_step.empty()) throw std::invalid_argument("per_step_combined: empty input");
    double total = 0.0;
    for (double b : beta) {
        if (b < 0.0) throw std::invalid_argument("per_step_combined: negative beta entry");
        total += b;
    }
    if (total <= 0.0) throw std::invalid_argument("per_step_combined: beta sums to zero");
    double acc = 0.0;
    for (std::size_t t = 0; t < beta.size(); ++t) acc += (beta[t] / total) * per_step[t];
    return acc;
}

std::pair<double, double> c_w_coefficients(const WClass& w_class, const DataDistribution& mu) {
    double eff = 0.0, inf = 0.0;
    for (const auto& w : w_class.members()) {
        eff = std::max(eff, weight_sq_norm(mu, w));
        inf = std::max(inf, weight_max_norm(w));
    }
    return {eff, inf};
}

double eps_q_sq(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class) {
    double best = sq_bellman_error_mu(mdp, mu, q_class.member(0));
    for (int i = 1; i < q_class.size(); ++i)
        best = std::min(best, sq_bellman_error_mu(mdp, mu, q_class.member(i)));
    return best;
}

double eps_qf_sq(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
                 const QClass& f_class) {
    double worst = 0.0;
    for (const auto& q : q_class.members()) {
        const QFunction backup = bellman_optimality(mdp, q);
        double best = -1.0;
        for (const auto& f : f_class.members()) {
            double acc = 0.0;
            for (int s = 0; s < mdp.num_states(); ++s)
                for (int a = 0; a < mdp.num_actions(); ++a) {
                    const double d = f(s, a) - backup(s, a);
                    acc += mu(s, a) * d * d;
                }
            if (best < 0.0 || acc < best) best = acc;
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double eps_q_avg(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
                 const WClass& w_class) {
    double best = -1.0;
    for (const auto& q : q_class.members()) {
        double worst = 0.0;
        for (const auto& w : w_class.members())
            worst = std::max(worst, std::fabs(population_avg_loss(mdp, mu, q, w)));
        if (best < 0.0 || worst < best) best = worst;
    }
    return best;
}

std::pair<double, SpanCoefficients> eps_w_for_policy(const TabularMdp& mdp,
                                                     const DataDistribution& mu,
                                                     const QClass& q_class, const WClass& w_class,
                                                     const DeterministicPolicy& policy) {
    const WeightFunction w_pi = importance_weight(mdp, policy, mu);
    const int m = w_class.size();
    const int nq = q_class.size();

    // Per Q: target = <c_Q, w_pi> and member inner products <c_Q, w_i>,
    // where c_Q(s,a) = mu(s,a) (TQ - Q)(s,a).
    std::vector<double> target(static_cast<std::size_t>(nq));
    std::vector<std::vector<double>> inner(static_cast<std::size_t>(nq),
                                           std::vector<double>(static_cast<std::size_t>(m)));
    for (int qi = 0; qi < nq; ++qi) {
        const QFunction& q = q_class.member(qi);
        target[static_cast<std::size_t>(qi)] = population_avg_loss(mdp, mu, q, w_pi);
        for (int wi = 0; wi < m; ++wi)
            inner[static_cast<std::size_t>(qi)][static_cast<std::size_t>(wi)] =
                population_avg_loss(mdp, mu, q, w_class.member(wi));
    }

    // Variables (p_1..p_m, q_1..q_m, t) >= 0 with alpha = p - q; maximize -t
    // subject to +-(target_Q - sum_i alpha_i inner_Qi) <= t and sum(p+q) <= 1.
    const int nvar = 2 * m + 1;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    a.reserve(2 * static_cast<std::size_t>(nq) + 1);
    for (int qi = 0; qi < nq; ++qi) {
        std::vector<double> row_hi(static_cast<std::size_t>(nvar), 0.0);
        std::vector<double> row_lo(static_cast<std::size_t>(nvar), 0.0);
        for (int wi = 0; wi < m; ++wi) {
            const double v = inner[static_cast<std::size_t>(qi)][static_cast<std::size_t>(wi)];
            row_hi[static_cast<std::size_t>(wi)] = -v;
            row_hi[static_cast<std::size_t>(m + wi)] = v;
            row_lo[static_cast<std::size_t>(wi)] = v;
            row_lo[static_cast<std::size_t>(m + wi)] = -v;
        }
        row_hi[static_cast<std::size_t>(2 * m)] = -1.0;
        row_lo[static_cast<std::size_t>(2 * m)] = -1.0;
        a.push_back(std::move(row_hi));
        b.push_back(-target[static_cast<std::size_t>(qi)]);
        a.push_back(std::move(row_lo));
        b.push_back(target[static_cast<std::size_t>(qi)]);
    }
    std::vector<double> l1_row(static_cast<std::size_t>(nvar), 1.0);
    l1_row[static_cast<std::size_t>(2 * m)] = 0.0;
    a.push_back(std::move(l1_row));
    b.push_back(1.0);

    std::vector<double> c(static_cast<std::size_t>(nvar), 0.0);
    c[static_cast<std::size_t>(2 * m)] = -1.0;

    const LpSolution sol = SimplexLp(std::move(a), std::move(b), std::move(c)).solve();
    if (sol.status != LpStatus::optimal)
        throw std::runtime_error("eps_w_for_policy: LP solve failed (alpha = 0 is always feasible)");

    SpanCoefficients alpha;
    alpha.alpha.resize(static_cast<std::size_t>(m));
    double l1 = 0.0;
    for (int wi = 0; wi < m; ++wi) {
        alpha.alpha[static_cast<std::size_t>(wi)] =
            sol.x[static_cast<std::size_t>(wi)] - sol.x[static_cast<std::size_t>(m + wi)];
        l1 += std::fabs(alpha.alpha[static_cast<std::size_t>(wi)]);
    }
    if (l1 > 1.0) // scrub simplex round-off so the coefficients stay in the unit ball
        for (auto& v : alpha.alpha) v /= l1;

    // Report the value the returned coefficients actually achieve and require
    // it to agree with the LP optimum.
    double achieved = 0.0;
    for (int qi = 0; qi < nq; ++qi) {
        double mix = target[static_cast<std::size_t>(qi)];
        for (int wi = 0; wi < m; ++wi)
            mix -= alpha.alpha[static_cast<std::size_t>(wi)] *
                   inner[static_cast<std::size_t>(qi)][static_cast<std::size_t>(wi)];
        achieved = std::max(achieved, std::fabs(mix));
    }
    const double lp_value = std::max(0.0, -sol.objective);
    if (std::fabs(achieved - lp_value) > 1e-9)
        throw std::runtime_error("eps_w_for_policy: LP optimum not certified to 1e-9");
    return {achieved, std::move(alpha)};
}

double eps_w(const TabularMdp& mdp, const DataDistribution& mu, const QClass& q_class,
             const WClass& w_class) {
    double worst = 0.0;
    for (const auto& pi : greedy_policies(q_class))
        worst = std::max(worst, eps_w_for_policy(mdp, mu, q_class, w_class, pi).first);
    return worst;
}

double eps_stat(double c_eff_w, double c_inf_w, double v_max, int n, double delta, int q_size,
                int w_size) {
    if (n <= 0) throw std::invalid_argument("eps_stat: n must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("eps_stat: delta must be in (0,1)");
    if (q_size <= 0 || w_size <= 0) throw std::invalid_argument("eps_stat: class sizes must be positive");
    const double log_term = std::log(2.0 * q_size * w_size / delta);
    return 2.0 * v_max * std::sqrt(2.0 * c_eff_w * log_term / n) +
           4.0 * c_inf_w * v_max * log_term / (3.0 * n);
}

double msbo_bound_rhs(double c_eff_value, double eps_q_sq_value, double eps_qf_sq_value,
                      double v_max, double gamma, int n, double delta, int q_size, int f_size) {
    if (n <= 0) throw std::invalid_argument("msbo_bound_rhs: n must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("msbo_bound_rhs: delta must be in (0,1)");
    if (q_size <= 0 || f_size <= 0)
        throw std::invalid_argument("msbo_bound_rhs: class sizes must be positive");
    const double v2 = v_max * v_max;
    const double log_q = std::log(2.0 * q_size / delta);
    const double log_qf = std::log(8.0 * static_cast<double>(q_size) * f_size / delta);
    const double sum = std::sqrt(2.0 * eps_q_sq_value) + std::sqrt(2.0 * eps_qf_sq_value) +
                       std::sqrt(24.0 * v2 * log_q / n) + std::sqrt(172.0 * v2 * log_qf / n) +
                       std::pow(32.0 * v2 * log_q * eps_q_sq_value / n, 0.25) +
                       std::pow(3824.0 * v2 * log_qf * eps_qf_sq_value / n, 0.25);
    return 2.0 * std::sqrt(c_eff_value) / (1.0 - gamma) * sum;
}

double mabo_bound_rhs(double eps_q_avg_value, double eps_w_value, double eps_stat_value,
                      double gamma) {
    return 2.0 * (eps_q_avg_value + eps_w_value + eps_stat_value) / (1.0 - gamma);
}

double suboptimality(const TabularMdp& mdp, const QClass& q_class, const QFunction& chosen_q) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& pi : greedy_policies(q_class)) best = std::max(best, expected_return(mdp, pi));
    return best - expected_return(mdp, greedy_policy(chosen_q));
}

std::pair<double, double> bound_rhs(const BoundReport& report) {
    auto need = [](double v, const char* name) {
        if (std::isnan(v)) throw std::invalid_argument(std::string("bound_rhs: missing component ") + name);
        return v;
    };
    const double msbo = msbo_bound_rhs(need(report.c_eff, "c_eff"), need(report.eps_q_sq, "eps_q_sq"),
                                       need(report.eps_qf_sq, "eps_qf_sq"), need(report.v_max, "v_max"),
                                       need(report.gamma, "gamma"), report.n,
                                       need(report.delta, "delta"), report.q_size, report.f_size);
    const double mabo = mabo_bound_rhs(need(report.eps_q_avg, "eps_q_avg"), need(report.eps_w, "eps_w"),
                                       need(report.eps_stat, "eps_stat"), need(report.gamma, "gamma"));
    return {msbo, mabo};
}

} // namespace brl
