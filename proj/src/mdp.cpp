#include "brl/mdp.hpp"

#include "brl/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace brl {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kOccupancyResidualTol = 1e-8;
constexpr double kOccupancyMassTol = 1e-10;

bool is_distribution(const std::vector<double>& v, double tol) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) return false;
        sum += x;
    }
    return std::fabs(sum - 1.0) <= tol;
}

} // namespace

int max_state_actions() {
    // Read per call: model construction is rare and tests override the cap.
    if (const char* env = std::getenv("BRL_MAX_STATE_ACTIONS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(v);
    }
    return 10000;
}

double QFunction::state_value(int s) const {
    double best = (*this)(s, 0);
    for (int a = 1; a < num_actions; ++a) best = std::max(best, (*this)(s, a));
    return best;
}

double OccupancyMeasure::total_mass() const {
    double sum = 0.0;
    for (double x : state) sum += x;
    return sum;
}

TabularMdp::TabularMdp(int num_states, int num_actions, std::vector<double> transition,
                       std::vector<double> reward, double gamma, std::vector<double> init_dist,
                       double r_max)
    : s_(num_states), a_(num_actions), transition_(std::move(transition)),
      reward_(std::move(reward)), gamma_(gamma), init_dist_(std::move(init_dist)),
      r_max_(r_max) {
    validate();
}

void TabularMdp::validate() const {
    if (s_ <= 0 || a_ <= 0) throw std::invalid_argument("TabularMdp: state/action counts must be positive");
    if (static_cast<long long>(s_) * a_ > max_state_actions())
        throw std::invalid_argument("TabularMdp: |S|*|A| exceeds the dense-size cap (" +
                                    std::to_string(max_state_actions()) +
                                    "); set BRL_MAX_STATE_ACTIONS to raise it");
    const std::size_t sa = static_cast<std::size_t>(s_) * a_;
    if (transition_.size() != sa * s_) throw std::invalid_argument("TabularMdp: transition shape mismatch");
    if (reward_.size() != sa) throw std::invalid_argument("TabularMdp: reward shape mismatch");
    if (init_dist_.size() != static_cast<std::size_t>(s_))
        throw std::invalid_argument("TabularMdp: init_dist shape mismatch");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw std::invalid_argument("TabularMdp: gamma must be in [0,1)");
    if (!(r_max_ >= 0.0)) throw std::invalid_argument("TabularMdp: r_max must be nonnegative");

    for (int s = 0; s < s_; ++s) {
        for (int a = 0; a < a_; ++a) {
            double sum = 0.0;
            for (int t = 0; t < s_; ++t) {
                const double v = p(s, a, t);
                if (!(v >= 0.0)) throw std::invalid_argument("TabularMdp: negative transition probability");
                sum += v;
            }
            if (std::fabs(sum - 1.0) > kRowSumTol)
                throw std::invalid_argument("TabularMdp: transition row (" + std::to_string(s) + "," +
                                            std::to_string(a) + ") does not sum to 1");
            const double rv = r(s, a);
            if (!(rv >= 0.0 && rv <= r_max_))
                throw std::invalid_argument("TabularMdp: reward outside [0, r_max]");
        }
    }
    if (!is_distribution(init_dist_, kRowSumTol))
        throw std::invalid_argument("TabularMdp: init_dist is not a probability distribution");
}

void validate_policy(const TabularMdp& mdp, const DeterministicPolicy& policy) {
    if (policy.num_states() != mdp.num_states())
        throw std::invalid_argument("policy: state count mismatch");
    for (int a : policy.action)
        if (a < 0 || a >= mdp.num_actions()) throw std::invalid_argument("policy: action index out of range");
}

OccupancyMeasure compute_occupancy(const TabularMdp& mdp, const DeterministicPolicy& policy) {
    validate_policy(mdp, policy);
    const int n = mdp.num_states();
    const double gamma = mdp.gamma();

    // Row s' of the system: nu(s') - gamma * sum_s P(s'|s,pi(s)) nu(s) = (1-gamma) d0(s').
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> b(n);
    for (int sp = 0; sp < n; ++sp) {
        a[static_cast<std::size_t>(sp) * n + sp] = 1.0;
        for (int s = 0; s < n; ++s)
            a[static_cast<std::size_t>(sp) * n + s] -= gamma * mdp.p(s, policy(s), sp);
        b[sp] = (1.0 - gamma) * mdp.init_dist()[sp];
    }
    const std::vector<double> a_copy = a;
    const std::vector<double> b_copy = b;
    std::vector<double> nu = solve_dense(std::move(a), std::move(b), n);

    if (solve_residual(a_copy, nu, b_copy, n) > kOccupancyResidualTol)
        throw std::runtime_error("compute_occupancy: linear solve residual above tolerance");

    OccupancyMeasure out;
    out.kind = OccupancyMeasure::Kind::state_action;
    out.state.assign(n, 0.0);
    out.dist = StateActionTable(n, mdp.num_actions(), 0.0);
    double mass = 0.0;
    for (int s = 0; s < n; ++s) {
        double v = nu[s];
        if (v < 0.0) {
            if (v < -kOccupancyMassTol)
                throw std::runtime_error("compute_occupancy: negative occupancy entry");
            v = 0.0;
        }
        out.state[s] = v;
        out.dist(s, policy(s)) = v;
        mass += v;
    }
    if (std::fabs(mass - 1.0) > kOccupancyMassTol)
        throw std::runtime_error("compute_occupancy: occupancy mass deviates from 1");
    return out;
}

OccupancyMeasure compute_step_marginal(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                       int t) {
    validate_policy(mdp, policy);
    if (t < 0) throw std::invalid_argument("compute_step_marginal: t must be nonnegative");
    const int n = mdp.num_states();

    std::vector<double> cur = mdp.init_dist();
    std::vector<double> next(n);
    for (int step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int s = 0; s < n; ++s) {
            if (cur[s] == 0.0) continue;
            for (int sp = 0; sp < n; ++sp) next[sp] += cur[s] * mdp.p(s, policy(s), sp);
        }
        cur.swap(next);
    }

    OccupancyMeasure out;
    out.kind = OccupancyMeasure::Kind::state_action;
    out.state = cur;
    out.dist = StateActionTable(n, mdp.num_actions(), 0.0);
    for (int s = 0; s < n; ++s) out.dist(s, policy(s)) = cur[s];
    return out;
}

QFunction bellman_optimality(const TabularMdp& mdp, const QFunction& q) {
    if (q.num_states != mdp.num_states() || q.num_actions != mdp.num_actions())
        throw std::invalid_argument("bellman_optimality: q shape mismatch");
    QFunction out(mdp.num_states(), mdp.num_actions());
    std::vector<double> v(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) v[s] = q.state_value(s);
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            double cont = 0.0;
            for (int sp = 0; sp < mdp.num_states(); ++sp) cont += mdp.p(s, a, sp) * v[sp];
            out(s, a) = mdp.r(s, a) + mdp.gamma() * cont;
        }
    }
    return out;
}

DeterministicPolicy greedy_policy(const QFunction& q) {
    DeterministicPolicy pi;
    pi.action.resize(q.num_states, 0);
    for (int s = 0; s < q.num_states; ++s) {
        int best = 0;
        for (int a = 1; a < q.num_actions; ++a)
            if (q(s, a) > q(s, best)) best = a;
        pi.action[s] = best;
    }
    return pi;
}

double expected_return(const TabularMdp& mdp, const DeterministicPolicy& policy) {
    const OccupancyMeasure occ = compute_occupancy(mdp, policy);
    double acc = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) acc += occ.state[s] * mdp.r(s, policy(s));
    return acc / (1.0 - mdp.gamma());
}

double telescoping_residual(const TabularMdp& mdp, const DeterministicPolicy& policy,
                            const QFunction& q) {
    validate_policy(mdp, policy);
    const OccupancyMeasure occ = compute_occupancy(mdp, policy);

    double j_pi = 0.0;
    double lhs = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        lhs += mdp.init_dist()[s] * q(s, policy(s));
        j_pi += occ.state[s] * mdp.r(s, policy(s));
    }
    j_pi /= 1.0 - mdp.gamma();

    double rhs = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        const int a = policy(s);
        double next_q = 0.0;
        for (int sp = 0; sp < mdp.num_states(); ++sp)
            next_q += mdp.p(s, a, sp) * q(sp, policy(sp));
        rhs += occ.state[s] * (q(s, a) - mdp.r(s, a) - mdp.gamma() * next_q);
    }
    rhs /= 1.0 - mdp.gamma();

    return (lhs - j_pi) - rhs;
}

QFunction optimal_q(const TabularMdp& mdp, double tol) {
    QFunction q(mdp.num_states(), mdp.num_actions(), 0.0);
    const double gamma = mdp.gamma();
    // ||Q_k - Q*|| <= gamma/(1-gamma) ||Q_k - Q_{k-1}||, so iterate until the
    // contraction bound certifies the requested accuracy.
    const double stop = (gamma > 0.0) ? tol * (1.0 - gamma) / gamma : 0.0;
    for (int iter = 0; iter < 100000000; ++iter) {
        QFunction next = bellman_optimality(mdp, q);
        double diff = 0.0;
        for (int i = 0; i < q.size(); ++i)
            diff = std::max(diff, std::fabs(next.data[i] - q.data[i]));
        q = std::move(next);
        if (diff <= stop || diff == 0.0) break;
    }
    return q;
}

} // namespace brl
