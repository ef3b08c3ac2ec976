#include "brl/classes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brl {

namespace {
constexpr double kL1Tol = 1e-12;
}

QClass::QClass(std::vector<QFunction> members, double v_max)
    : members_(std::move(members)), v_max_(v_max) {
    if (members_.empty()) throw std::invalid_argument("QClass: empty member list");
    if (!(v_max_ >= 0.0)) throw std::invalid_argument("QClass: v_max must be nonnegative");
    for (const auto& m : members_) {
        if (!m.same_shape(members_.front()))
            throw std::invalid_argument("QClass: members have inconsistent shapes");
        for (double v : m.data)
            if (!std::isfinite(v) || v < 0.0 || v > v_max_)
                throw std::invalid_argument("QClass: member entry outside [0, v_max]");
    }
}

WClass::WClass(std::vector<WeightFunction> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("WClass: empty member list");
    for (const auto& m : members_) {
        if (!m.same_shape(members_.front()))
            throw std::invalid_argument("WClass: members have inconsistent shapes");
        for (double v : m.data)
            if (!std::isfinite(v)) throw std::invalid_argument("WClass: non-finite member entry");
    }
}

double SpanCoefficients::l1_norm() const {
    double acc = 0.0;
    for (double v : alpha) acc += std::fabs(v);
    return acc;
}

void SpanCoefficients::validate() const {
    if (l1_norm() > 1.0 + kL1Tol)
        throw std::invalid_argument("SpanCoefficients: l1 norm exceeds 1");
}

WeightFunction span_evaluate(const WClass& w_class, const SpanCoefficients& alpha) {
    if (static_cast<int>(alpha.alpha.size()) != w_class.size())
        throw std::invalid_argument("span_evaluate: coefficient count does not match |W|");
    alpha.validate();
    const auto& first = w_class.member(0);
    WeightFunction out(first.num_states, first.num_actions, 0.0);
    for (int i = 0; i < w_class.size(); ++i) {
        const double c = alpha.alpha[static_cast<std::size_t>(i)];
        if (c == 0.0) continue;
        const auto& w = w_class.member(i);
        for (int j = 0; j < out.size(); ++j) out.data[j] += c * w.data[j];
    }
    return out;
}

double span_max_abs(const WClass& w_class, const StateActionTable& functional) {
    if (!functional.same_shape(w_class.member(0)))
        throw std::invalid_argument("span_max_abs: functional shape mismatch");
    double best = 0.0;
    for (int i = 0; i < w_class.size(); ++i) {
        double inner = 0.0;
        const auto& w = w_class.member(i);
        for (int j = 0; j < functional.size(); ++j) inner += functional.data[j] * w.data[j];
        best = std::max(best, std::fabs(inner));
    }
    return best;
}

WClass indicator_w_class(int num_states, int num_actions, bool scaled, const DataDistribution* mu) {
    if (num_states <= 0 || num_actions <= 0)
        throw std::invalid_argument("indicator_w_class: dimensions must be positive");
    if (scaled && mu == nullptr)
        throw std::invalid_argument("indicator_w_class: scaled indicators need mu");
    if (mu && (mu->num_states() != num_states || mu->num_actions() != num_actions))
        throw std::invalid_argument("indicator_w_class: mu shape mismatch");

    std::vector<WeightFunction> members;
    members.reserve(static_cast<std::size_t>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            WeightFunction w(num_states, num_actions, 0.0);
            w(s, a) = scaled ? 1.0 / (*mu)(s, a) : 1.0;
            members.push_back(std::move(w));
        }
    }
    return WClass(std::move(members));
}

LinearQClass::LinearQClass(const TabularMdp& mdp, std::vector<std::vector<double>> phi,
                           const std::vector<std::vector<double>>& theta_set) {
    const std::size_t sa = static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions();
    if (phi.size() != sa) throw std::invalid_argument("LinearQClass: feature row count mismatch");
    if (phi.empty() || phi.front().empty())
        throw std::invalid_argument("LinearQClass: empty feature matrix");
    k_ = static_cast<int>(phi.front().size());
    for (const auto& row : phi)
        if (static_cast<int>(row.size()) != k_)
            throw std::invalid_argument("LinearQClass: ragged feature matrix");

    features_plus_ = std::move(phi);
    std::size_t idx = 0;
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            features_plus_[idx++].push_back(mdp.r(s, a));

    const double v_max = mdp.v_max();
    for (const auto& theta : theta_set) {
        if (static_cast<int>(theta.size()) != k_)
            throw std::invalid_argument("LinearQClass: theta dimension mismatch");
        bool in_range = true;
        idx = 0;
        for (int s = 0; s < mdp.num_states() && in_range; ++s) {
            for (int a = 0; a < mdp.num_actions() && in_range; ++a, ++idx) {
                double dot = 0.0;
                for (int j = 0; j < k_; ++j) dot += features_plus_[idx][static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
                const double q = mdp.r(s, a) + mdp.gamma() * dot;
                if (!(q >= 0.0 && q <= v_max)) in_range = false;
            }
        }
        if (in_range) thetas_.push_back(theta);
    }
    if (thetas_.empty())
        throw std::invalid_argument("LinearQClass: every theta violates the [0, v_max] range");
}

QClass linear_q_members(const LinearQClass& cls, const TabularMdp& mdp) {
    const std::size_t sa = static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions();
    if (cls.feature_rows().size() != sa)
        throw std::invalid_argument("linear_q_members: class does not match mdp shape");
    std::vector<QFunction> members;
    members.reserve(cls.thetas().size());
    for (const auto& theta : cls.thetas()) {
        QFunction q(mdp.num_states(), mdp.num_actions(), 0.0);
        std::size_t idx = 0;
        for (int s = 0; s < mdp.num_states(); ++s) {
            for (int a = 0; a < mdp.num_actions(); ++a, ++idx) {
                double dot = 0.0;
                for (int j = 0; j < cls.latent_dim(); ++j)
                    dot += cls.feature_rows()[idx][static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
                q(s, a) = mdp.r(s, a) + mdp.gamma() * dot;
            }
        }
        members.push_back(std::move(q));
    }
    return QClass(std::move(members), mdp.v_max());
}

std::vector<DeterministicPolicy> greedy_policies(const QClass& q_class) {
    std::vector<DeterministicPolicy> out;
    for (const auto& q : q_class.members()) {
        DeterministicPolicy pi = greedy_policy(q);
        if (std::find(out.begin(), out.end(), pi) == out.end()) out.push_back(std::move(pi));
    }
    return out;
}

} // namespace brl
