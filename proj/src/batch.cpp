#include "brl/batch.hpp"

#include "brl/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace brl {

namespace {
constexpr double kSumTol = 1e-12;
}

DataDistribution::DataDistribution(StateActionTable mu) : mu_(std::move(mu)) {
    if (mu_.num_states <= 0 || mu_.num_actions <= 0)
        throw std::invalid_argument("DataDistribution: empty table");
    double sum = 0.0;
    for (double v : mu_.data) {
        if (!(v > 0.0)) throw std::invalid_argument("DataDistribution: mu must be strictly positive everywhere");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > kSumTol)
        throw std::invalid_argument("DataDistribution: mu does not sum to 1");
}

DataDistribution DataDistribution::uniform(int num_states, int num_actions) {
    StateActionTable t(num_states, num_actions, 1.0 / (static_cast<double>(num_states) * num_actions));
    return DataDistribution(std::move(t));
}

DataDistribution DataDistribution::from_occupancy(const TabularMdp& mdp,
                                                  const DeterministicPolicy& policy) {
    const OccupancyMeasure occ = compute_occupancy(mdp, policy);
    return DataDistribution(occ.dist);
}

BatchDataset generate_batch(const TabularMdp& mdp, const DataDistribution& mu, int n,
                            std::uint64_t seed) {
    if (n <= 0) throw std::invalid_argument("generate_batch: n must be positive");
    if (mu.num_states() != mdp.num_states() || mu.num_actions() != mdp.num_actions())
        throw std::invalid_argument("generate_batch: mu shape mismatch");

    const int num_actions = mdp.num_actions();
    const int num_states = mdp.num_states();
    CounterRng rng(seed);

    BatchDataset out;
    out.seed = seed;
    out.tuples.reserve(static_cast<std::size_t>(n));
    std::vector<double> row(num_states);
    for (int i = 0; i < n; ++i) {
        const int pair = sample_categorical(rng, mu.table().data);
        const int s = pair / num_actions;
        const int a = pair % num_actions;
        for (int sp = 0; sp < num_states; ++sp) row[sp] = mdp.p(s, a, sp);
        const int s_next = sample_categorical(rng, row);
        out.tuples.push_back({s, a, mdp.r(s, a), s_next});
    }
    return out;
}

WeightFunction importance_weight(const TabularMdp& mdp, const DeterministicPolicy& policy,
                                 const DataDistribution& mu) {
    const OccupancyMeasure occ = compute_occupancy(mdp, policy);
    WeightFunction w(mdp.num_states(), mdp.num_actions(), 0.0);
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            w(s, a) = occ.dist(s, a) / mu(s, a);
    return w;
}

double empirical_sq_loss(const BatchDataset& data, double gamma, const QFunction& q,
                         const QFunction& q_target) {
    if (data.tuples.empty()) throw std::invalid_argument("empirical_sq_loss: empty dataset");
    double acc = 0.0;
    for (const auto& t : data.tuples) {
        const double td = q(t.s, t.a) - t.r - gamma * q_target.state_value(t.s_next);
        acc += td * td;
    }
    return acc / static_cast<double>(data.tuples.size());
}

double population_sq_loss(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q,
                          const QFunction& q_target) {
    double acc = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) {
        for (int a = 0; a < mdp.num_actions(); ++a) {
            double mean = 0.0, second = 0.0;
            for (int sp = 0; sp < mdp.num_states(); ++sp) {
                const double v = q_target.state_value(sp);
                const double pr = mdp.p(s, a, sp);
                mean += pr * v;
                second += pr * v * v;
            }
            const double variance = std::max(0.0, second - mean * mean);
            const double bias = q(s, a) - mdp.r(s, a) - mdp.gamma() * mean;
            acc += mu(s, a) * (bias * bias + mdp.gamma() * mdp.gamma() * variance);
        }
    }
    return acc;
}

double empirical_avg_loss(const BatchDataset& data, double gamma, const QFunction& q,
                          const WeightFunction& w) {
    if (data.tuples.empty()) throw std::invalid_argument("empirical_avg_loss: empty dataset");
    double acc = 0.0;
    for (const auto& t : data.tuples)
        acc += w(t.s, t.a) * (t.r + gamma * q.state_value(t.s_next) - q(t.s, t.a));
    return acc / static_cast<double>(data.tuples.size());
}

double population_avg_loss(const TabularMdp& mdp, const DataDistribution& mu, const QFunction& q,
                           const WeightFunction& w) {
    const QFunction backup = bellman_optimality(mdp, q);
    double acc = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            acc += mu(s, a) * w(s, a) * (backup(s, a) - q(s, a));
    return acc;
}

void save_dataset_csv(const BatchDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset_csv: cannot open " + path);
    out << "s,a,r,s_next\n";
    char buf[64];
    for (const auto& t : data.tuples) {
        std::snprintf(buf, sizeof buf, "%.17g", t.r);
        out << t.s << ',' << t.a << ',' << buf << ',' << t.s_next << '\n';
    }
}

BatchDataset load_dataset_csv(const std::string& path, const TabularMdp& reference) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "s,a,r,s_next")
        throw std::runtime_error("load_dataset_csv: bad header in " + path);

    BatchDataset out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        SampledTransition t;
        char c1, c2, c3;
        if (!(ss >> t.s >> c1 >> t.a >> c2 >> t.r >> c3 >> t.s_next) || c1 != ',' || c2 != ',' ||
            c3 != ',')
            throw std::runtime_error("load_dataset_csv: parse error at line " + std::to_string(line_no));
        if (t.s < 0 || t.s >= reference.num_states() || t.s_next < 0 ||
            t.s_next >= reference.num_states() || t.a < 0 || t.a >= reference.num_actions())
            throw std::runtime_error("load_dataset_csv: index out of range at line " +
                                     std::to_string(line_no));
        if (reference.p(t.s, t.a, t.s_next) == 0.0)
            throw std::runtime_error("load_dataset_csv: impossible transition at line " +
                                     std::to_string(line_no));
        out.tuples.push_back(t);
    }
    return out;
}

} // namespace brl
