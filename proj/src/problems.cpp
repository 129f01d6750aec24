#include "rocba/problems.hpp"

#include "rocba/format.hpp"
#include "rocba/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

namespace rocba {

std::string to_string(ConfigLabel label) {
    switch (label) {
    case ConfigLabel::MM_CV: return "MM-CV";
    case ConfigLabel::MM_IV: return "MM-IV";
    case ConfigLabel::MM_DV: return "MM-DV";
    case ConfigLabel::Custom: return "Custom";
    }
    return "Custom";
}

SyntheticProblem::SyntheticProblem(GroundTruth truth, ConfigLabel label)
    : truth_(std::move(truth)), sd_(truth_.sigma2.cwiseSqrt()), label_(label) {}

double SyntheticProblem::draw(ScenarioId id, Rng& rng) const {
    std::normal_distribution<double> z;
    return truth_.mu(id.i, id.j) + sd_(id.i, id.j) * z(rng);
}

double gaussian_draw(const SyntheticProblem& problem, ScenarioId id, Rng& rng) {
    if (id.i >= problem.k() || id.j >= problem.m()) throw InvalidInput("gaussian_draw: scenario out of range");
    return problem.draw(id, rng);
}

SyntheticProblem make_synthetic(std::size_t k, std::size_t m, VarianceKind kind) {
    if (k < 2 || m < 1) throw InvalidInput("make_synthetic: need k >= 2 and m >= 1");
    Eigen::MatrixXd mu(k, m), s2(k, m);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const double i = static_cast<double>(r + 1);
            const double j = static_cast<double>(c + 1);
            mu(r, c) = 0.5 * i - 0.2 * j - 1.0;
            switch (kind) {
            case VarianceKind::Constant: s2(r, c) = 16.0 * 16.0; break;
            case VarianceKind::Increasing: s2(r, c) = std::pow(12.0 + std::sqrt(0.2 * i + j), 2); break;
            case VarianceKind::Decreasing: s2(r, c) = std::pow(12.0 + 1.0 / (0.2 * i + j), 2); break;
            }
        }
    }
    const ConfigLabel label = kind == VarianceKind::Constant     ? ConfigLabel::MM_CV
                              : kind == VarianceKind::Increasing ? ConfigLabel::MM_IV
                                                                 : ConfigLabel::MM_DV;
    return SyntheticProblem(make_ground_truth(std::move(mu), std::move(s2)), label);
}

SyntheticProblem make_concentration_example() {
    Eigen::MatrixXd mu(3, 3);
    mu << 0.2, 0.1, 0.1,
          0.4, 0.3, 0.3,
          0.4, 0.4, 0.4;
    return SyntheticProblem(make_ground_truth(mu, Eigen::MatrixXd::Ones(3, 3)), ConfigLabel::Custom);
}

void InventoryParams::validate() const {
    if (!(s < S)) throw InvalidInput("inventory: reorder point s must be below order-up-to level S");
    if (horizon < 1) throw InvalidInput("inventory: horizon must be at least one day");
    if (demand_mean < 0.0 || lead_time_mean < 0.0) throw InvalidInput("inventory: negative demand or lead-time mean");
    if (holding_cost < 0.0 || fixed_order_cost < 0.0 || unit_cost < 0.0 || backorder_cost < 0.0)
        throw InvalidInput("inventory: costs must be nonnegative");
    if (initial_inventory && *initial_inventory < 0.0) throw InvalidInput("inventory: negative initial inventory");
}

double inventory_draw(const InventoryParams& p, Rng& rng) {
    p.validate();
    std::exponential_distribution<double> demand(p.demand_mean > 0.0 ? 1.0 / p.demand_mean : 1.0);
    std::poisson_distribution<int> lead(p.lead_time_mean > 0.0 ? p.lead_time_mean : 1.0);

    struct Order {
        int due;
        double qty;
    };
    std::deque<Order> pipeline; // sorted by due day
    double on_hand = p.initial_inventory.value_or(p.S);
    double backorders = 0.0;
    double on_order = 0.0;
    double cost = 0.0;

    for (int day = 0; day < p.horizon; ++day) {
        for (auto it = pipeline.begin(); it != pipeline.end();) {
            if (it->due > day) {
                ++it;
                continue;
            }
            on_hand += it->qty;
            on_order -= it->qty;
            it = pipeline.erase(it);
        }
        if (backorders > 0.0) {
            const double filled = std::min(backorders, on_hand);
            backorders -= filled;
            on_hand -= filled;
        }

        const double d = p.demand_mean > 0.0 ? demand(rng) : 0.0;
        const double served = std::min(d, on_hand);
        on_hand -= served;
        backorders += d - served;

        const double position = on_hand + on_order - backorders;
        if (position < p.s) {
            const double qty = p.S - position;
            const int lt = p.lead_time_mean > 0.0 ? lead(rng) : 0;
            const Order o{day + lt + 1, qty};
            auto pos = std::upper_bound(pipeline.begin(), pipeline.end(), o,
                                        [](const Order& a, const Order& b) { return a.due < b.due; });
            pipeline.insert(pos, o);
            on_order += qty;
            cost += p.fixed_order_cost + p.unit_cost * qty;
        }
        cost += p.holding_cost * on_hand + p.backorder_cost * backorders;
    }
    return cost / static_cast<double>(p.horizon);
}

InventoryProblem::InventoryProblem(std::vector<Policy> policies, std::vector<double> demand_means, InventoryParams base)
    : policies_(std::move(policies)), demand_means_(std::move(demand_means)), base_(base) {
    if (policies_.empty() || demand_means_.empty()) throw InvalidInput("inventory problem: empty policy or demand set");
    for (std::size_t i = 0; i < policies_.size(); ++i)
        for (std::size_t j = 0; j < demand_means_.size(); ++j) params_for({i, j}).validate();
}

InventoryParams InventoryProblem::params_for(ScenarioId id) const {
    InventoryParams p = base_;
    p.s = policies_.at(id.i).s;
    p.S = policies_.at(id.i).S;
    p.demand_mean = demand_means_.at(id.j);
    return p;
}

double InventoryProblem::draw(ScenarioId id, Rng& rng) const { return inventory_draw(params_for(id), rng); }

InventoryProblem build_inventory_problem(const std::vector<double>& s_grid, const std::vector<double>& S_grid,
                                         std::vector<double> demand_means, InventoryParams base) {
    if (s_grid.empty() || S_grid.empty() || demand_means.empty())
        throw InvalidInput("build_inventory_problem: grids must be nonempty");
    std::vector<InventoryProblem::Policy> policies;
    std::vector<InventoryProblem::Policy> excluded;
    for (double s : s_grid) {
        for (double S : S_grid) {
            if (s < S) {
                policies.push_back({s, S});
            } else {
                excluded.push_back({s, S});
            }
        }
    }
    if (policies.empty()) throw InvalidInput("build_inventory_problem: every (s,S) pair has s >= S");
    std::sort(demand_means.begin(), demand_means.end());
    InventoryProblem problem(std::move(policies), std::move(demand_means), base);
    problem.excluded = std::move(excluded);
    return problem;
}

std::vector<double> full_scale_s_grid() {
    std::vector<double> g;
    for (int s = 700; s <= 1000; s += 25) g.push_back(s);
    return g;
}

std::vector<double> full_scale_S_grid() {
    std::vector<double> g;
    for (int S = 1500; S <= 2000; S += 50) g.push_back(S);
    return g;
}

std::vector<double> full_scale_demand_means() { return {40, 45, 50, 55, 60, 65, 70, 75, 80}; }

TruthEstimate make_truth_estimate(Eigen::MatrixXd mean, Eigen::MatrixXd variance, std::int64_t reps) {
    if (reps < 2) throw InvalidInput("truth estimate needs at least two replications per scenario");
    TruthEstimate est;
    est.reps = reps;
    est.std_error = (variance.array() / static_cast<double>(reps)).sqrt().matrix();
    est.truth = make_ground_truth(std::move(mean), std::move(variance));

    const auto& t = est.truth;
    const double best_value = t.mu(t.best, t.worst_of[t.best]);
    bool have_runner = false;
    for (std::size_t i = 0; i < t.k(); ++i) {
        if (i == t.best) continue;
        if (!have_runner || t.mu(i, t.worst_of[i]) < t.mu(est.runner_up, t.worst_of[est.runner_up])) {
            est.runner_up = i;
            have_runner = true;
        }
    }
    if (!t.unique_best) {
        est.ambiguous = true;
    } else if (have_runner) {
        const ScenarioId a = t.reference();
        const ScenarioId b{est.runner_up, t.worst_of[est.runner_up]};
        const double se = std::hypot(est.std_error(a.i, a.j), est.std_error(b.i, b.j));
        est.ambiguous = t.mu(b.i, b.j) - best_value <= se;
    }
    return est;
}

TruthEstimate estimate_truth(const Simulator& sim, std::int64_t reps, std::uint64_t seed, unsigned jobs) {
    if (reps < 2) throw InvalidInput("estimate_truth: reps_per_scenario must be at least 2");
    const std::size_t k = sim.k(), m = sim.m();
    Eigen::MatrixXd mean(k, m), var(k, m);
    parallel_for(k * m, jobs, [&](std::size_t idx) {
        const ScenarioId id{idx / m, idx % m};
        Rng rng = make_rng(seed, idx);
        ScenarioStats st;
        for (std::int64_t r = 0; r < reps; ++r) st.update(sim.draw(id, rng));
        mean(id.i, id.j) = st.mean;
        var(id.i, id.j) = st.variance();
    });
    return make_truth_estimate(std::move(mean), std::move(var), reps);
}

void write_truth_cache(std::ostream& out, const InventoryProblem& problem, const TruthEstimate& est) {
    out << "scenario_i,scenario_j,s,S,demand_mean,reps,mean,variance,stderr\n";
    for (std::size_t i = 0; i < problem.k(); ++i) {
        for (std::size_t j = 0; j < problem.m(); ++j) {
            const auto& pol = problem.policies()[i];
            out << i + 1 << ',' << j + 1 << ',' << format_double(pol.s) << ',' << format_double(pol.S) << ','
                << format_double(problem.demand_means()[j]) << ',' << est.reps << ','
                << format_double(est.truth.mu(i, j)) << ',' << format_double(est.truth.sigma2(i, j)) << ','
                << format_double(est.std_error(i, j)) << '\n';
        }
    }
}

TruthEstimate read_truth_cache(std::istream& in, const InventoryProblem& problem) {
    std::string line;
    if (!std::getline(in, line) || line != "scenario_i,scenario_j,s,S,demand_mean,reps,mean,variance,stderr")
        throw InvalidInput("truth cache: unexpected header");
    const std::size_t k = problem.k(), m = problem.m();
    Eigen::MatrixXd mean = Eigen::MatrixXd::Constant(k, m, std::nan("")), var = mean;
    std::int64_t reps = -1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 9) throw InvalidInput("truth cache: expected 9 columns in '" + line + "'");
        double v[9];
        for (int c = 0; c < 9; ++c)
            if (!parse_double(f[c], v[c])) throw InvalidInput("truth cache: bad number '" + f[c] + "'");
        const auto i = static_cast<std::size_t>(v[0]) - 1, j = static_cast<std::size_t>(v[1]) - 1;
        if (i >= k || j >= m) throw InvalidInput("truth cache: scenario index out of range");
        const auto& pol = problem.policies()[i];
        if (v[2] != pol.s || v[3] != pol.S || v[4] != problem.demand_means()[j])
            throw InvalidInput("truth cache: row " + to_string(ScenarioId{i, j}) + " does not match the problem");
        if (reps >= 0 && static_cast<std::int64_t>(v[5]) != reps) throw InvalidInput("truth cache: mixed reps");
        reps = static_cast<std::int64_t>(v[5]);
        mean(i, j) = v[6];
        var(i, j) = v[7];
        ++rows;
    }
    if (rows != k * m || !mean.allFinite()) throw InvalidInput("truth cache: missing scenarios");
    return make_truth_estimate(std::move(mean), std::move(var), reps);
}

} // namespace rocba
