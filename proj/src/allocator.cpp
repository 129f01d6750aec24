#include "rocba/allocator.hpp"

#include <algorithm>
#include <cmath>

namespace rocba {

bool IndexSet::contains(ScenarioId id) const {
    return std::find(entries.begin(), entries.end(), id) != entries.end();
}

IndexSet build_index_set(const Eigen::MatrixXd& means) {
    if (means.size() == 0) throw InvalidInput("build_index_set: empty mean table");
    if (!means.allFinite()) throw InvalidInput("build_index_set: undefined sample means");

    const auto k = static_cast<std::size_t>(means.rows());
    const auto m = static_cast<std::size_t>(means.cols());
    const std::size_t b = select_best(means);
    const std::size_t wb = worst_case_index(means.row(b));

    IndexSet set;
    set.entries.reserve(k + m - 1);
    set.entries.push_back({b, wb});
    for (std::size_t i = 0; i < k; ++i) {
        if (i != b) set.entries.push_back({i, worst_case_index(means.row(i))});
    }
    set.competitors = k - 1;
    for (std::size_t j = 0; j < m; ++j) {
        if (j != wb) set.entries.push_back({b, j});
    }
    return set;
}

IndexSet build_index_set(const ScenarioGrid& grid) {
    for (std::size_t i = 0; i < grid.k(); ++i)
        for (std::size_t j = 0; j < grid.m(); ++j)
            if (grid.at(i, j).count < 1)
                throw InvalidInput("build_index_set: scenario " + to_string({i, j}) + " has no observations");
    return build_index_set(grid.means());
}

double slot_gap(const IndexSet& set, const Eigen::MatrixXd& means, std::size_t r) {
    const auto& ref = set.reference();
    const auto& s = set[r];
    const double diff = means(s.i, s.j) - means(ref.i, ref.j);
    return set.is_competitor(r) ? diff : -diff;
}

double gap_floor(double reference_mean) noexcept { return 1e-8 * std::max(1.0, std::abs(reference_mean)); }

AllocationTarget solve_asymptotic_allocation(const IndexSet& set, const Eigen::VectorXd& slot_means,
                                             const Eigen::VectorXd& slot_variances, double budget) {
    const auto len = static_cast<Eigen::Index>(set.size());
    if (len == 0 || slot_means.size() != len || slot_variances.size() != len)
        throw InvalidInput("solve_asymptotic_allocation: slot vectors do not match the index set");
    if (!(budget > 0.0)) throw InvalidInput("solve_asymptotic_allocation: budget must be positive");

    AllocationTarget out{set, Eigen::VectorXd::Zero(len), budget, false};
    if (len == 1) {
        out.n_target(0) = budget;
        return out;
    }

    const double floor = gap_floor(slot_means(0));
    const Eigen::ArrayXd var = slot_variances.array().max(variance_floor);
    const Eigen::ArrayXd gap = (slot_means.array() - slot_means(0)).abs().max(floor);

    if ((gap.tail(len - 1) <= floor).all()) {
        out.all_gaps_clamped = true;
        out.n_target.setConstant(budget / static_cast<double>(len));
        return out;
    }

    Eigen::ArrayXd w(len);
    w.tail(len - 1) = var.tail(len - 1) / gap.tail(len - 1).square();
    w(0) = std::sqrt(var(0)) * std::sqrt((w.tail(len - 1).square() / var.tail(len - 1)).sum());
    out.n_target = (budget * w / w.sum()).matrix();
    return out;
}

AllocationTarget solve_asymptotic_allocation(const IndexSet& set, const ScenarioGrid& grid, double budget) {
    Eigen::VectorXd means(set.size());
    Eigen::VectorXd vars(set.size());
    for (std::size_t r = 0; r < set.size(); ++r) {
        const auto& s = grid.at(set[r]);
        means(static_cast<Eigen::Index>(r)) = s.mean;
        vars(static_cast<Eigen::Index>(r)) = s.has_variance() ? s.variance() : variance_floor;
    }
    return solve_asymptotic_allocation(set, means, vars, budget);
}

Allocation theorem_allocation(const GroundTruth& truth, double N) {
    if (!(N > 0.0)) throw InvalidInput("theorem_allocation: budget must be positive");
    if (!truth.unique_best) throw InvalidInput("theorem_allocation: the true best alternative is not unique");

    const IndexSet set = build_index_set(truth.mu);
    Eigen::VectorXd means(set.size());
    Eigen::VectorXd vars(set.size());
    for (std::size_t r = 0; r < set.size(); ++r) {
        means(static_cast<Eigen::Index>(r)) = truth.mu(set[r].i, set[r].j);
        vars(static_cast<Eigen::Index>(r)) = truth.sigma2(set[r].i, set[r].j);
    }
    const auto target = solve_asymptotic_allocation(set, means, vars, N);

    Allocation a{Eigen::MatrixXd::Zero(truth.mu.rows(), truth.mu.cols())};
    for (std::size_t r = 0; r < set.size(); ++r) a.n(set[r].i, set[r].j) = target.n_target(static_cast<Eigen::Index>(r));
    return a;
}

} // namespace rocba
