#pragma once

// The k+m-1 relevant scenarios and the closed-form asymptotic allocation over
// them.
//
// Slot layout of an IndexSet (0-based slots):
//   0                 reference scenario (b, worst column of b)
//   1 .. k-1          worst-case scenario of each other alternative, ascending i
//   k .. k+m-2        remaining columns of b, ascending j
//
// Only scenarios in the set ever carry budget in the asymptotic solution; the
// other (k-1)(m-1) scenarios are irrelevant to the additive bound.

#include "rocba/core.hpp"
#include "rocba/truth.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rocba {

struct IndexSet {
    std::vector<ScenarioId> entries;
    std::size_t competitors = 0; // number of slots holding other alternatives (k-1)

    std::size_t size() const noexcept { return entries.size(); }
    const ScenarioId& operator[](std::size_t r) const { return entries[r]; }
    const ScenarioId& reference() const { return entries.front(); }
    std::size_t best() const { return entries.front().i; }

    /// Slot holds another alternative's worst case (as opposed to a column of the best).
    bool is_competitor(std::size_t r) const noexcept { return r >= 1 && r <= competitors; }

    bool contains(ScenarioId id) const;
};

IndexSet build_index_set(const Eigen::MatrixXd& means);

/// Index set from current sample means; every scenario must have count >= 1.
IndexSet build_index_set(const ScenarioGrid& grid);

/// Signed gap of slot r against the reference: competitor slots use
/// mean_r - mean_ref, best-alternative columns use mean_ref - mean_r. Both are
/// nonnegative when the means produced the index set.
double slot_gap(const IndexSet& set, const Eigen::MatrixXd& means, std::size_t r);

/// Smallest gap the allocator accepts; larger |mean_ref| scales it up.
double gap_floor(double reference_mean) noexcept;
inline constexpr double variance_floor = 1e-12;

struct AllocationTarget {
    IndexSet index_set;
    Eigen::VectorXd n_target; // one per slot, sums to budget
    double budget = 0.0;
    bool all_gaps_clamped = false; // equal split fallback was used
};

/// Closed-form allocation over the slots given their means and variances.
///
/// With delta_r = |mean_0 - mean_r| (floored) and sigma_r = sqrt(var_r), the
/// unnormalized weights are w_r = (sigma_r / delta_r)^2 for r >= 1 and
/// w_0 = sigma_0 * sqrt(sum_r w_r^2 / sigma_r^2); the second relation is
/// homogeneous of degree one, so rescaling the weights to `budget` keeps both.
/// A single slot receives the whole budget. If every gap sits at its floor the
/// ratios are meaningless and the budget is split equally instead.
AllocationTarget solve_asymptotic_allocation(const IndexSet& set, const Eigen::VectorXd& slot_means,
                                             const Eigen::VectorXd& slot_variances, double budget);

/// Convenience overload reading slot means/variances from a sample grid.
AllocationTarget solve_asymptotic_allocation(const IndexSet& set, const ScenarioGrid& grid, double budget);

/// Asymptotically optimal allocation of N under known parameters: zero outside
/// the index set of the true means, closed form inside it.
Allocation theorem_allocation(const GroundTruth& truth, double N);

} // namespace rocba
