#pragma once

#include "rocba/core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rocba {

/// True means and variances of all k*m scenarios.
///
/// `best` and `worst_of` follow the library tie-break. `unique_best` is false
/// when another alternative's worst-case mean equals the best one's; callers
/// that need a well-defined correct selection (theorem_allocation, PCS
/// estimation) refuse such a truth.
struct GroundTruth {
    Eigen::MatrixXd mu;
    Eigen::MatrixXd sigma2;
    std::size_t best = 0;
    std::vector<std::size_t> worst_of;
    bool unique_best = true;

    std::size_t k() const noexcept { return static_cast<std::size_t>(mu.rows()); }
    std::size_t m() const noexcept { return static_cast<std::size_t>(mu.cols()); }

    ScenarioId reference() const { return {best, worst_of.at(best)}; }
};

/// Validates shapes and sigma2 > 0, derives best / worst_of / unique_best.
GroundTruth make_ground_truth(Eigen::MatrixXd mu, Eigen::MatrixXd sigma2);

/// Relaxed (real-valued) sample sizes for every scenario.
struct Allocation {
    Eigen::MatrixXd n;

    double total() const { return n.sum(); }
};

} // namespace rocba
