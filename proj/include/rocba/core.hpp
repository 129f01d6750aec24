#pragma once

// Scenario indexing, single-pass scenario statistics and the minimax
// selection rule. Every procedure and oracle in the library goes through
// worst_case_index / select_best so tie-breaking is uniform: the smallest
// index wins.
//
// Indices are 0-based in code. Anything written for humans (traces, CSV,
// CLI output) is 1-based.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rocba {

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioId {
    std::size_t i = 0; // alternative
    std::size_t j = 0; // input distribution

    friend bool operator==(const ScenarioId&, const ScenarioId&) = default;
};

/// Welford accumulator for one scenario.
struct ScenarioStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double sum_sq_dev = 0.0;

    void update(double x) noexcept {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        sum_sq_dev += d * (x - mean);
    }

    bool has_variance() const noexcept { return count >= 2; }

    /// Unbiased sample variance. Throws when count < 2.
    double variance() const {
        if (count < 2) throw InvalidInput("sample variance needs at least two observations");
        return sum_sq_dev / static_cast<double>(count - 1);
    }
};

inline ScenarioStats update_stats(ScenarioStats s, double x) noexcept {
    s.update(x);
    return s;
}

/// k x m table of scenario statistics plus the budget ledger.
class ScenarioGrid {
public:
    ScenarioGrid(std::size_t k, std::size_t m);

    std::size_t k() const noexcept { return k_; }
    std::size_t m() const noexcept { return m_; }

    const ScenarioStats& at(std::size_t i, std::size_t j) const { return stats_.at(i * m_ + j); }
    const ScenarioStats& at(ScenarioId id) const { return at(id.i, id.j); }

    void record(ScenarioId id, double x);

    std::int64_t total_used() const noexcept { return total_used_; }

    Eigen::MatrixXd means() const;
    /// Sample variances; requires count >= 2 everywhere.
    Eigen::MatrixXd variances() const;
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts() const;

private:
    std::size_t k_;
    std::size_t m_;
    std::vector<ScenarioStats> stats_;
    std::int64_t total_used_ = 0;
};

/// Column of the row maximum; smallest column on ties.
template <typename Derived>
std::size_t worst_case_index(const Eigen::DenseBase<Derived>& row) {
    if (row.size() == 0) throw InvalidInput("worst_case_index: empty row");
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < row.size(); ++j) {
        if (row(j) > row(best)) best = j;
    }
    return static_cast<std::size_t>(best);
}

/// argmin over rows of the row maximum; smallest row on ties.
template <typename Derived>
std::size_t select_best(const Eigen::DenseBase<Derived>& means) {
    if (means.rows() == 0 || means.cols() == 0) throw InvalidInput("select_best: empty table");
    Eigen::Index best = 0;
    auto best_value = means.row(0).maxCoeff();
    for (Eigen::Index i = 1; i < means.rows(); ++i) {
        const auto v = means.row(i).maxCoeff();
        if (v < best_value) {
            best = i;
            best_value = v;
        }
    }
    return static_cast<std::size_t>(best);
}

std::string to_string(ScenarioId id); // "(i,j)" 1-based

} // namespace rocba
