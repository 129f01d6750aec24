#include "rocba/core.hpp"

namespace rocba {

ScenarioGrid::ScenarioGrid(std::size_t k, std::size_t m) : k_(k), m_(m), stats_(k * m) {
    if (k == 0 || m == 0) throw InvalidInput("ScenarioGrid: k and m must be positive");
}

void ScenarioGrid::record(ScenarioId id, double x) {
    stats_.at(id.i * m_ + id.j).update(x);
    ++total_used_;
}

Eigen::MatrixXd ScenarioGrid::means() const {
    Eigen::MatrixXd out(k_, m_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < m_; ++j) out(i, j) = at(i, j).mean;
    return out;
}

Eigen::MatrixXd ScenarioGrid::variances() const {
    Eigen::MatrixXd out(k_, m_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < m_; ++j) out(i, j) = at(i, j).variance();
    return out;
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> ScenarioGrid::counts() const {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> out(k_, m_);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < m_; ++j) out(i, j) = at(i, j).count;
    return out;
}

std::string to_string(ScenarioId id) {
    return "(" + std::to_string(id.i + 1) + "," + std::to_string(id.j + 1) + ")";
}

} // namespace rocba
