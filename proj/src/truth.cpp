#include "rocba/truth.hpp"

namespace rocba {

GroundTruth make_ground_truth(Eigen::MatrixXd mu, Eigen::MatrixXd sigma2) {
    if (mu.size() == 0) throw InvalidInput("ground truth: empty mean table");
    if (mu.rows() != sigma2.rows() || mu.cols() != sigma2.cols())
        throw InvalidInput("ground truth: mean and variance tables differ in shape");
    if (!mu.allFinite() || !sigma2.allFinite()) throw InvalidInput("ground truth: non-finite entry");
    if ((sigma2.array() <= 0.0).any()) throw InvalidInput("ground truth: variances must be positive");

    GroundTruth t;
    t.mu = std::move(mu);
    t.sigma2 = std::move(sigma2);
    t.best = select_best(t.mu);
    t.worst_of.resize(t.k());
    for (std::size_t i = 0; i < t.k(); ++i) t.worst_of[i] = worst_case_index(t.mu.row(i));

    const double best_value = t.mu(t.best, t.worst_of[t.best]);
    for (std::size_t i = 0; i < t.k(); ++i) {
        if (i != t.best && !(t.mu(i, t.worst_of[i]) > best_value)) t.unique_best = false;
    }
    return t;
}

} // namespace rocba
