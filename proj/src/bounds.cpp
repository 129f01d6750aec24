#include "rocba/bounds.hpp"

#include "rocba/normal.hpp"
#include "rocba/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rocba {
namespace {

void check_shapes(const GroundTruth& truth, const Allocation& alloc) {
    if (alloc.n.rows() != truth.mu.rows() || alloc.n.cols() != truth.mu.cols())
        throw InvalidInput("allocation shape does not match the ground truth");
    if ((alloc.n.array() < 0.0).any()) throw InvalidInput("allocation has negative sample sizes");
}

double require_positive(const Allocation& alloc, ScenarioId id) {
    const double n = alloc.n(id.i, id.j);
    if (!(n > 0.0)) throw InvalidInput("zero sample size on relevant scenario " + to_string(id));
    return n;
}

// Standardized arguments -delta_r / sd_r of the k+m-2 additive-bound terms.
Eigen::ArrayXd additive_arguments(const GroundTruth& truth, const IndexSet& set, const Eigen::VectorXd& n) {
    const auto& ref = set.reference();
    const double ref_var = truth.sigma2(ref.i, ref.j) / n(0);
    Eigen::ArrayXd z(static_cast<Eigen::Index>(set.size()) - 1);
    for (std::size_t r = 1; r < set.size(); ++r) {
        const auto& s = set[r];
        const double sd = std::sqrt(ref_var + truth.sigma2(s.i, s.j) / n(static_cast<Eigen::Index>(r)));
        z(static_cast<Eigen::Index>(r) - 1) = -slot_gap(set, truth.mu, r) / sd;
    }
    return z;
}

Eigen::VectorXd slot_sizes(const GroundTruth& truth, const IndexSet& set, const Allocation& alloc) {
    check_shapes(truth, alloc);
    Eigen::VectorXd n(set.size());
    for (std::size_t r = 0; r < set.size(); ++r) n(static_cast<Eigen::Index>(r)) = require_positive(alloc, set[r]);
    return n;
}

double log_sum_exp(const Eigen::ArrayXd& v) {
    if (v.size() == 0) return -std::numeric_limits<double>::infinity();
    const double hi = v.maxCoeff();
    if (!std::isfinite(hi)) return hi;
    return hi + std::log((v - hi).exp().sum());
}

} // namespace

double additive_pics_bound(const GroundTruth& truth, const Allocation& alloc) {
    const IndexSet set = build_index_set(truth.mu);
    const Eigen::ArrayXd z = additive_arguments(truth, set, slot_sizes(truth, set, alloc));
    return z.unaryExpr([](double x) { return normal_cdf(x); }).sum();
}

double log_additive_pics_bound(const GroundTruth& truth, const Allocation& alloc) {
    const IndexSet set = build_index_set(truth.mu);
    const Eigen::ArrayXd z = additive_arguments(truth, set, slot_sizes(truth, set, alloc));
    return log_sum_exp(z.unaryExpr([](double x) { return log_normal_cdf(x); }));
}

double multiplicative_pics_bound(const GroundTruth& truth, const Allocation& alloc) {
    check_shapes(truth, alloc);
    const std::size_t b = truth.best;
    double total = 0.0;
    for (std::size_t i = 0; i < truth.k(); ++i) {
        if (i == b) continue;
        const ScenarioId wi{i, truth.worst_of[i]};
        const double var_i = truth.sigma2(wi.i, wi.j) / require_positive(alloc, wi);
        for (std::size_t j = 0; j < truth.m(); ++j) {
            const double var_b = truth.sigma2(b, j) / require_positive(alloc, {b, j});
            total += normal_cdf(-(truth.mu(wi.i, wi.j) - truth.mu(b, j)) / std::sqrt(var_b + var_i));
        }
    }
    return total;
}

PicsEstimate mc_pics(const GroundTruth& truth, const Allocation& alloc, std::int64_t reps, std::uint64_t seed) {
    check_shapes(truth, alloc);
    if (reps < 1) throw InvalidInput("mc_pics: reps must be at least 1");
    if (!(alloc.n.array() > 0.0).all()) throw InvalidInput("mc_pics: every scenario needs a positive sample size");

    const Eigen::ArrayXXd sd = (truth.sigma2.array() / alloc.n.array()).sqrt();
    Rng rng = make_rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd xbar(truth.mu.rows(), truth.mu.cols());
    std::int64_t wrong = 0;
    for (std::int64_t rep = 0; rep < reps; ++rep) {
        for (Eigen::Index i = 0; i < xbar.rows(); ++i)
            for (Eigen::Index j = 0; j < xbar.cols(); ++j) xbar(i, j) = truth.mu(i, j) + sd(i, j) * z(rng);
        if (select_best(xbar) != truth.best) ++wrong;
    }
    const double p = static_cast<double>(wrong) / static_cast<double>(reps);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps)), reps};
}

namespace {

// log f restricted to the index-set coordinates.
class LogObjective {
public:
    LogObjective(const GroundTruth& truth, const IndexSet& set) : gap_(set.size()), var_(set.size()) {
        for (std::size_t r = 0; r < set.size(); ++r) {
            gap_(static_cast<Eigen::Index>(r)) = r == 0 ? 0.0 : slot_gap(set, truth.mu, r);
            var_(static_cast<Eigen::Index>(r)) = truth.sigma2(set[r].i, set[r].j);
        }
    }

    double operator()(const Eigen::ArrayXd& n) const {
        const Eigen::Index len = n.size() - 1;
        const Eigen::ArrayXd sd = (var_(0) / n(0) + var_.tail(len) / n.tail(len)).sqrt();
        const Eigen::ArrayXd z = -gap_.tail(len) / sd;
        return log_sum_exp(z.unaryExpr([](double x) { return log_normal_cdf(x); }));
    }

private:
    Eigen::ArrayXd gap_;
    Eigen::ArrayXd var_;
};

struct MinResult {
    Eigen::ArrayXd n;
    double value;
    bool converged;
};

// Moves budget between coordinates p and q to minimize the objective, keeping n_p + n_q fixed.
double golden_transfer(const LogObjective& f, Eigen::ArrayXd& n, Eigen::Index p, Eigen::Index q) {
    const double total = n(p) + n(q);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double a) {
        n(p) = a;
        n(q) = total - a;
        return f(n);
    };
    double lo = 0.0, hi = total;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    while (hi - lo > 1e-13 * total) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    return f1 <= f2 ? eval(x1) : eval(x2);
}

MinResult minimize_from(const LogObjective& f, Eigen::ArrayXd n, int sweeps) {
    double value = f(n);
    const Eigen::Index len = n.size();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        const double before = value;
        for (Eigen::Index p = 0; p < len; ++p) {
            for (Eigen::Index q = p + 1; q < len; ++q) {
                const Eigen::ArrayXd saved = n;
                const double v = golden_transfer(f, n, p, q);
                if (v <= value) {
                    value = v;
                } else {
                    n = saved;
                }
            }
        }
        if (before - value <= 1e-14 * std::max(1.0, std::abs(value))) return {n, value, true};
    }
    return {n, value, false};
}

} // namespace

Allocation numeric_min_f(const GroundTruth& truth, double N, const MinimizerOptions& options) {
    if (truth.k() * truth.m() > 25) throw InvalidInput("numeric_min_f: limited to k*m <= 25");
    const IndexSet set = build_index_set(truth.mu);
    if (!(N >= static_cast<double>(set.size()))) throw InvalidInput("numeric_min_f: N must be at least k+m-1");

    auto scatter = [&](const Eigen::ArrayXd& n) {
        Allocation a{Eigen::MatrixXd::Zero(truth.mu.rows(), truth.mu.cols())};
        for (std::size_t r = 0; r < set.size(); ++r) a.n(set[r].i, set[r].j) = n(static_cast<Eigen::Index>(r));
        return a;
    };

    const auto len = static_cast<Eigen::Index>(set.size());
    if (len == 1) return scatter(Eigen::ArrayXd::Constant(1, N));

    const LogObjective f(truth, set);
    Rng rng = make_rng(options.seed);
    std::exponential_distribution<double> expo(1.0);

    std::vector<MinResult> results;
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        Eigen::ArrayXd start(len);
        for (Eigen::Index r = 0; r < len; ++r) start(r) = 0.05 + expo(rng);
        start *= N / start.sum();
        results.push_back(minimize_from(f, start, options.iterations));
    }

    const auto best = std::min_element(results.begin(), results.end(),
                                       [](const MinResult& a, const MinResult& b) { return a.value < b.value; });
    for (const auto& r : results) {
        if (!r.converged) throw NonConvergence("numeric_min_f: sweep budget exhausted", scatter(best->n));
        if (r.value - best->value > std::log1p(1e-3))
            throw NonConvergence("numeric_min_f: restarts disagree by more than 0.1% in f", scatter(best->n));
    }
    return scatter(best->n);
}

} // namespace rocba
