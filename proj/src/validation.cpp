#include "rocba/validation.hpp"

#include "rocba/allocator.hpp"
#include "rocba/bounds.hpp"
#include "rocba/problems.hpp"
#include "rocba/procedures.hpp"
#include "rocba/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rocba {

IdentityDiscrepancy allocation_identities(const GroundTruth& truth, const Allocation& alloc, double N) {
    const IndexSet set = build_index_set(truth.mu);
    IdentityDiscrepancy d;
    d.closure = std::abs(alloc.total() - N) / N;
    if (set.size() < 2) return d;

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum_sq = 0.0;
    for (std::size_t r = 1; r < set.size(); ++r) {
        const double n = alloc.n(set[r].i, set[r].j);
        const double var = truth.sigma2(set[r].i, set[r].j);
        const double gap = slot_gap(set, truth.mu, r);
        const double v = n * gap * gap / var;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum_sq += n * n / var;
    }
    d.ratio = hi > 0.0 ? (hi - lo) / hi : 0.0;
    const double n_ref = alloc.n(set.reference().i, set.reference().j);
    const double want = std::sqrt(truth.sigma2(set.reference().i, set.reference().j) * sum_sq);
    d.reference = std::abs(n_ref - want) / std::max(n_ref, want);
    return d;
}

bool zero_outside_index_set(const GroundTruth& truth, const Allocation& alloc) {
    const IndexSet set = build_index_set(truth.mu);
    for (std::size_t i = 0; i < truth.k(); ++i)
        for (std::size_t j = 0; j < truth.m(); ++j)
            if (!set.contains({i, j}) && alloc.n(i, j) != 0.0) return false;
    return true;
}

namespace {

GroundTruth random_truth(Rng& rng, std::size_t k, std::size_t m, double spread) {
    std::uniform_real_distribution<double> mean(0.0, spread), var(0.5, 2.0);
    for (;;) {
        Eigen::MatrixXd mu(k, m), s2(k, m);
        for (Eigen::Index i = 0; i < mu.rows(); ++i)
            for (Eigen::Index j = 0; j < mu.cols(); ++j) {
                mu(i, j) = mean(rng);
                s2(i, j) = var(rng);
            }
        GroundTruth t = make_ground_truth(mu, s2);
        if (t.unique_best) return t;
    }
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

} // namespace

std::vector<CheckResult> run_validation_suite(bool quick, std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> dim(1, 5);

    {
        CheckResult c{"closed-form balance identities", true, true, 0.0, 1e-9, ""};
        for (int n = 0; n < (quick ? 20 : 100); ++n) {
            const auto t = random_truth(rng, static_cast<std::size_t>(std::max(2, dim(rng))), static_cast<std::size_t>(dim(rng)), 2.0);
            const double N = 1e4;
            const auto d = allocation_identities(t, theorem_allocation(t, N), N);
            c.measured = std::max({c.measured, d.ratio, d.reference, d.closure});
        }
        c.pass = c.measured <= c.tolerance;
        out.push_back(c);
    }
    {
        CheckResult c{"zero allocation outside the index set", true, true, 0.0, 0.0, ""};
        for (int n = 0; n < 50; ++n) {
            const auto t = random_truth(rng, static_cast<std::size_t>(std::max(2, dim(rng))), static_cast<std::size_t>(dim(rng)), 2.0);
            if (!zero_outside_index_set(t, theorem_allocation(t, 1e5))) c.measured += 1.0;
        }
        c.pass = c.measured == 0.0;
        c.detail = "violating instances";
        out.push_back(c);
    }
    {
        CheckResult c{"Monte Carlo PICS within both bounds", true, true, 0.0, 3.0, "max (mc - bound) / stderr"};
        const int instances = quick ? 10 : 50;
        const std::int64_t reps = quick ? 20000 : 100000;
        std::uniform_real_distribution<double> size(2.0, 30.0);
        c.measured = -std::numeric_limits<double>::infinity();
        for (int n = 0; n < instances; ++n) {
            const auto t = random_truth(rng, static_cast<std::size_t>(std::max(2, dim(rng))), static_cast<std::size_t>(dim(rng)), 1.0);
            Allocation a{Eigen::MatrixXd(t.mu.rows(), t.mu.cols())};
            for (Eigen::Index i = 0; i < a.n.size(); ++i) a.n(i) = size(rng);
            const auto mc = mc_pics(t, a, reps, seed + 1000 + static_cast<std::uint64_t>(n));
            const double se = std::max(mc.std_error, 1.0 / static_cast<double>(reps));
            const double bound = std::min(additive_pics_bound(t, a), multiplicative_pics_bound(t, a));
            c.measured = std::max(c.measured, (mc.estimate - bound) / se);
        }
        c.pass = c.measured <= c.tolerance;
        out.push_back(c);
    }
    {
        CheckResult c{"additive and multiplicative bounds coincide for m = 1", true, true, 0.0, 1e-12, "max abs difference"};
        std::uniform_real_distribution<double> size(1.0, 50.0);
        for (int n = 0; n < 100; ++n) {
            const auto t = random_truth(rng, static_cast<std::size_t>(std::max(2, dim(rng))), 1, 1.0);
            Allocation a{Eigen::MatrixXd(t.mu.rows(), 1)};
            for (Eigen::Index i = 0; i < a.n.size(); ++i) a.n(i) = size(rng);
            c.measured = std::max(c.measured, std::abs(additive_pics_bound(t, a) - multiplicative_pics_bound(t, a)));
        }
        c.pass = c.measured <= c.tolerance;
        out.push_back(c);
    }
    {
        CheckResult dominance{"numerical minimizer never worse than closed form", true, true, 0.0, 0.0,
                              "max log f(oracle) - log f(closed form)"};
        CheckResult agree{"closed form vs numerical minimizer (asymptotic approximation)", true, false, 0.0, 0.02,
                          "max per-coordinate relative difference; informational"};
        dominance.measured = -std::numeric_limits<double>::infinity();
        for (int n = 0; n < (quick ? 3 : 10); ++n) {
            const auto t = random_truth(rng, 2 + static_cast<std::size_t>(dim(rng) % 2), 1 + static_cast<std::size_t>(dim(rng) % 3), 2.0);
            const double N = 1e5;
            const auto closed = theorem_allocation(t, N);
            const auto oracle = numeric_min_f(t, N, {.iterations = 4000, .restarts = quick ? 3 : 10, .seed = seed + static_cast<std::uint64_t>(n)});
            dominance.measured = std::max(dominance.measured, log_additive_pics_bound(t, oracle) - log_additive_pics_bound(t, closed));
            const IndexSet set = build_index_set(t.mu);
            for (std::size_t r = 0; r < set.size(); ++r) {
                const double a = closed.n(set[r].i, set[r].j), b = oracle.n(set[r].i, set[r].j);
                agree.measured = std::max(agree.measured, std::abs(a - b) / b);
            }
        }
        dominance.pass = dominance.measured <= 1e-9;
        agree.pass = agree.measured <= agree.tolerance;
        out.push_back(dominance);
        out.push_back(agree);
    }
    {
        CheckResult c{"procedure ledger, budget safety and determinism", true, true, 0.0, 0.0, "violations"};
        const auto problem = make_synthetic(5, 3, VarianceKind::Constant);
        ProcedureConfig cfg;
        cfg.n0 = 5;
        cfg.delta = 7;
        cfg.total_budget = 60 * 15;
        for (auto rule : {SplitRule::Proportional, SplitRule::MostStarving}) {
            cfg.rule = rule;
            const auto a = run_meta_ocba(problem, cfg, seed);
            const auto b = run_meta_ocba(problem, cfg, seed);
            if (a.final_counts != b.final_counts || a.selection != b.selection || a.rounds.size() != b.rounds.size())
                c.measured += 1;
            if (a.final_counts.sum() != a.n_used) c.measured += 1;
            if (a.n_used > cfg.total_budget + static_cast<std::int64_t>(problem.k() + problem.m() - 2)) c.measured += 1;
            std::int64_t prev = 0;
            for (const auto& rec : a.rounds) {
                if (rec.n_used < prev) c.measured += 1;
                prev = rec.n_used;
            }
        }
        c.pass = c.measured == 0.0;
        out.push_back(c);
    }
    for (auto& c : out) c.detail = c.detail.empty() ? "measured " + fmt(c.measured) : c.detail + " = " + fmt(c.measured);
    return out;
}

} // namespace rocba
