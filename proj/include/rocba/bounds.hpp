#pragma once

// Upper bounds on the probability of incorrect selection (PICS) for a given
// relaxed allocation, plus the oracles that check them:
//   - mc_pics: Monte Carlo estimate of the true PICS under normal sample means
//   - numeric_min_f: direct numerical minimization of the additive bound
//
// All formulas are written against the true labeling carried by GroundTruth
// (truth.best, truth.worst_of); no reordering of the caller's tables happens.

#include "rocba/allocator.hpp"
#include "rocba/truth.hpp"

#include <cstdint>
#include <stdexcept>

namespace rocba {

/// Sum over the k+m-2 comparisons against the reference scenario:
/// competitors' worst cases and the best alternative's other columns.
/// Every index-set scenario must have n > 0.
double additive_pics_bound(const GroundTruth& truth, const Allocation& alloc);

/// log of the additive bound, finite even when every term underflows.
double log_additive_pics_bound(const GroundTruth& truth, const Allocation& alloc);

/// Sum over every non-best worst case (i, w(i)) and every column j of the best
/// alternative of Phi(-(mu_{i,w(i)} - mu_{b,j}) / sqrt(s2_{b,j}/n_{b,j} + s2_{i,w(i)}/n_{i,w(i)})).
double multiplicative_pics_bound(const GroundTruth& truth, const Allocation& alloc);

struct PicsEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t reps = 0;
};

/// Draws every sample mean as Normal(mu, sigma2 / n) per replication and counts
/// selections other than truth.best. Deterministic in `seed`.
PicsEstimate mc_pics(const GroundTruth& truth, const Allocation& alloc, std::int64_t reps, std::uint64_t seed);

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, Allocation best) : std::runtime_error(what), best_found(std::move(best)) {}
    Allocation best_found;
};

struct MinimizerOptions {
    int iterations = 4000; // sweeps per restart
    int restarts = 10;
    std::uint64_t seed = 20240601;
};

/// Numerical minimizer of the additive bound over allocations summing to N.
/// Searches only the index-set coordinates of the true means (the bound does
/// not depend on the others and is decreasing in each of these), using
/// pairwise budget transfers with golden-section line search on log f from
/// `restarts` random starting points. Throws NonConvergence if a restart runs
/// out of sweeps or the restarts disagree by more than 0.1% in f.
Allocation numeric_min_f(const GroundTruth& truth, double N, const MinimizerOptions& options = {});

} // namespace rocba
