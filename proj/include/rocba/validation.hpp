#pragma once

// Checks on allocations that hold independently of how they were computed;
// used by `rocba validate` and the tests.

#include "rocba/truth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rocba {

struct IdentityDiscrepancy {
    double ratio = 0.0;     // max relative spread of n_r (delta_r / sigma_r)^2 over non-reference slots
    double reference = 0.0; // relative error of n_ref = sigma_ref sqrt(sum n_r^2 / sigma_r^2)
    double closure = 0.0;   // relative error of sum n against N
};

/// Measures the closed-form balance equations on an allocation, using the
/// index set and gaps of the true means.
IdentityDiscrepancy allocation_identities(const GroundTruth& truth, const Allocation& alloc, double N);

/// True iff every scenario outside the index set of the true means has n == 0.
bool zero_outside_index_set(const GroundTruth& truth, const Allocation& alloc);

struct CheckResult {
    std::string name;
    bool pass = false;
    bool gating = true;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Oracle suite: balance identities, zeros outside the index set, bound
/// validity against Monte Carlo, m = 1 bound coincidence, oracle dominance,
/// allocator-vs-oracle agreement (informational), and a seeded procedure run
/// checked for ledger consistency, budget safety and determinism.
std::vector<CheckResult> run_validation_suite(bool quick, std::uint64_t seed);

} // namespace rocba
