#pragma once

// Simulators consumed by the procedures: the synthetic Gaussian configurations
// and an (s,S) inventory system whose demand distribution is ambiguous.

#include "rocba/core.hpp"
#include "rocba/rng.hpp"
#include "rocba/truth.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rocba {

/// k x m black box. Implementations are immutable; all randomness comes
/// through the caller's generator, so concurrent use with distinct generators
/// is safe.
class Simulator {
public:
    virtual ~Simulator() = default;
    virtual std::size_t k() const = 0;
    virtual std::size_t m() const = 0;
    virtual double draw(ScenarioId id, Rng& rng) const = 0;
};

enum class VarianceKind { Constant, Increasing, Decreasing };
enum class ConfigLabel { MM_CV, MM_IV, MM_DV, Custom };

std::string to_string(ConfigLabel label);

class SyntheticProblem final : public Simulator {
public:
    SyntheticProblem(GroundTruth truth, ConfigLabel label);

    std::size_t k() const override { return truth_.k(); }
    std::size_t m() const override { return truth_.m(); }
    double draw(ScenarioId id, Rng& rng) const override;

    const GroundTruth& truth() const noexcept { return truth_; }
    ConfigLabel label() const noexcept { return label_; }

private:
    GroundTruth truth_;
    Eigen::MatrixXd sd_;
    ConfigLabel label_;
};

/// Monotone means mu_ij = 0.5 i - 0.2 j - 1 (1-based i, j) with
/// CV: sigma2 = 16^2, IV: (12 + sqrt(0.2 i + j))^2, DV: (12 + 1 / (0.2 i + j))^2.
SyntheticProblem make_synthetic(std::size_t k, std::size_t m, VarianceKind kind);

/// The 3 x 3 unit-variance instance used to study budget concentration.
SyntheticProblem make_concentration_example();

double gaussian_draw(const SyntheticProblem& problem, ScenarioId id, Rng& rng);

struct InventoryParams {
    double s = 700.0;
    double S = 1500.0;
    double demand_mean = 40.0; // units per day, exponential
    int horizon = 500;         // days
    double holding_cost = 1.0; // per unit of end-of-day on-hand stock
    double fixed_order_cost = 36.0;
    double unit_cost = 2.0;
    double backorder_cost = 0.0; // per backordered unit per day
    double lead_time_mean = 6.0; // days, Poisson
    std::optional<double> initial_inventory; // defaults to S

    void validate() const;

    friend bool operator==(const InventoryParams&, const InventoryParams&) = default;
};

/// Average cost per day of one simulated horizon.
///
/// Each day: orders due arrive, exponential demand is served from stock (the
/// shortfall is backordered), then the inventory position (on hand + on order
/// - backorders) is reviewed and, if below s, raised to S with an order whose
/// Poisson lead time L delivers at the start of day t + L + 1.
double inventory_draw(const InventoryParams& params, Rng& rng);

class InventoryProblem final : public Simulator {
public:
    struct Policy {
        double s;
        double S;
    };

    InventoryProblem(std::vector<Policy> policies, std::vector<double> demand_means, InventoryParams base);

    std::size_t k() const override { return policies_.size(); }
    std::size_t m() const override { return demand_means_.size(); }
    double draw(ScenarioId id, Rng& rng) const override;

    const std::vector<Policy>& policies() const noexcept { return policies_; }
    const std::vector<double>& demand_means() const noexcept { return demand_means_; }
    InventoryParams params_for(ScenarioId id) const;

    /// Policy grid pairs dropped because s >= S.
    std::vector<Policy> excluded;

private:
    std::vector<Policy> policies_;
    std::vector<double> demand_means_;
    InventoryParams base_;
};

/// Alternatives enumerate (s, S) row-major over s then S, skipping s >= S;
/// distributions enumerate demand means in ascending order.
InventoryProblem build_inventory_problem(const std::vector<double>& s_grid, const std::vector<double>& S_grid,
                                         std::vector<double> demand_means, InventoryParams base = {});

/// Full-scale study grid: s in 700..1000 step 25, S in 1500..2000 step 50,
/// demand means 40..80 step 5 (k = 143, m = 9).
std::vector<double> full_scale_s_grid();
std::vector<double> full_scale_S_grid();
std::vector<double> full_scale_demand_means();

struct TruthEstimate {
    GroundTruth truth;
    Eigen::MatrixXd std_error; // of each scenario mean
    std::int64_t reps = 0;
    bool ambiguous = false; // runner-up worst case within one standard error of the best
    std::size_t runner_up = 0;
};

/// Sample means / variances from `reps` fresh draws per scenario. Scenario
/// (i,j) uses its own stream of `seed`, so the result does not depend on
/// `jobs`.
TruthEstimate estimate_truth(const Simulator& sim, std::int64_t reps, std::uint64_t seed, unsigned jobs = 1);

/// Derives best / runner-up / ambiguity from means, variances and reps.
TruthEstimate make_truth_estimate(Eigen::MatrixXd mean, Eigen::MatrixXd variance, std::int64_t reps);

/// CSV cache: scenario_i,scenario_j,s,S,demand_mean,reps,mean,variance,stderr
/// (1-based scenario indices, shortest round-trip decimal for reals).
void write_truth_cache(std::ostream& out, const InventoryProblem& problem, const TruthEstimate& est);
TruthEstimate read_truth_cache(std::istream& in, const InventoryProblem& problem);

} // namespace rocba
