// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 7   run one criterion
//
// Exit status is 0 iff every selected criterion passes.

#include "rocba/allocator.hpp"
#include "rocba/bounds.hpp"
#include "rocba/commands.hpp"
#include "rocba/experiments.hpp"
#include "rocba/parallel.hpp"
#include "rocba/problems.hpp"
#include "rocba/procedures.hpp"
#include "rocba/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace rocba;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

GroundTruth random_truth(Rng& rng, std::size_t k, std::size_t m) {
    std::uniform_real_distribution<double> mean(0.0, 1.0), var(0.5, 2.0);
    for (;;) {
        Eigen::MatrixXd mu(k, m), s2(k, m);
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            mu(i) = mean(rng);
            s2(i) = var(rng);
        }
        auto t = make_ground_truth(mu, s2);
        if (t.unique_best) return t;
    }
}

ProcedureConfig procedure(std::int64_t n0, std::int64_t delta, std::int64_t N) {
    ProcedureConfig c;
    c.n0 = n0;
    c.delta = delta;
    c.total_budget = N;
    return c;
}

unsigned jobs() { return default_jobs(); }

// 1. Closed form vs numerical minimizer of the additive bound.
Outcome allocator_oracle_agreement() {
    Rng rng = make_rng(101);
    std::uniform_int_distribution<int> kd(2, 5);
    const double N = 1e5;
    double worst_coord = 0.0, worst_ratio = 0.0;
    int instances = 0;
    while (instances < 20) {
        const auto k = static_cast<std::size_t>(kd(rng));
        const auto m = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, static_cast<int>(7 - k))(rng));
        const auto t = random_truth(rng, k, m);
        ++instances;
        const auto closed = theorem_allocation(t, N);
        const auto oracle = numeric_min_f(t, N);
        const auto set = build_index_set(t.mu);
        for (const auto& id : set.entries)
            worst_coord = std::max(worst_coord, std::abs(closed.n(id.i, id.j) / oracle.n(id.i, id.j) - 1.0));
        worst_ratio = std::max(worst_ratio, std::exp(log_additive_pics_bound(t, closed) - log_additive_pics_bound(t, oracle)));
    }
    const bool pass = worst_coord <= 0.02 && worst_ratio <= 1.001;
    return {pass, "20 instances, max per-coordinate deviation " + num(worst_coord) + " (<= 0.02), max f(closed)/f(oracle) " +
                      num(worst_ratio, 6) + " (<= 1.001)"};
}

// 2. Zero budget outside the index set.
Outcome zeros_outside_index_set() {
    Rng rng = make_rng(102);
    std::uniform_int_distribution<int> dim(2, 6);
    int violations = 0;
    for (int n = 0; n < 50; ++n) {
        const auto t = random_truth(rng, static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
        const auto a = theorem_allocation(t, 1e5);
        for (std::size_t i = 0; i < t.k(); ++i)
            for (std::size_t j = 0; j < t.m(); ++j)
                if (i != t.best && j != t.worst_of[i] && a.n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0)
                    ++violations;
    }
    return {violations == 0, "50 instances, " + std::to_string(violations) + " nonzero off-set coordinates"};
}

// 3. Monte Carlo PICS never exceeds either bound by more than 3 standard errors.
Outcome bound_validity() {
    Rng rng = make_rng(103);
    std::uniform_int_distribution<int> kd(2, 5), md(1, 5);
    std::uniform_real_distribution<double> size(1.0, 30.0);
    std::vector<GroundTruth> truths;
    std::vector<Allocation> allocs;
    for (int n = 0; n < 50; ++n) {
        truths.push_back(random_truth(rng, static_cast<std::size_t>(kd(rng)), static_cast<std::size_t>(md(rng))));
        Allocation a{Eigen::MatrixXd(truths.back().mu.rows(), truths.back().mu.cols())};
        for (Eigen::Index i = 0; i < a.n.size(); ++i) a.n(i) = size(rng);
        allocs.push_back(a);
    }
    std::vector<double> add_z(50), mult_z(50);
    parallel_for(50, jobs(), [&](std::size_t n) {
        const auto mc = mc_pics(truths[n], allocs[n], 100000, 3000 + n);
        const double se = std::max(mc.std_error, 1e-5);
        add_z[n] = (mc.estimate - additive_pics_bound(truths[n], allocs[n])) / se;
        mult_z[n] = (mc.estimate - multiplicative_pics_bound(truths[n], allocs[n])) / se;
    });
    const double a = *std::max_element(add_z.begin(), add_z.end());
    const double m = *std::max_element(mult_z.begin(), mult_z.end());
    return {a <= 3.0 && m <= 3.0, "50 instances at 1e5 reps, max (mc - additive)/se " + num(a) +
                                      ", max (mc - multiplicative)/se " + num(m) + " (<= 3)"};
}

// 4. Both bounds coincide for a single distribution.
Outcome m1_coincidence() {
    Rng rng = make_rng(104);
    std::uniform_int_distribution<int> kd(2, 8);
    std::uniform_real_distribution<double> size(1.0, 100.0);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const auto t = random_truth(rng, static_cast<std::size_t>(kd(rng)), 1);
        Allocation a{Eigen::MatrixXd(t.mu.rows(), 1)};
        for (Eigen::Index i = 0; i < a.n.size(); ++i) a.n(i) = size(rng);
        worst = std::max(worst, std::abs(additive_pics_bound(t, a) - multiplicative_pics_bound(t, a)));
    }
    return {worst <= 1e-12, "100 instances, max |additive - multiplicative| " + num(worst) + " (<= 1e-12)"};
}

// 5. Stage-wise rule ordering on MM-CV.
Outcome rule_ordering() {
    const auto bench = make_benchmark(make_synthetic(20, 5, VarianceKind::Constant));
    const auto cfg = procedure(20, 20, (20 + 50) * 100);
    const auto ar = estimate_pcs(bench, ProcedureKind::ArOcba, cfg, 2000, 1, jobs());
    const auto ea = estimate_pcs(bench, ProcedureKind::EqualAllocation, cfg, 2000, 1, jobs());
    const auto st = estimate_pcs(bench, ProcedureKind::ArOcbaStarving, cfg, 2000, 1, jobs());
    const double g1 = (ar.pcs - ea.pcs) / pooled_stderr(ar, ea);
    const double g2 = (ea.pcs - st.pcs) / pooled_stderr(ea, st);
    const double g3 = (ar.pcs - st.pcs) / pooled_stderr(ar, st);
    return {g1 > 3 && g2 > 3 && g3 > 3, "PCS AR-OCBA " + num(ar.pcs) + ", EA " + num(ea.pcs) + ", Starving " + num(st.pcs) +
                                            "; gaps in pooled se: AR-EA " + num(g1) + ", EA-Starving " + num(g2) +
                                            ", AR-Starving " + num(g3) + " (each > 3)"};
}

// 6. AR-OCBA PCS does not fall as the budget grows.
Outcome consistency_trend() {
    const auto bench = make_benchmark(make_synthetic(20, 5, VarianceKind::Constant));
    std::vector<PcsResult> r;
    std::string curve;
    for (std::int64_t c : {10, 20, 30, 40, 50}) {
        r.push_back(estimate_pcs(bench, ProcedureKind::ArOcba, procedure(20, 20, (20 + c) * 100), 1000, 1, jobs()));
        curve += (curve.empty() ? "" : ", ") + num(r.back().pcs);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < r.size(); ++n) worst = std::max(worst, (r[n - 1].pcs - r[n].pcs) / pooled_stderr(r[n - 1], r[n]));
    return {worst <= 2.0, "PCS over c=10..50: " + curve + "; max drop " + num(worst) + " pooled se (<= 2)"};
}

// 7. Budget concentration on the 3x3 instance.
Outcome concentration() {
    const auto problem = make_concentration_example();
    const auto set = build_index_set(problem.truth().mu);
    const auto cfg = procedure(20, 20, 5140 * 9);
    std::vector<unsigned char> share_ok(100), dominate_ok(100);
    parallel_for(100, jobs(), [&](std::size_t r) {
        auto quiet = cfg;
        quiet.record_rounds = false;
        const auto t = run_meta_ocba(problem, quiet, 7000 + r);
        std::int64_t inside = 0, min_inside = std::numeric_limits<std::int64_t>::max(), max_outside = 0;
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) {
                const auto n = t.final_counts(i, j);
                if (set.contains({static_cast<std::size_t>(i), static_cast<std::size_t>(j)})) {
                    inside += n;
                    min_inside = std::min(min_inside, n);
                } else {
                    max_outside = std::max(max_outside, n);
                }
            }
        share_ok[r] = static_cast<double>(inside) >= 0.8 * static_cast<double>(t.final_counts.sum());
        dominate_ok[r] = min_inside > max_outside;
    });
    int share = 0, dominate = 0, both = 0;
    for (std::size_t r = 0; r < 100; ++r) {
        share += share_ok[r];
        dominate += dominate_ok[r];
        both += share_ok[r] && dominate_ok[r];
    }
    const auto pcs = estimate_pcs(make_benchmark(problem), ProcedureKind::ArOcba, cfg, 1000, 1, jobs());
    return {both >= 90 && pcs.pcs >= 0.95,
            std::to_string(both) + "/100 runs concentrated (share >= 80%: " + std::to_string(share) +
                ", every relevant above every irrelevant: " + std::to_string(dominate) + "; need >= 90), PCS " +
                num(pcs.pcs) + " (>= 0.95)"};
}

// 8. Sensitivity to delta and n0 at N = 50 km.
Outcome sensitivity() {
    const auto bench = make_benchmark(make_synthetic(20, 5, VarianceKind::Constant));
    SweepHooks hooks;
    hooks.jobs = jobs();
    const auto d = sensitivity_sweep(bench, SensitivityParam::Delta, {2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24},
                                     procedure(10, 10, 0), 50, 2000, 1, hooks);
    double lo = 1.0, hi = 0.0;
    for (const auto& row : d.rows) {
        lo = std::min(lo, row.pcs);
        hi = std::max(hi, row.pcs);
    }
    const std::vector<std::int64_t> n0s{3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36};
    const auto n = sensitivity_sweep(bench, SensitivityParam::N0, n0s, procedure(10, 10, 0), 50, 2000, 1, hooks);
    std::string curve;
    double mid = 0.0;
    for (std::size_t i = 0; i < n.rows.size(); ++i) {
        curve += (curve.empty() ? "" : ", ") + num(n.rows[i].pcs, 3);
        if (n0s[i] == 12) mid = n.rows[i].pcs;
    }
    const double first = n.rows.front().pcs, last = n.rows.back().pcs;
    const bool pass = hi - lo <= 0.05 && mid >= first && mid >= last;
    return {pass, "delta sweep range " + num(hi - lo) + " (<= 0.05); n0 sweep 3..36: " + curve + "; PCS(n0=12) " +
                      num(mid) + " vs endpoints " + num(first) + ", " + num(last)};
}

// 9. Reduced inventory instance.
Outcome inventory() {
    InventoryParams base;
    auto problem = std::make_shared<InventoryProblem>(
        build_inventory_problem({700, 702, 704, 706}, {1500, 1504, 1508}, {40, 45, 50}, base));
    const auto truth = estimate_truth(*problem, 20000, 1, jobs());
    if (truth.ambiguous) return {false, "oracle best is ambiguous at 2e4 reps"};
    const auto bench = make_benchmark(problem, truth);
    const auto cfg = procedure(10, 10, (10 + 40) * 36);
    const auto ar = estimate_pcs(bench, ProcedureKind::ArOcba, cfg, 200, 1, jobs());
    const auto ea = estimate_pcs(bench, ProcedureKind::EqualAllocation, cfg, 200, 1, jobs());
    const double gap = (ar.pcs - ea.pcs) / pooled_stderr(ar, ea);
    return {gap > 2.0, "k=12, m=3, oracle best alternative " + std::to_string(truth.truth.best + 1) +
                           " (unambiguous); PCS AR-OCBA " + num(ar.pcs) + ", EA " + num(ea.pcs) + ", gap " + num(gap) +
                           " pooled se (> 2)"};
}

// 10. Determinism and the budget ledger.
Outcome determinism_and_ledger() {
    std::vector<std::string> failures;
    auto fail = [&](const std::string& what) { failures.push_back(what); };

    struct Case {
        std::shared_ptr<const Simulator> sim;
        ProcedureConfig cfg;
    };
    std::vector<Case> cases;
    for (auto kind : {VarianceKind::Constant, VarianceKind::Increasing, VarianceKind::Decreasing})
        cases.push_back({std::make_shared<SyntheticProblem>(make_synthetic(20, 5, kind)), procedure(20, 20, 70 * 100)});
    cases.push_back({std::make_shared<SyntheticProblem>(make_concentration_example()), procedure(20, 20, 5140 * 9)});
    cases.push_back({std::make_shared<SyntheticProblem>(make_synthetic(7, 4, VarianceKind::Constant)), procedure(3, 7, 31 * 28)});
    cases.push_back({std::make_shared<InventoryProblem>(build_inventory_problem({700, 704}, {1500, 1508}, {40, 50})),
                     procedure(10, 10, 50 * 8)});

    int runs = 0;
    for (const auto& c : cases) {
        const auto k = c.sim->k(), m = c.sim->m();
        for (auto rule : {SplitRule::Proportional, SplitRule::MostStarving}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                auto cfg = c.cfg;
                cfg.rule = rule;
                const auto t = run_meta_ocba(*c.sim, cfg, seed);
                ++runs;
                Counts cum = Counts::Constant(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m), cfg.n0);
                for (const auto& rec : t.rounds) {
                    for (std::size_t r = 0; r < rec.slots.size(); ++r) cum(rec.slots[r].i, rec.slots[r].j) += rec.grants[r];
                    if (rec.n_used != cum.sum()) fail("ledger mismatch in round " + std::to_string(rec.t));
                }
                if (cum != t.final_counts || t.final_counts.sum() != t.n_used) fail("final counts disagree with the ledger");
                if (t.n_used > cfg.total_budget + static_cast<std::int64_t>(k + m - 2)) fail("budget overshoot");
                if (seed <= 2) {
                    std::ostringstream a, b;
                    write_trace(a, t);
                    write_trace(b, run_meta_ocba(*c.sim, cfg, seed));
                    if (a.str() != b.str()) fail("trace differs between identical runs");
                }
            }
        }
    }

    SweepSpec spec;
    spec.bench = make_benchmark(make_synthetic(6, 3, VarianceKind::Increasing));
    spec.procedures = {ProcedureKind::ArOcba, ProcedureKind::EqualAllocation, ProcedureKind::ArOcbaStarving};
    spec.c_values = {5, 15};
    spec.n0 = 5;
    spec.delta = 5;
    spec.replications = 200;
    auto report = [&](unsigned workers) {
        SweepHooks hooks;
        hooks.jobs = workers;
        std::ostringstream out;
        write_report_csv(out, budget_sweep(spec, hooks), false);
        return out.str();
    };
    const std::string r1 = report(1), r2 = report(1), r3 = report(3);
    if (r1 != r2) fail("report differs between identical sweeps");
    if (r1 != r3) fail("report depends on the worker count");

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rocba_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path config = dir / "config.json";
    std::ofstream(config) << R"({"problem": {"k": 5, "m": 4, "variance": "DV"}, "procedure": {"n0": 5, "delta": 4},
                                 "experiment": {"c": 25, "c_values": [5, 10], "replications": 100},
                                 "output": {"record_wall_time": false}})";
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    std::ostringstream sink;
    for (const char* sub : {"a", "b"}) {
        CommonOptions o;
        o.config_path = config.string();
        o.out_dir = (dir / sub).string();
        o.seed = 42;
        if (cmd_run(o, {sink, sink}) != 0 || cmd_pcs(o, {sink, sink}) != 0) fail("CLI command failed");
    }
    for (const char* file : {"trace.jsonl", "trace.jsonl.meta.json", "pcs.csv"})
        if (slurp(dir / "a" / file) != slurp(dir / "b" / file) || slurp(dir / "a" / file).empty())
            fail(std::string("CLI output ") + file + " differs between identical invocations");
    fs::remove_all(dir);

    std::string detail = std::to_string(runs) + " traced runs, sweeps at 1 and 3 workers, CLI trace and report files";
    if (!failures.empty()) detail += "; first failure: " + failures.front();
    return {failures.empty(), detail};
}

struct Criterion {
    std::string title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {"allocator-oracle agreement", allocator_oracle_agreement},
        {"zero allocation outside the index set", zeros_outside_index_set},
        {"bound validity against Monte Carlo", bound_validity},
        {"bound coincidence for m = 1", m1_coincidence},
        {"stage-wise rule ordering (MM-CV, k=20, m=5, c=50)", rule_ordering},
        {"consistency trend (MM-CV, c=10..50)", consistency_trend},
        {"budget concentration (3x3 instance)", concentration},
        {"sensitivity to delta and n0", sensitivity},
        {"reduced inventory instance", inventory},
        {"determinism and budget ledger", determinism_and_ledger},
    };

    bool all = true;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        if (only != 0 && static_cast<std::size_t>(only) != n + 1) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[n].run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << n + 1 << ": " << criteria[n].title << " | "
                  << o.detail << " | " << std::fixed << std::setprecision(1) << secs << " s" << std::endl;
        std::cout.unsetf(std::ios::fixed);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
