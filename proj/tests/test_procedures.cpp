#include <doctest.h>

#include "rocba/procedures.hpp"

#include <json.hpp>

#include <sstream>

using namespace rocba;

using V = std::vector<std::int64_t>;

TEST_CASE("proportional split") {
    CHECK(proportional_split({10, 30, 0, 60}, 10) == V{1, 3, 0, 6});
    CHECK(proportional_split({1, 1, 1}, 2) == V{1, 1, 1});
    CHECK(proportional_split({5, 0, 0}, 7) == V{7, 0, 0});
    CHECK_THROWS_AS(proportional_split({0, 0}, 3), InvalidInput);
}

TEST_CASE("most starving split") {
    CHECK(most_starving_split({10, 30, 0, 60}, 10) == V{0, 0, 0, 10});
    CHECK(most_starving_split({4, 4}, 3) == V{3, 0});
    CHECK(most_starving_split({0, 0}, 5) == V{5, 0});
}

TEST_CASE("procedure names") {
    for (auto k : {ProcedureKind::ArOcba, ProcedureKind::ArOcbaStarving, ProcedureKind::EqualAllocation})
        CHECK(parse_procedure(to_string(k)) == k);
    CHECK_THROWS_AS(parse_procedure("R-OCBA"), InvalidInput);
}

TEST_CASE("config validation names the field") {
    ProcedureConfig c;
    c.n0 = 1;
    c.total_budget = 1000;
    try {
        c.validate(3, 3);
        FAIL("expected an error");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("n0") != std::string::npos);
        CHECK(std::string(e.what()).find("≥ 2") != std::string::npos);
    }
    c.n0 = 10;
    c.total_budget = 89;
    CHECK_THROWS_AS(c.validate(3, 3), InvalidInput);
    c.total_budget = 90;
    c.delta = 0;
    CHECK_THROWS_AS(c.validate(3, 3), InvalidInput);
}

TEST_CASE("budget equal to the initialization runs no rounds") {
    const auto p = make_synthetic(3, 3, VarianceKind::Constant);
    ProcedureConfig c;
    c.n0 = 10;
    c.delta = 5;
    c.total_budget = 90;
    const auto t = run_meta_ocba(p, c, 4);
    CHECK(t.rounds_run == 0);
    CHECK(t.rounds.empty());
    CHECK(t.n_used == 90);
    CHECK((t.final_counts.array() == 10).all());
    // Same seed and draw order as the equal allocation with 10 per scenario.
    CHECK(t.selection == run_equal_allocation(p, 90, 4).selection);
}

TEST_CASE("ledger, budget safety and starvation of off-set scenarios") {
    const auto p = make_synthetic(6, 4, VarianceKind::Increasing);
    for (auto rule : {SplitRule::Proportional, SplitRule::MostStarving}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ProcedureConfig c;
            c.n0 = 5;
            c.delta = 9;
            c.total_budget = 40 * 24;
            c.rule = rule;
            const auto t = run_meta_ocba(p, c, seed);
            CHECK(t.final_counts.sum() == t.n_used);
            CHECK(t.n_used <= c.total_budget + static_cast<std::int64_t>(6 + 4 - 2));
            CHECK(t.n_used + c.delta >= c.total_budget);

            Counts cum = Counts::Constant(6, 4, c.n0);
            Counts touched = Counts::Zero(6, 4);
            std::int64_t prev = cum.sum();
            for (const auto& rec : t.rounds) {
                std::int64_t granted = 0;
                REQUIRE(rec.slots.size() == 9);
                for (std::size_t r = 0; r < rec.slots.size(); ++r) {
                    cum(rec.slots[r].i, rec.slots[r].j) += rec.grants[r];
                    touched(rec.slots[r].i, rec.slots[r].j) = 1;
                    granted += rec.grants[r];
                }
                CHECK(granted >= 1);
                CHECK(rec.n_used == cum.sum());
                CHECK(rec.n_used >= prev);
                prev = rec.n_used;
                if (rule == SplitRule::MostStarving) CHECK(granted == c.delta);
            }
            CHECK(cum == t.final_counts);
            for (Eigen::Index i = 0; i < 6; ++i)
                for (Eigen::Index j = 0; j < 4; ++j)
                    if (!touched(i, j)) CHECK(t.final_counts(i, j) == c.n0);
        }
    }
}

TEST_CASE("runs are deterministic and serialize identically") {
    const auto p = make_synthetic(4, 3, VarianceKind::Decreasing);
    ProcedureConfig c;
    c.n0 = 4;
    c.delta = 6;
    c.total_budget = 30 * 12;
    std::ostringstream a, b;
    write_trace(a, run_meta_ocba(p, c, 17));
    write_trace(b, run_meta_ocba(p, c, 17));
    CHECK(!a.str().empty());
    CHECK(a.str() == b.str());
    std::ostringstream other;
    write_trace(other, run_meta_ocba(p, c, 18));
    CHECK(other.str() != a.str());
}

TEST_CASE("trace lines are 1-based JSON records") {
    const auto p = make_synthetic(2, 2, VarianceKind::Constant);
    ProcedureConfig c;
    c.n0 = 3;
    c.delta = 2;
    c.total_budget = 20;
    std::ostringstream out;
    write_trace(out, run_meta_ocba(p, c, 1));
    std::istringstream in(out.str());
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("{\"t\":1,\"n_used\":", 0) == 0);
    const auto rec = nlohmann::json::parse(first);
    CHECK(rec["slots"].size() == 3);
    for (const auto& s : rec["slots"]) {
        CHECK(s[0].get<int>() >= 1);
        CHECK(s[1].get<int>() >= 1);
    }
    CHECK(rec["grants"].size() == 3);
}

TEST_CASE("equal allocation leaves the remainder unspent") {
    const auto p = make_synthetic(3, 3, VarianceKind::Constant);
    auto t = run_equal_allocation(p, 90, 1);
    CHECK((t.final_counts.array() == 10).all());
    CHECK(t.unspent() == 0);
    t = run_equal_allocation(p, 91, 1);
    CHECK((t.final_counts.array() == 10).all());
    CHECK(t.unspent() == 1);
    CHECK_THROWS_AS(run_equal_allocation(p, 8, 1), InvalidInput);
}

TEST_CASE("run_procedure picks the rule from the kind") {
    const auto p = make_synthetic(3, 2, VarianceKind::Constant);
    ProcedureConfig c;
    c.n0 = 4;
    c.delta = 5;
    c.total_budget = 120;
    const auto starving = run_procedure(p, ProcedureKind::ArOcbaStarving, c, 3);
    for (const auto& rec : starving.rounds) {
        int nonzero = 0;
        for (auto g : rec.grants) nonzero += g > 0;
        CHECK(nonzero == 1);
    }
}

namespace {

class Failing final : public Simulator {
public:
    std::size_t k() const override { return 2; }
    std::size_t m() const override { return 2; }
    double draw(ScenarioId id, Rng& rng) const override {
        if (++calls_ > 20) throw std::runtime_error("sensor offline");
        return static_cast<double>(id.i) + std::uniform_real_distribution<double>(0, 1)(rng);
    }
    mutable int calls_ = 0;
};

} // namespace

TEST_CASE("simulator failures carry round and scenario context") {
    Failing sim;
    ProcedureConfig c;
    c.n0 = 3;
    c.delta = 4;
    c.total_budget = 100;
    try {
        run_meta_ocba(sim, c, 1);
        FAIL("expected a failure");
    } catch (const SimulationError& e) {
        const std::string what = e.what();
        CHECK(what.find("round ") != std::string::npos);
        CHECK(what.find("scenario (") != std::string::npos);
        CHECK(what.find("sensor offline") != std::string::npos);
    }
}
