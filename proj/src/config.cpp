#include "rocba/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace rocba {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    std::string key(const std::string& name) const { return path_ + "/" + name; }

    const json* find(const std::string& name) {
        seen_.insert(name);
        auto it = j_.find(name);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename T>
    void get(const std::string& name, T& out) {
        const json* v = find(name);
        if (!v) return;
        try {
            out = v->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(key(name), "wrong type");
        }
    }

    void get_unsigned(const std::string& name, std::uint64_t& out) {
        const json* v = find(name);
        if (!v) return;
        if (!v->is_number_integer() || (v->is_number_integer() && v->get<std::int64_t>() < 0 && !v->is_number_unsigned()))
            throw ConfigError(key(name), "expected a nonnegative integer");
        out = v->get<std::uint64_t>();
    }

    void get_int(const std::string& name, std::int64_t& out) {
        const json* v = find(name);
        if (!v) return;
        if (!v->is_number_integer()) throw ConfigError(key(name), "expected an integer");
        out = v->get<std::int64_t>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(key(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& message) {
    if (!ok) throw ConfigError(key, message);
}

void parse_problem(const json& j, ProblemSection& p) {
    Section s(j, "/problem");
    s.get("kind", p.kind);
    require(p.kind == "synthetic" || p.kind == "inventory", s.key("kind"), "must be \"synthetic\" or \"inventory\"");
    std::int64_t k = static_cast<std::int64_t>(p.k), m = static_cast<std::int64_t>(p.m);
    s.get_int("k", k);
    s.get_int("m", m);
    s.get("variance", p.variance);
    s.get("preset", p.preset);
    s.get("means", p.means);
    s.get("variances", p.variances);
    s.get("s_grid", p.s_grid);
    s.get("S_grid", p.S_grid);
    s.get("demand_means", p.demand_means);

    if (const json* params = s.find("params")) {
        Section ps(*params, "/problem/params");
        auto& q = p.params;
        std::int64_t horizon = q.horizon;
        ps.get_int("horizon", horizon);
        q.horizon = static_cast<int>(horizon);
        ps.get("holding_cost", q.holding_cost);
        ps.get("fixed_order_cost", q.fixed_order_cost);
        ps.get("unit_cost", q.unit_cost);
        ps.get("backorder_cost", q.backorder_cost);
        ps.get("lead_time_mean", q.lead_time_mean);
        if (const json* init = ps.find("initial_inventory"); init && !init->is_null()) {
            require(init->is_number(), "/problem/params/initial_inventory", "expected a number");
            q.initial_inventory = init->get<double>();
        }
        ps.finish();
        require(q.horizon >= 1, "/problem/params/horizon", "must be >= 1");
        require(q.holding_cost >= 0 && q.fixed_order_cost >= 0 && q.unit_cost >= 0 && q.backorder_cost >= 0,
                "/problem/params", "costs must be >= 0");
        require(q.lead_time_mean >= 0, "/problem/params/lead_time_mean", "must be >= 0");
    }
    if (const json* truth = s.find("truth")) {
        Section ts(*truth, "/problem/truth");
        ts.get_int("reps", p.truth_reps);
        ts.get_unsigned("seed", p.truth_seed);
        ts.get("cache", p.truth_cache);
        ts.finish();
        require(p.truth_reps >= 2, "/problem/truth/reps", "must be >= 2");
    }
    s.finish();

    if (p.kind == "synthetic") {
        if (!p.means.empty() || !p.variances.empty()) {
            require(!p.means.empty() && p.means.size() == p.variances.size(), s.key("variances"),
                    "means and variances must have the same shape");
            const std::size_t cols = p.means.front().size();
            require(cols >= 1, s.key("means"), "rows must be nonempty");
            for (std::size_t i = 0; i < p.means.size(); ++i) {
                require(p.means[i].size() == cols, s.key("means"), "rows must have equal length");
                require(p.variances[i].size() == cols, s.key("variances"), "rows must match means");
                for (double v : p.variances[i]) require(v > 0, s.key("variances"), "entries must be > 0");
            }
            p.k = p.means.size();
            p.m = cols;
        } else if (!p.preset.empty()) {
            require(p.preset == "concentration", s.key("preset"), "unknown preset (expected \"concentration\")");
            p.k = 3;
            p.m = 3;
        } else {
            require(k >= 2, s.key("k"), "must be >= 2");
            require(m >= 1, s.key("m"), "must be >= 1");
            require(p.variance == "CV" || p.variance == "IV" || p.variance == "DV", s.key("variance"),
                    "must be CV, IV or DV");
            p.k = static_cast<std::size_t>(k);
            p.m = static_cast<std::size_t>(m);
        }
    } else {
        require(!p.s_grid.empty(), s.key("s_grid"), "must be nonempty");
        require(!p.S_grid.empty(), s.key("S_grid"), "must be nonempty");
        require(!p.demand_means.empty(), s.key("demand_means"), "must be nonempty");
        for (double d : p.demand_means) require(d >= 0, s.key("demand_means"), "entries must be >= 0");
    }
}

void parse_procedure_section(const json& j, ProcedureSection& p) {
    Section s(j, "/procedure");
    s.get("name", p.name);
    s.get_int("n0", p.n0);
    s.get_int("delta", p.delta);
    const bool has_rule = s.find("rule") != nullptr;
    s.get("rule", p.rule);
    s.finish();
    try {
        parse_procedure(p.name);
    } catch (const InvalidInput& e) {
        throw ConfigError(s.key("name"), e.what());
    }
    require(p.n0 >= 2, s.key("n0"), "n0 must be ≥ 2 (got " + std::to_string(p.n0) + ")");
    require(p.delta >= 1, s.key("delta"), "delta must be >= 1");
    require(p.rule == "proportional" || p.rule == "most_starving", s.key("rule"),
            "must be \"proportional\" or \"most_starving\"");
    if (!has_rule) p.rule = p.name == "AR-OCBA-Starving" ? "most_starving" : "proportional";
    if (p.name == "AR-OCBA") require(p.rule == "proportional", s.key("rule"), "AR-OCBA uses the proportional rule");
    if (p.name == "AR-OCBA-Starving")
        require(p.rule == "most_starving", s.key("rule"), "AR-OCBA-Starving uses the most_starving rule");
}

void parse_experiment(const json& j, ExperimentSection& e) {
    Section s(j, "/experiment");
    s.get("procedures", e.procedures);
    s.get("c_values", e.c_values);
    s.get_int("c", e.c);
    s.get_int("N", e.N);
    s.get_int("replications", e.replications);
    s.get_unsigned("base_seed", e.base_seed);
    s.get("vary", e.vary);
    s.get("values", e.values);
    s.get_int("total_per_scenario", e.total_per_scenario);
    s.finish();
    require(!e.procedures.empty(), s.key("procedures"), "must be nonempty");
    for (const auto& name : e.procedures) {
        try {
            parse_procedure(name);
        } catch (const InvalidInput& ex) {
            throw ConfigError(s.key("procedures"), ex.what());
        }
    }
    require(!e.c_values.empty(), s.key("c_values"), "must be nonempty");
    for (auto c : e.c_values) require(c >= 1, s.key("c_values"), "entries must be >= 1");
    require(e.c >= 0, s.key("c"), "must be >= 0");
    require(e.N >= 0, s.key("N"), "must be >= 0");
    require(e.replications >= 1, s.key("replications"), "must be >= 1");
    require(e.vary == "n0" || e.vary == "delta", s.key("vary"), "must be \"n0\" or \"delta\"");
    require(!e.values.empty(), s.key("values"), "must be nonempty");
    for (auto v : e.values)
        require(v >= (e.vary == "n0" ? 2 : 1), s.key("values"), e.vary == "n0" ? "n0 values must be >= 2" : "delta values must be >= 1");
    require(e.total_per_scenario >= 1, s.key("total_per_scenario"), "must be >= 1");
}

void parse_output(const json& j, OutputSection& o) {
    Section s(j, "/output");
    s.get("dir", o.dir);
    s.get("format", o.format);
    s.get("record_wall_time", o.record_wall_time);
    s.finish();
    require(o.format == "csv" || o.format == "json", s.key("format"), "must be \"csv\" or \"json\"");
    require(!o.dir.empty(), s.key("dir"), "must be nonempty");
}

} // namespace

RunConfig parse_config(const nlohmann::json& doc) {
    RunConfig c;
    Section root(doc, "");
    if (const json* p = root.find("problem")) parse_problem(*p, c.problem);
    else parse_problem(json::object(), c.problem);
    if (const json* p = root.find("procedure")) parse_procedure_section(*p, c.procedure);
    else parse_procedure_section(json::object(), c.procedure);
    if (const json* p = root.find("experiment")) parse_experiment(*p, c.experiment);
    else parse_experiment(json::object(), c.experiment);
    if (const json* p = root.find("output")) parse_output(*p, c.output);
    root.finish();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    auto& p = j["problem"];
    p["kind"] = c.problem.kind;
    if (c.problem.kind == "synthetic") {
        if (!c.problem.means.empty()) {
            p["means"] = c.problem.means;
            p["variances"] = c.problem.variances;
        } else if (!c.problem.preset.empty()) {
            p["preset"] = c.problem.preset;
        } else {
            p["k"] = c.problem.k;
            p["m"] = c.problem.m;
            p["variance"] = c.problem.variance;
        }
    } else {
        p["s_grid"] = c.problem.s_grid;
        p["S_grid"] = c.problem.S_grid;
        p["demand_means"] = c.problem.demand_means;
        const auto& q = c.problem.params;
        auto& pj = p["params"];
        pj["horizon"] = q.horizon;
        pj["holding_cost"] = q.holding_cost;
        pj["fixed_order_cost"] = q.fixed_order_cost;
        pj["unit_cost"] = q.unit_cost;
        pj["backorder_cost"] = q.backorder_cost;
        pj["lead_time_mean"] = q.lead_time_mean;
        if (q.initial_inventory) pj["initial_inventory"] = *q.initial_inventory;
        p["truth"] = {{"reps", c.problem.truth_reps}, {"seed", c.problem.truth_seed}, {"cache", c.problem.truth_cache}};
    }
    j["procedure"] = {{"name", c.procedure.name}, {"n0", c.procedure.n0}, {"delta", c.procedure.delta},
                      {"rule", c.procedure.rule}};
    auto& e = j["experiment"];
    e["procedures"] = c.experiment.procedures;
    e["c_values"] = c.experiment.c_values;
    e["c"] = c.experiment.c;
    e["N"] = c.experiment.N;
    e["replications"] = c.experiment.replications;
    e["base_seed"] = c.experiment.base_seed;
    e["vary"] = c.experiment.vary;
    e["values"] = c.experiment.values;
    e["total_per_scenario"] = c.experiment.total_per_scenario;
    j["output"] = {{"dir", c.output.dir}, {"format", c.output.format}, {"record_wall_time", c.output.record_wall_time}};
    return j;
}

std::string config_hash(const nlohmann::ordered_json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProcedureKind procedure_kind(const ProcedureSection& p) { return parse_procedure(p.name); }

ProcedureConfig procedure_config(const RunConfig& config, std::size_t k, std::size_t m) {
    ProcedureConfig pc;
    pc.n0 = config.procedure.n0;
    pc.delta = config.procedure.delta;
    pc.rule = config.procedure.rule == "most_starving" ? SplitRule::MostStarving : SplitRule::Proportional;
    const auto km = static_cast<std::int64_t>(k * m);
    pc.total_budget = config.experiment.N > 0 ? config.experiment.N : (pc.n0 + config.experiment.c) * km;
    if (procedure_kind(config.procedure) != ProcedureKind::EqualAllocation) {
        try {
            pc.validate(k, m);
        } catch (const InvalidInput& e) {
            throw ConfigError("/experiment/N", e.what());
        }
    }
    return pc;
}

SyntheticProblem build_synthetic(const ProblemSection& p) {
    if (!p.means.empty()) {
        Eigen::MatrixXd mu(p.means.size(), p.means.front().size()), s2(mu.rows(), mu.cols());
        for (Eigen::Index i = 0; i < mu.rows(); ++i)
            for (Eigen::Index j = 0; j < mu.cols(); ++j) {
                mu(i, j) = p.means[i][j];
                s2(i, j) = p.variances[i][j];
            }
        return SyntheticProblem(make_ground_truth(mu, s2), ConfigLabel::Custom);
    }
    if (p.preset == "concentration") return make_concentration_example();
    const VarianceKind kind = p.variance == "IV"   ? VarianceKind::Increasing
                              : p.variance == "DV" ? VarianceKind::Decreasing
                                                   : VarianceKind::Constant;
    return make_synthetic(p.k, p.m, kind);
}

std::shared_ptr<const InventoryProblem> build_inventory(const ProblemSection& p) {
    try {
        return std::make_shared<InventoryProblem>(build_inventory_problem(p.s_grid, p.S_grid, p.demand_means, p.params));
    } catch (const InvalidInput& e) {
        throw ConfigError("/problem", e.what());
    }
}

std::shared_ptr<const Simulator> build_simulator(const ProblemSection& p) {
    if (p.kind == "inventory") return build_inventory(p);
    return std::make_shared<SyntheticProblem>(build_synthetic(p));
}

} // namespace rocba
