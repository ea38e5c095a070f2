#include "crowd/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace crowd {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
        }
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key \"" + std::string(key) + "\"");
    }
    return obj.at(key);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

long as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return v.get<long>();
}

std::vector<double> as_number_list(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty list");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_number(e, where));
    return out;
}

SkillDistribution parse_population(const json& v, const std::string& where) {
    if (!v.is_object()) throw ConfigError(where + ": expected an object");
    const std::string type = require(v, where, "type").get<std::string>();
    if (type == "beta") {
        check_keys(v, where, {"type", "alpha", "beta"});
        return SkillDistribution::beta(as_number(require(v, where, "alpha"), where),
                                       as_number(require(v, where, "beta"), where));
    }
    if (type == "dirac") {
        check_keys(v, where, {"type", "p"});
        return SkillDistribution::dirac(as_number(require(v, where, "p"), where));
    }
    if (type == "empirical") {
        check_keys(v, where, {"type", "points"});
        const json& pts = require(v, where, "points");
        if (!pts.is_array()) throw ConfigError(where + ".points: expected a list");
        std::vector<std::pair<double, double>> points;
        for (const auto& e : pts) {
            if (!e.is_array() || e.size() != 2) {
                throw ConfigError(where + ".points: expected [skill, mass] pairs");
            }
            points.emplace_back(as_number(e[0], where), as_number(e[1], where));
        }
        return SkillDistribution::empirical(std::move(points));
    }
    throw ConfigError(where + ".type: unknown population type \"" + type + "\"");
}

GridSpec parse_grid(const json& v, const std::string& where) {
    check_keys(v, where, {"half_width", "step"});
    GridSpec spec;
    if (v.contains("half_width")) spec.half_width = as_number(v.at("half_width"), where);
    if (v.contains("step")) spec.step = as_number(v.at("step"), where);
    return spec;
}

WalkOptions parse_walk(const json& section, const std::string& where) {
    WalkOptions walk;
    if (section.contains("walk_tol")) {
        walk.tol = as_number(section.at("walk_tol"), where + ".walk_tol");
        if (!(walk.tol > 0.0)) throw ConfigError(where + ".walk_tol: must be positive");
    }
    if (section.contains("max_steps")) {
        walk.max_steps =
            static_cast<int>(as_integer(section.at("max_steps"), where + ".max_steps"));
        if (walk.max_steps < 1) throw ConfigError(where + ".max_steps: must be positive");
    }
    return walk;
}

AnalyzeSection parse_analyze(const json& v) {
    const std::string where = "analyze";
    check_keys(v, where, {"r_u", "grid", "gamma_multiplier", "walk_tol", "max_steps"});
    AnalyzeSection out;
    for (double r : as_number_list(require(v, where, "r_u"), where + ".r_u")) {
        const int ri = static_cast<int>(std::lround(r));
        if (ri < 1 || std::abs(r - ri) > 1e-12) {
            throw ConfigError(where + ".r_u: entries must be integers >= 1");
        }
        out.r_u.push_back(ri);
    }
    if (v.contains("grid")) out.grid = parse_grid(v.at("grid"), where + ".grid");
    if (v.contains("gamma_multiplier")) {
        out.gamma_multiplier = as_number(v.at("gamma_multiplier"), where + ".gamma_multiplier");
        if (!(out.gamma_multiplier > 0.0)) {
            throw ConfigError(where + ".gamma_multiplier: must be positive");
        }
    }
    out.walk = parse_walk(v, where);
    return out;
}

CalibrateSection parse_calibrate(const json& v) {
    const std::string where = "calibrate";
    check_keys(v, where, {"r_u", "grid", "walk_tol", "max_steps"});
    CalibrateSection out;
    out.r_u = as_number_list(require(v, where, "r_u"), where + ".r_u");
    if (v.contains("grid")) out.grid = parse_grid(v.at("grid"), where + ".grid");
    out.walk = parse_walk(v, where);
    return out;
}

PolicyKind parse_policy(const std::string& name, const std::string& where) {
    if (name == "uniform") return PolicyKind::Uniform;
    if (name == "uncertainty") return PolicyKind::Uncertainty;
    if (name == "greedy_ig") return PolicyKind::GreedyInfoGain;
    throw ConfigError(where + ": unknown policy \"" + name + "\"");
}

SweepAxis parse_axis(const std::string& name, const std::string& where) {
    if (name == "tasks") return SweepAxis::Tasks;
    if (name == "budget_ratio") return SweepAxis::BudgetRatio;
    if (name == "labels_per_worker") return SweepAxis::LabelsPerWorker;
    throw ConfigError(where + ": unknown sweep axis \"" + name + "\"");
}

SimulateSection parse_simulate(const json& v, const SkillDistribution& population,
                               std::uint64_t seed) {
    const std::string where = "simulate";
    check_keys(v, where,
               {"mode", "prior", "tasks", "budget", "budget_ratio", "labels_per_worker",
                "replications", "policies", "sweep"});
    SimulateSection out;
    out.base.population = population;
    out.base.seed = seed;
    out.base.num_tasks =
        static_cast<int>(as_integer(require(v, where, "tasks"), where + ".tasks"));

    const bool has_budget = v.contains("budget");
    const bool has_ratio = v.contains("budget_ratio");
    if (has_budget == has_ratio) {
        throw ConfigError(where + ": missing key \"budget\" (give exactly one of "
                          "\"budget\" or \"budget_ratio\")");
    }
    out.base.budget = has_budget
        ? as_integer(v.at("budget"), where + ".budget")
        : std::lround(as_number(v.at("budget_ratio"), where + ".budget_ratio") *
                      out.base.num_tasks);

    out.base.labels_per_worker = static_cast<int>(
        as_integer(require(v, where, "labels_per_worker"), where + ".labels_per_worker"));
    out.base.replications = static_cast<int>(
        as_integer(require(v, where, "replications"), where + ".replications"));

    const std::string mode = require(v, where, "mode").get<std::string>();
    if (mode == "oracle") {
        out.base.mode = OracleMode{};
        if (v.contains("prior")) {
            throw ConfigError(where + ": \"prior\" only applies to inference mode");
        }
    } else if (mode == "inference") {
        const json& prior = require(v, where, "prior");
        check_keys(prior, where + ".prior", {"alpha", "beta"});
        out.base.mode = InferenceMode{
            as_number(require(prior, where + ".prior", "alpha"), where),
            as_number(require(prior, where + ".prior", "beta"), where)};
    } else {
        throw ConfigError(where + ".mode: expected \"oracle\" or \"inference\"");
    }

    if (v.contains("policies")) {
        const json& pol = v.at("policies");
        if (!pol.is_array() || pol.empty()) {
            throw ConfigError(where + ".policies: expected a nonempty list");
        }
        for (const auto& e : pol) {
            out.policies.push_back(parse_policy(e.get<std::string>(), where + ".policies"));
        }
    } else {
        out.policies = {PolicyKind::Uniform, PolicyKind::Uncertainty};
    }

    if (v.contains("sweep")) {
        const json& sw = v.at("sweep");
        check_keys(sw, where + ".sweep", {"axis", "points"});
        out.sweep_axis = parse_axis(require(sw, where + ".sweep", "axis").get<std::string>(),
                                    where + ".sweep.axis");
        out.sweep_points = as_number_list(require(sw, where + ".sweep", "points"),
                                          where + ".sweep.points");
    }
    return out;
}

}  // namespace

ExperimentFile parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: expected a JSON object");
    check_keys(root, "config",
               {"experiment_id", "seed", "population", "analyze", "calibrate", "simulate"});

    ExperimentFile out;
    out.experiment_id = require(root, "config", "experiment_id").get<std::string>();
    out.seed = static_cast<std::uint64_t>(as_integer(require(root, "config", "seed"), "seed"));
    out.population = parse_population(require(root, "config", "population"), "population");
    if (root.contains("analyze")) out.analyze = parse_analyze(root.at("analyze"));
    if (root.contains("calibrate")) out.calibrate = parse_calibrate(root.at("calibrate"));
    if (root.contains("simulate")) {
        out.simulate = parse_simulate(root.at("simulate"), out.population, out.seed);
    }
    return out;
}

ExperimentFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace crowd
