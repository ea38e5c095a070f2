#include "crowd/cliapp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "crowd/analysis.hpp"
#include "crowd/sim.hpp"

namespace crowd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

OutputRow row(const ExperimentFile& file, const std::string& axis, double axis_value,
              const std::string& policy, const std::string& metric, double value,
              double std_error = 0.0) {
    return OutputRow{file.experiment_id, axis, axis_value, policy, metric, value, std_error,
                     file.seed};
}

void warn_truncation(const Density& fv, std::ostream& notes, bool quiet) {
    if (quiet) return;
    if (const auto* g = std::get_if<GridPdf>(&fv)) {
        if (g->truncated_mass > 1e-3) {
            notes << "note: grid too narrow, " << format_real(g->truncated_mass)
                  << " of the weight mass fell outside; widen the grid\n";
        }
    }
}

}  // namespace

std::vector<OutputRow> run_analyze(const ExperimentFile& file, std::ostream& notes,
                                   bool quiet) {
    if (!file.analyze) throw ConfigError("config: missing key \"analyze\"");
    const AnalyzeSection& a = *file.analyze;

    const Density fv = make_vote_density(file.population, a.grid);
    warn_truncation(fv, notes, quiet);
    const MomentSummary mom = moments(fv, a.gamma_multiplier);
    const RhoRoot rho = rho_root(fv);

    std::vector<OutputRow> rows;
    rows.push_back(row(file, "population", 0.0, "-", "mean", mom.mean));
    rows.push_back(row(file, "population", 0.0, "-", "variance", mom.variance));
    rows.push_back(row(file, "population", 0.0, "-", "gamma", mom.gamma));
    rows.push_back(row(file, "population", 0.0, "-", "rho0", rho.numeric));
    rows.push_back(row(file, "population", 0.0, "-", "rho0_approx", rho.approx));

    const auto* dirac = std::get_if<DiracSkill>(&file.population.variant());
    for (int r : a.r_u) {
        const CalibrationResult cal = calibrate(fv, r, a.walk);
        const WalkReport walk = bounded_walk(fv, cal.z_threshold, a.walk);
        rows.push_back(row(file, "r_u", r, "active", "z_threshold", cal.z_threshold));
        rows.push_back(row(file, "r_u", r, "active", "expected_steps", walk.expected_steps));
        rows.push_back(row(file, "r_u", r, "active", "accuracy", walk.exit_accuracy));
        rows.push_back(row(file, "r_u", r, "active", "residual_mass", walk.residual_mass));
        rows.push_back(row(file, "r_u", r, "active", "bound_upper",
                           gambler_ruin_bound(mom, rho.numeric, cal.z_threshold)));
        rows.push_back(row(file, "r_u", r, "uniform", "accuracy", unbounded_accuracy(fv, r)));
        rows.push_back(row(file, "r_u", r, "uniform", "bound_lower_accuracy",
                           1.0 - chernoff_bound(mom, r)));
        if (dirac) {
            rows.push_back(row(file, "r_u", r, "active_closed", "expected_steps",
                               homogeneous_expected_steps(dirac->p, cal.z_threshold)));
            if (r % 2 == 1) {
                rows.push_back(row(file, "r_u", r, "uniform_closed", "accuracy",
                                   homogeneous_uniform_accuracy(dirac->p, r)));
            }
        }
    }
    return rows;
}

std::vector<OutputRow> run_calibrate(const ExperimentFile& file, std::ostream& notes,
                                     bool quiet) {
    if (!file.calibrate) throw ConfigError("config: missing key \"calibrate\"");
    const CalibrateSection& c = *file.calibrate;

    const Density fv = make_vote_density(file.population, c.grid);
    warn_truncation(fv, notes, quiet);

    std::vector<OutputRow> rows;
    for (double r : c.r_u) {
        try {
            const CalibrationResult cal = calibrate(fv, r, c.walk);
            const WalkReport walk = bounded_walk(fv, cal.z_threshold, c.walk);
            rows.push_back(row(file, "r_u", r, "active", "z_threshold", cal.z_threshold));
            rows.push_back(row(file, "r_u", r, "active", "expected_steps", cal.achieved_steps));
            rows.push_back(row(file, "r_u", r, "active", "residual_mass", walk.residual_mass));
        } catch (const NumericError& e) {
            // Partial results stay useful; the row is flagged with NaNs.
            rows.push_back(row(file, "r_u", r, "active", "z_threshold", kNan));
            rows.push_back(row(file, "r_u", r, "active", "expected_steps", kNan));
            rows.push_back(row(file, "r_u", r, "active", "residual_mass", kNan));
            if (!quiet) notes << "note: r_u=" << format_real(r) << " flagged: " << e.what() << "\n";
        }
    }
    return rows;
}

std::vector<OutputRow> run_simulate(const ExperimentFile& file, int jobs, std::ostream& notes,
                                    bool quiet) {
    if (!file.simulate) throw ConfigError("config: missing key \"simulate\"");
    const SimulateSection& s = *file.simulate;
    if (s.base.replications < 2) {
        throw ConfigError("simulate.replications: at least 2 required for a standard error");
    }
    s.base.validate();

    const SweepAxis axis = s.sweep_axis.value_or(SweepAxis::BudgetRatio);
    std::vector<double> points = s.sweep_points;
    if (points.empty()) {
        points = {static_cast<double>(s.base.budget) / s.base.num_tasks};
    }

    const auto table = sweep(s.base, axis, points, s.policies, jobs);

    std::vector<OutputRow> rows;
    for (const SweepRow& sr : table) {
        for (const SweepCell& cell : sr.cells) {
            if (cell.error.empty()) {
                rows.push_back(row(file, sweep_axis_name(axis), sr.point,
                                   policy_name(cell.policy), "accuracy",
                                   cell.stats.mean_accuracy, cell.stats.standard_error));
            } else {
                rows.push_back(row(file, sweep_axis_name(axis), sr.point,
                                   policy_name(cell.policy), "accuracy", kNan, 0.0));
                if (!quiet) {
                    notes << "note: point " << format_real(sr.point) << " ("
                          << policy_name(cell.policy) << ") failed: " << cell.error << "\n";
                }
            }
        }
    }
    return rows;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\'';
        } else if (c == '\n') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

void emit_error(std::ostream& err, const std::string& message, int code) {
    err << "{\"error\": \"" << json_escape(message) << "\", \"exit_code\": " << code << "}\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"worker-allocation policies for crowdsourced binary labeling: "
                 "theory tables and Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::int64_t seed_override = -1;
    bool has_seed = false;
    int jobs = 0;
    bool quiet = false;

    for (const char* name : {"analyze", "simulate", "calibrate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment recipe (JSON)")->required();
        sub->add_option("--out", out_path, "write the table to this file instead of stdout");
        sub->add_option("--seed", seed_override, "override the config seed")
            ->check(CLI::NonNegativeNumber)
            ->each([&](const std::string&) { has_seed = true; });
        sub->add_option("--jobs", jobs, "worker threads (default: all cores)");
        sub->add_flag("--quiet", quiet, "suppress notes on stderr");
    }

    std::vector<const char*> argv;
    argv.push_back("crowdalloc");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        emit_error(err, e.what(), 2);
        return 2;
    }

    if (jobs <= 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }

    try {
        ExperimentFile file = load_config(config_path);
        if (has_seed) {
            file.seed = static_cast<std::uint64_t>(seed_override);
            if (file.simulate) file.simulate->base.seed = file.seed;
        }

        std::vector<OutputRow> rows;
        if (app.got_subcommand("analyze")) {
            rows = run_analyze(file, err, quiet);
        } else if (app.got_subcommand("calibrate")) {
            rows = run_calibrate(file, err, quiet);
        } else {
            rows = run_simulate(file, jobs, err, quiet);
        }

        const std::string table = to_csv(rows);
        if (!out_path.empty()) {
            std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
            if (!f) throw ConfigError("cannot write output file: " + out_path);
            f << table;
        } else {
            out << table;
        }
        return 0;
    } catch (const ConfigError& e) {
        emit_error(err, e.what(), 2);
        return 2;
    } catch (const NumericError& e) {
        emit_error(err, e.what(), 3);
        return 3;
    } catch (const std::exception& e) {
        emit_error(err, e.what(), 1);
        return 1;
    }
}

}  // namespace crowd
