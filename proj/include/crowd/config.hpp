#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crowd/analysis.hpp"
#include "crowd/domain.hpp"
#include "crowd/sim.hpp"

namespace crowd {

struct AnalyzeSection {
    std::vector<int> r_u;
    GridSpec grid;
    double gamma_multiplier = 5.0;
    WalkOptions walk;
};

struct CalibrateSection {
    std::vector<double> r_u;
    GridSpec grid;
    WalkOptions walk;
};

struct SimulateSection {
    ExperimentConfig base;
    std::vector<PolicyKind> policies;
    std::optional<SweepAxis> sweep_axis;
    std::vector<double> sweep_points;
};

// A parsed experiment recipe. Sections are optional; each subcommand
// requires its own.
struct ExperimentFile {
    std::string experiment_id;
    std::uint64_t seed = 0;
    SkillDistribution population = SkillDistribution::dirac(0.8);
    std::optional<AnalyzeSection> analyze;
    std::optional<CalibrateSection> calibrate;
    std::optional<SimulateSection> simulate;
};

// Strict parser: unknown keys anywhere in the file are errors, as are
// missing required keys. Throws ConfigError with the offending key name.
ExperimentFile parse_config(const std::string& json_text);
ExperimentFile load_config(const std::string& path);

}  // namespace crowd
