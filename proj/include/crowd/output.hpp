#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crowd {

// One line of tabular CLI output. metric_name is drawn from the closed
// set documented in the README: accuracy, expected_steps, bound_upper,
// bound_lower_accuracy, z_threshold, mean, variance, gamma, rho0,
// rho0_approx, residual_mass.
struct OutputRow {
    std::string experiment_id;
    std::string axis_name;
    double axis_value;
    std::string policy;
    std::string metric_name;
    double value;
    double std_error;  // 0 for deterministic theory values
    std::uint64_t seed;
};

std::string csv_header();
std::string to_csv(const OutputRow& row);
std::string to_csv(const std::vector<OutputRow>& rows);

// Parses text produced by to_csv back into rows; throws ConfigError on any
// mismatch with the schema.
std::vector<OutputRow> parse_csv(const std::string& text);

// Renders a real with 9 significant digits.
std::string format_real(double v);

}  // namespace crowd
