#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "crowd/config.hpp"
#include "crowd/output.hpp"

namespace crowd {

// Subcommand drivers; each returns the table it would print.
std::vector<OutputRow> run_analyze(const ExperimentFile& file, std::ostream& notes,
                                   bool quiet);
std::vector<OutputRow> run_calibrate(const ExperimentFile& file, std::ostream& notes,
                                     bool quiet);
std::vector<OutputRow> run_simulate(const ExperimentFile& file, int jobs, std::ostream& notes,
                                    bool quiet);

// Full command-line entry point (argv without the program name).
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical
// non-convergence in a required computation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowd
