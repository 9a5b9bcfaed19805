#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lshfed/config.hpp"

namespace lshfed {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime_error = 1;
inline constexpr int exit_bad_config = 2;

/// CLI-level overrides applied after the config file is parsed.
struct cli_overrides {
    std::optional<uint64_t> seed;
    std::optional<defense_kind> defense;
    std::string out_dir = "out";
    bool quiet = false; // suppress stdout progress; files are still written
};

/// Run one experiment; writes transcript.csv, metrics.csv, elections.csv and
/// summary.txt into the output directory and prints the effective config and
/// the summary. Empty config path means built-in defaults.
int cmd_run(const std::string& config_path, const cli_overrides& overrides);

/// Hamming-vs-Euclidean correlation study on the default (or configured)
/// model geometry; writes correlation.csv and prints the coefficient.
int cmd_correlation(const std::string& config_path, const cli_overrides& overrides,
                    int pairs, double scale_min, double scale_max);

/// Accuracy sweep over malicious fractions for both attack families; writes
/// sweep.csv. Fractions come from --fractions (comma separated).
int cmd_sweep(const std::string& config_path, const cli_overrides& overrides,
              const std::vector<double>& fractions);

} // namespace lshfed
