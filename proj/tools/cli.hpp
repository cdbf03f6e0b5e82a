#pragma once

// cpattern: check, solve, verify and export circle patterns.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circlepat::cli
{

enum ExitCode : int
{
    kOk = 0,
    kInputError = 1,
    kInfeasible = 2,
    kNotConverged = 3,
    kAuditFailure = 4,
};

struct RunConfig
{
    std::string command;  // check | solve | verify | export
    std::string input;
    std::optional<std::string> targets;  // path, or inline JSON when it starts with '{'
    std::optional<double> tol;
    int max_iter = 100;
    std::optional<std::uint64_t> seed;
    bool skip_feasibility = false;
    std::optional<std::string> output;
    unsigned threads = 1;
};

// Tolerances applied by verify and by the audit that solve runs.
inline constexpr double kBigonTolerance = 1e-12;
inline constexpr double kFaceTolerance = 1e-9;
inline constexpr double kGlobalTolerance = 1e-9;
inline constexpr double kStoredTolerance = 1e-12;
inline constexpr double kDefaultTolerance = 1e-10;
// Restarts (solve --seed) must land within this distance in K.
inline constexpr double kRestartTolerance = 1e-7;

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.command.
int run_config(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (without the program name) and runs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace circlepat::cli
