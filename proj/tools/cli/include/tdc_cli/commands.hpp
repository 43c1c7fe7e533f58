#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdc/sdp.hpp"
#include "tdc_cli/io.hpp"

namespace tdc::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNotFound = 3, kInconclusive = 4, kInternal = 5 };

struct Options {
    std::optional<double> tol;
    std::optional<std::vector<double>> lambda_grid;
    std::optional<double> step;
    std::optional<double> t_end;
    std::optional<int> max_iterations;
    unsigned jobs = 1;
    std::string filter;
    std::filesystem::path out;
    std::optional<std::filesystem::path> observer_report;  // simulate / closed-loop / roots
    std::string condition;                                 // max-delay
    std::optional<std::pair<double, double>> range;        // max-delay
    std::string sweep;                                     // max-delay, two-delay conditions
    bool verbose = false;
};

/// Problem-level solver settings with command-line overrides applied.
SolverConfig solver_config(const Problem& p, const Options& o);

int cmd_synthesize(const std::filesystem::path& problem, const Options& o, std::ostream& out, std::ostream& err);
int cmd_max_delay(const std::filesystem::path& problem, const Options& o, std::ostream& out, std::ostream& err);
int cmd_simulate(const std::filesystem::path& problem, const Options& o, std::ostream& out, std::ostream& err);
int cmd_closed_loop(const std::filesystem::path& problem, const Options& o, std::ostream& out, std::ostream& err);
int cmd_roots(const std::filesystem::path& problem, const Options& o, std::ostream& out, std::ostream& err);

/// Maps library errors to exit codes and prints the message.
int report_exception(std::ostream& err);

/// CSV with a header row, plus a whitespace-separated .dat mirror next to it.
void write_table(const std::filesystem::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);

} // namespace tdc::cli
