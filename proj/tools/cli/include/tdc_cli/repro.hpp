#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdc/sdp.hpp"
#include "tdc_cli/commands.hpp"

namespace tdc::cli {

enum class Outcome { Pass, Fail, Inconclusive };
const char* to_string(Outcome o);

struct CheckResult {
    std::string id;
    Outcome outcome = Outcome::Fail;
    std::string measured;
    std::string expected;
    double seconds = 0.0;
};

struct ReproSettings {
    SolverConfig solver;
    std::string filter;  // substring of the check id
    unsigned jobs = 1;
};

/// Check ids in catalog order, e.g. example1.spectrum, a1.constant.
std::vector<std::string> repro_check_ids();

/// Runs the selected checks (up to `jobs` at a time); results come back in catalog order.
std::vector<CheckResult> run_repro(const ReproSettings& settings);

/// 0 when every check passes, 3 on any failure, 4 when the only misses are inconclusive.
int repro_exit_code(const std::vector<CheckResult>& results);

int cmd_repro(const Options& o, std::ostream& out, std::ostream& err);

} // namespace tdc::cli
