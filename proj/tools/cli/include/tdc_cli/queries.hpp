#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tdc/sdp.hpp"
#include "tdc_cli/io.hpp"

namespace tdc::cli {

/// A delay-parameterized LMI family selected by a condition id.
struct DelayQuery {
    std::string condition;
    std::string swept;  // "tau", "tau_hi", "h" or "tau3"
    bool synthesis = false;
    bool interval = false;
    std::function<LmiProblem(double)> analysis;
    std::function<LmiProblem(double, double)> synth;
    double default_lo = 0.1;
    double default_hi = 5.0;
};

/// constant, partitioned, interval, interval-pd, two-delay, synth-constant,
/// synth-interval, synth-structured, synth-structured-interval, synth-two-delay,
/// synth-three-delay (largest delay swept, the other two from error_system.taus)
const std::vector<std::string>& condition_ids();

/// `sweep` picks the moving delay of the two-delay conditions ("tau" or "h");
/// empty selects the condition's default.
DelayQuery make_query(const std::string& condition, const ErrorSystemSpec& spec, const std::string& sweep = {});

/// The problem's error_system section, or one derived from its observer data
/// (N from the plan, delayed gains free or pinned).
ErrorSystemSpec error_system_for(const Problem& p);

/// Bisection for constant-delay families; a 12-point grid followed by bisection
/// for interval families, whose feasibility need not be monotone.
DelaySweepResult run_query(const DelayQuery& q, double lo, double hi, double tol, const SolverConfig& cfg,
                           unsigned jobs = 1);

} // namespace tdc::cli
