#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdc/lmi.hpp"

namespace tdc {

/// {0.5, 0.05, 5, 50, 10, 20, 30, 0.005, 2, 1, 0, -0.005, -0.05, -0.5, -5, -50}
std::vector<double> default_lambda_grid();

struct SolverConfig {
    int max_iterations = 100;
    double feasibility_margin = 0.0;  // <= 0: use the problem's own 1e-6 (1 + ||data||)
    double tolerance = 1e-7;          // relative gap and primal residual
    double box = 100.0;               // |x_k| <= box normalizes the homogeneous LMIs
    double max_condition = 1e12;      // reject X with a larger condition number
    bool optimize = false;            // run to convergence instead of stopping at the margin
    std::vector<double> lambda_grid = default_lambda_grid();
};

enum class Status { Feasible, NotFound, Inconclusive };
const char* to_string(Status s);

struct Verdict {
    Status status = Status::NotFound;
    std::string kind;
    Vec x;
    std::map<std::string, Mat> assignment;
    double margin = 0.0;     // certified min eigenvalue over all constraints (independent recheck)
    double epsilon = 0.0;    // strictness threshold used
    double objective = 0.0;  // solver's t
    int iterations = 0;
    std::string detail;

    // stabilization problems only
    std::optional<double> lambda;
    std::vector<std::pair<std::string, Mat>> gains;
    std::optional<double> closed_loop_abscissa;
    std::optional<double> closed_loop_margin;

    [[nodiscard]] bool feasible() const { return status == Status::Feasible; }
    [[nodiscard]] const Mat& gain(const std::string& name) const;
};

/// Maximizes t subject to F(x) <= -t I (negative constraints), F(x) >= t I
/// (positive ones) and |x_k| <= box. Stops as soon as t reaches the margin.
/// A Feasible verdict is issued only when an independent eigenvalue check of
/// every constraint shows margin >= epsilon / 2.
Verdict solve(const LmiProblem& problem, const SolverConfig& cfg = {});

/// Stabilization problem for one value of lambda: solve, extract Z_i = X^{-1} G_i
/// and re-verify the closed loop by rightmost roots and by the matching
/// stability condition. Both must pass.
Verdict solve_synthesis(const LmiProblem& problem, const SolverConfig& cfg = {});

using LambdaFamily = std::function<LmiProblem(double lambda)>;

/// Line search over cfg.lambda_grid; first verified lambda wins. `first`
/// (if given and on the grid) is tried before the others.
Verdict solve_synthesis(const LambdaFamily& family, const SolverConfig& cfg = {},
                        std::optional<double> first = std::nullopt);

struct DelaySweepResult {
    std::string query;
    double certified_max_delay = 0.0;
    std::vector<std::pair<double, Status>> trace;
    Verdict best;  // verdict at certified_max_delay
    bool inconclusive_seen = false;
};

using DelayProbe = std::function<Verdict(double tau)>;

/// Bisection on [lo, hi] down to width tol. Requires a feasible verdict at lo
/// (else NoFeasibleStart). Inconclusive probes count as not feasible.
DelaySweepResult max_delay(const DelayProbe& probe, double lo, double hi, double tol, std::string query = {});

/// Evaluates an ascending grid, then bisects between the last feasible grid
/// point and its infeasible successor. Used when feasibility need not be
/// monotone in the delay.
DelaySweepResult max_delay_sweep(const DelayProbe& probe, const std::vector<double>& grid, double tol,
                                 std::string query = {});

using ProbeFactory = std::function<DelayProbe()>;

/// As above, but every grid point is evaluated by a fresh probe from `make`
/// (up to `jobs` at a time), so the verdicts do not depend on `jobs`. The
/// bisection phase reuses one probe.
DelaySweepResult max_delay_sweep(const ProbeFactory& make, const std::vector<double>& grid, double tol,
                                 std::string query, unsigned jobs);

/// Probes built from problem families.
DelayProbe analysis_probe(std::function<LmiProblem(double)> family, SolverConfig cfg = {});
DelayProbe synthesis_probe(std::function<LmiProblem(double tau, double lambda)> family, SolverConfig cfg = {});

} // namespace tdc
