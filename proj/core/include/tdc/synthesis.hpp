#pragma once

#include <optional>
#include <vector>

#include "tdc/dde.hpp"
#include "tdc/linalg.hpp"
#include "tdc/model.hpp"

namespace tdc {

/// rank(FA; F) == rank(F)
bool check_rank_condition(const Functional& func, const Plant& plant, double tol = kRankTol);

/// N = F A F^+. Throws WrongCase when the rank condition fails.
Mat compute_N(const Functional& func, const Plant& plant, double tol = kRankTol);

/// (F; C_tau; C_tau A)
Mat build_theta(const Functional& func, const MeasurementModel& meas, const Plant& plant);

/// N_tau2 = (I - Theta Theta^+) restricted to its first m columns. Throws
/// NoFreedom when Theta has full row rank.
Mat nullspace_parameterization(const Mat& theta, Index m, double tol = kRankTol);

/// (C_tau; C_tau A)
Mat observability_stack(const MeasurementModel& meas, const Plant& plant);

/// Xbar = (Gbar | M) = -N_tau F pinv(C_tau; C_tau A). Throws WrongCase when the
/// stack is rank deficient.
Mat case1_solve_Xbar(const Mat& N_tau, const Functional& func, const MeasurementModel& meas, const Plant& plant,
                     double tol = kRankTol);

/// Completes a single-delay observer from (N, N_tau, Gbar, M) and checks the
/// decoupling conditions; throws Inconsistent on failure.
FunctionalObserver assemble_single(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                   const Mat& N, const Mat& N_tau, const Mat& G_bar, const Mat& M);

/// Maximal independent rows of N_tau2 (top-down) and the matching column
/// selection used to embed Zbar into Z.
struct ReducedGain {
    Mat N_bar;                 // v x m
    std::vector<Index> rows;   // selected rows of N_tau2
    Index full_rows = 0;       // m + 2p

    /// Z = Zbar placed in the selected columns, zero elsewhere.
    [[nodiscard]] Mat embed(const Mat& Z_bar) const;
};

ReducedGain case2_reduce(const Mat& N_tau2, double tol = kRankTol);

/// X = Z (I - Theta Theta^+) split as (N_tau | Gbar | M).
struct Case2Blocks {
    Mat N_tau;
    Mat G_bar;
    Mat M;
};
Case2Blocks case2_blocks(const Mat& Z, const Mat& theta, Index m, Index p, double tol = kRankTol);

struct AugmentedFunctional {
    Mat F_bar;  // q x n, first m rows equal F
    Mat R;      // (q - m) x n
    Mat K;      // m x q, (I_m | 0)
    [[nodiscard]] Index q() const { return F_bar.rows(); }
};

/// Greedy row selection from (F; FA; ...; FA^{n-1}). Throws Internal when no
/// augmentation is needed.
AugmentedFunctional augment(const Functional& func, const Plant& plant, double tol = kRankTol);

/// Wraps a user-chosen R: checks that (F; R) has full row rank and satisfies
/// the rank condition.
AugmentedFunctional augment_with(const Functional& func, const Mat& R, const Plant& plant, double tol = kRankTol);

/// rank((C_tau C_h; C_tau A C_h A)) == 2n
bool two_delay_rank_check(const MeasurementModel& meas, const Plant& plant, double tol = kRankTol);

Mat two_delay_stack(const MeasurementModel& meas, const Plant& plant);

/// Xbar = -(N_tau F | N_h F) pinv(Theta_e). Throws Unsupported when the stack
/// is rank deficient.
Mat two_delay_solve(const Mat& N_tau, const Mat& N_h, const Functional& func, const MeasurementModel& meas,
                    const Plant& plant, double tol = kRankTol);

FunctionalObserver assemble_two_delay(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                      const Mat& N, const Mat& N_tau, const Mat& N_h, const Mat& G_bar,
                                      const Mat& M);

/// y_a = (y(t); y(t - alpha)) viewed as a two-delay measurement with h = tau + alpha.
MeasurementModel extend_measurement(const MeasurementModel& meas, double alpha);

struct ClosedLoopSystems {
    DdeSystem state_error;     // (x, e_aug)
    DdeSystem state_observer;  // (x, w)
};

/// Observer-based realization of u = F x with z_hat = K z_hat_aug.
ClosedLoopSystems closed_loop_systems(const Plant& plant, const MeasurementModel& meas, const Mat& F,
                                      const FunctionalObserver& obs, const Mat& K);

enum class SynthesisCase { FullRank, Structured };

const char* to_string(SynthesisCase c);

/// Structural decisions taken before any gain search.
struct SynthesisPlan {
    SynthesisCase case_tag = SynthesisCase::FullRank;
    bool augmented = false;
    Functional functional;                      // F or F_bar
    std::optional<AugmentedFunctional> augmentation;
    Mat N;
    Mat theta_bar;                              // case FullRank
    Mat theta;                                  // case Structured
    Mat N_tau2;                                 // case Structured
    std::optional<ReducedGain> reduced;         // case Structured
};

/// Single-delay planning: augments when the rank condition fails (using R if
/// given), then picks FullRank or Structured.
SynthesisPlan plan_synthesis(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                             const std::optional<Mat>& R = std::nullopt, double tol = kRankTol);

} // namespace tdc
