#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdc/dde.hpp"
#include "tdc/model.hpp"
#include "tdc/sdp.hpp"
#include "tdc/synthesis.hpp"

namespace tdc {

/// Delayed gains supplied by the caller instead of an LMI search.
struct PinnedGains {
    std::optional<Mat> N_tau;  // single-delay FullRank, or two-delay
    std::optional<Mat> N_h;    // two-delay
    std::optional<Mat> Z_bar;  // single-delay Structured, m x v
};

struct DesignOptions {
    std::optional<Mat> R;          // augmentation rows; greedy choice when absent
    PinnedGains pinned;
    std::optional<double> tau_lo;  // search over [tau_lo, tau] with the interval condition
    SolverConfig solver;
    double rank_tol = kRankTol;
};

struct Design {
    std::string case_tag;    // case1_full_rank | case2_structured | case3_augment_then_retry
    std::string inner_case;  // case taken after augmentation (equals case_tag otherwise)
    Mat F_active;            // F, or F_bar after augmentation
    std::optional<AugmentedFunctional> augmentation;
    std::optional<SynthesisPlan> plan;  // single-delay only
    FunctionalObserver observer;
    Mat X_bar;                          // (G_bar | M)
    ErrorCoefficients coefficients;
    std::string gain_source;            // "pinned" or "lmi"
    std::optional<Verdict> search;      // LMI gain search, when run
    Verdict certificate;                // stability condition on the error system
    RootReport roots;                   // rightmost roots of the error system
    std::vector<std::string> warnings;

    [[nodiscard]] bool stable() const { return roots.abscissa < 0.0; }
    [[nodiscard]] Mat K() const;  // (I_m | 0), identity without augmentation
};

struct DesignAttempt {
    Verdict search;               // gain search verdict; Feasible with empty fields when gains are pinned
    std::optional<Design> design;  // present whenever an observer was assembled
};

/// rank checks -> case dispatch -> delayed gains -> assembly -> certificate and roots.
DesignAttempt design_observer(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                              const DesignOptions& options = {});

/// LMI certificate of e' = N e + N_tau e(t - tau) [+ N_h e(t - h)]:
/// the constant-delay condition, then the partitioned one (single delay), or the
/// two-delay condition.
Verdict certify_error_system(const FunctionalObserver& obs, const SolverConfig& cfg = {});

} // namespace tdc
