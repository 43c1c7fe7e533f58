#include "tdc/design.hpp"

#include <cmath>
#include <sstream>

#include "tdc/errors.hpp"
#include "tdc/lmi.hpp"

namespace tdc {

Mat Design::K() const {
    const Index m = observer.order();
    if (!augmentation) return Mat::Identity(m, m);
    return augmentation->K;
}

Verdict certify_error_system(const FunctionalObserver& obs, const SolverConfig& cfg) {
    const Mat& N = obs.N;
    if (obs.two_delay()) return solve(stability_two_delay(N, obs.N_tau, *obs.N_h, obs.tau, *obs.h), cfg);
    Verdict v = solve(stability_constant(N, obs.N_tau, obs.tau), cfg);
    if (v.feasible()) return v;
    Verdict w = solve(stability_partitioned(N, obs.N_tau, obs.tau), cfg);
    if (w.feasible() || v.status == Status::NotFound) return w;
    return v;
}

namespace {

Verdict pinned_verdict() {
    Verdict v;
    v.status = Status::Feasible;
    v.kind = "pinned";
    v.detail = "delayed gains supplied by the caller";
    return v;
}

std::optional<double> lower_end(const DesignOptions& o, double tau) {
    if (!o.tau_lo) return std::nullopt;
    if (!(*o.tau_lo > 0.0 && *o.tau_lo < tau)) {
        throw Error(ErrorKind::Ordering, "design: tau_lo must lie in (0, tau)");
    }
    return o.tau_lo;
}

void finish(Design& d, const Plant& plant, const MeasurementModel& meas, const SolverConfig& cfg) {
    d.coefficients = error_coefficients(plant, meas, Functional(d.F_active), d.observer);
    d.roots = rightmost_roots(error_system_unchecked(d.observer));
    d.certificate = certify_error_system(d.observer, cfg);
    const double scale = 1.0 + max_abs(d.observer.N_tau);
    if (d.X_bar.size() > 0 && max_abs(d.X_bar) > 1e6 * scale) {
        std::ostringstream os;
        os << "large observer gains: max |(G_bar | M)| = " << max_abs(d.X_bar);
        d.warnings.push_back(os.str());
    }
}

DesignAttempt single_delay(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                           const DesignOptions& o) {
    SynthesisPlan plan = plan_synthesis(plant, meas, func, o.R, o.rank_tol);
    const Functional active(plan.functional.F);
    const Index m = active.m();
    const Index p = meas.p();
    const double tau = meas.tau();
    const auto lo = lower_end(o, tau);

    DesignAttempt out;
    Mat N_tau, G_bar, M, X_bar;
    bool pinned = false;
    if (plan.case_tag == SynthesisCase::FullRank) {
        if (o.pinned.N_tau) {
            N_tau = *o.pinned.N_tau;
            pinned = true;
        } else {
            const Mat N = plan.N;
            out.search = lo ? solve_synthesis([&](double l) { return synth_interval(N, *lo, tau, l); }, o.solver)
                            : solve_synthesis([&](double l) { return synth_constant(N, tau, l); }, o.solver);
            if (!out.search.feasible()) return out;
            N_tau = out.search.gain("N_tau");
        }
        X_bar = case1_solve_Xbar(N_tau, active, meas, plant, o.rank_tol);
        G_bar = X_bar.leftCols(p);
        M = X_bar.rightCols(p);
    } else {
        const ReducedGain& red = *plan.reduced;
        Mat Z_bar;
        if (o.pinned.Z_bar) {
            Z_bar = *o.pinned.Z_bar;
            pinned = true;
        } else if (o.pinned.N_tau) {
            throw Error(ErrorKind::Configuration,
                        "design: the structured case takes a pinned Z_bar, not N_tau");
        } else {
            const Mat N01 = plan.N;
            const Mat N02 = Mat::Zero(red.N_bar.rows(), m);
            const Mat Nt1 = Mat::Zero(m, m);
            const Mat Nt2 = red.N_bar;
            out.search = lo ? solve_synthesis([&](double l) {
                                  return synth_structured_interval(N01, N02, Nt1, Nt2, *lo, tau, l);
                              }, o.solver)
                            : solve_synthesis([&](double l) {
                                  return synth_structured_constant(N01, N02, Nt1, Nt2, tau, l);
                              }, o.solver);
            if (!out.search.feasible()) return out;
            Z_bar = out.search.gain("Z");
        }
        if (Z_bar.rows() != m || Z_bar.cols() != red.N_bar.rows()) {
            throw Error(ErrorKind::Dimension, "design: Z_bar must be m x rank(N_tau2)");
        }
        const Case2Blocks blocks = case2_blocks(red.embed(Z_bar), plan.theta, m, p, o.rank_tol);
        N_tau = blocks.N_tau;
        G_bar = blocks.G_bar;
        M = blocks.M;
        X_bar = hstack({G_bar, M});
    }
    if (pinned) out.search = pinned_verdict();

    Design d{.case_tag = plan.augmented ? "case3_augment_then_retry" : to_string(plan.case_tag),
             .inner_case = to_string(plan.case_tag),
             .F_active = active.F,
             .augmentation = plan.augmentation,
             .plan = plan,
             .observer = assemble_single(plant, meas, active, plan.N, N_tau, G_bar, M),
             .X_bar = X_bar,
             .coefficients = {},
             .gain_source = pinned ? "pinned" : "lmi",
             .search = out.search,
             .certificate = {},
             .roots = {},
             .warnings = {}};
    finish(d, plant, meas, o.solver);
    out.design = std::move(d);
    return out;
}

DesignAttempt two_delay(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                        const DesignOptions& o) {
    if (o.tau_lo) throw Error(ErrorKind::Unsupported, "design: interval search is single-delay only");
    if (o.pinned.Z_bar) throw Error(ErrorKind::Configuration, "design: Z_bar applies to single-delay problems");
    SynthesisPlan plan = plan_synthesis(plant, meas, func, o.R, o.rank_tol);
    const Functional active(plan.functional.F);
    const Index m = active.m();
    const Index p = meas.p();
    const auto& td = meas.as_two_delay();

    DesignAttempt out;
    Mat N_tau, N_h;
    const bool pinned = o.pinned.N_tau.has_value() || o.pinned.N_h.has_value();
    if (pinned) {
        if (!o.pinned.N_tau || !o.pinned.N_h) {
            throw Error(ErrorKind::Configuration, "design: pin both N_tau and N_h for two-delay problems");
        }
        N_tau = *o.pinned.N_tau;
        N_h = *o.pinned.N_h;
        out.search = pinned_verdict();
    } else {
        const Mat N = plan.N;
        const Mat zero = Mat::Zero(m, m);
        const Mat I = Mat::Identity(m, m);
        out.search = solve_synthesis(
            [&](double l) { return synth_two_delay(N, zero, zero, I, zero, I, td.tau, td.h, l); }, o.solver);
        if (!out.search.feasible()) return out;
        N_tau = out.search.gain("Z_tau");
        N_h = out.search.gain("Z_h");
    }
    const Mat X_bar = two_delay_solve(N_tau, N_h, active, meas, plant, o.rank_tol);
    const Mat G_bar = X_bar.leftCols(p);
    const Mat M = X_bar.rightCols(p);

    Design d{.case_tag = plan.augmented ? "case3_augment_then_retry" : "case1_full_rank",
             .inner_case = "case1_full_rank",
             .F_active = active.F,
             .augmentation = plan.augmentation,
             .plan = std::nullopt,
             .observer = assemble_two_delay(plant, meas, active, plan.N, N_tau, N_h, G_bar, M),
             .X_bar = X_bar,
             .coefficients = {},
             .gain_source = pinned ? "pinned" : "lmi",
             .search = out.search,
             .certificate = {},
             .roots = {},
             .warnings = {}};
    finish(d, plant, meas, o.solver);
    out.design = std::move(d);
    return out;
}

} // namespace

DesignAttempt design_observer(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                              const DesignOptions& options) {
    return meas.is_two_delay() ? two_delay(plant, meas, func, options) : single_delay(plant, meas, func, options);
}

} // namespace tdc
