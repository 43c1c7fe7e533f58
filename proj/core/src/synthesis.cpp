#include "tdc/synthesis.hpp"

#include <algorithm>
#include <string>

#include "tdc/errors.hpp"

namespace tdc {

namespace {

void require_same_n(const Plant& plant, const Functional& func) {
    if (func.F.cols() != plant.n()) throw Error(ErrorKind::Dimension, "functional and plant state sizes differ");
}

void require_same_n(const Plant& plant, const MeasurementModel& meas) {
    if (meas.n() != plant.n()) throw Error(ErrorKind::Dimension, "measurement and plant state sizes differ");
}

// Greedy top-down selection of rows that raise the rank, measured against an
// absolute cutoff so that numerically zero rows are never picked.
std::vector<Index> independent_rows(const Mat& a, double cutoff) {
    std::vector<Index> picked;
    Mat acc(0, a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        Mat trial(acc.rows() + 1, a.cols());
        trial << acc, a.row(i);
        const Vec s = Eigen::JacobiSVD<Mat>(trial).singularValues();
        const auto r = static_cast<Index>((s.array() > cutoff).count());
        if (r > acc.rows()) {
            acc = std::move(trial);
            picked.push_back(i);
        }
    }
    return picked;
}

double largest_singular_value(const Mat& a) {
    const Vec s = Eigen::JacobiSVD<Mat>(a).singularValues();
    return s.size() ? s(0) : 0.0;
}

double consistency_tol(std::initializer_list<const Mat*> parts) {
    double scale = 1.0;
    for (const Mat* p : parts) scale = std::max(scale, max_abs(*p));
    return 1e-8 * scale * scale;
}

} // namespace

bool check_rank_condition(const Functional& func, const Plant& plant, double tol) {
    require_same_n(plant, func);
    const Mat& F = func.F;
    return rank(vstack({F * plant.A, F}), tol) == rank(F, tol);
}

Mat compute_N(const Functional& func, const Plant& plant, double tol) {
    if (!check_rank_condition(func, plant, tol)) {
        throw Error(ErrorKind::WrongCase, "rank(FA; F) > rank(F): the functional must be augmented first");
    }
    return func.F * plant.A * pinv(func.F, tol);
}

Mat build_theta(const Functional& func, const MeasurementModel& meas, const Plant& plant) {
    require_same_n(plant, func);
    require_same_n(plant, meas);
    const Mat& C = meas.as_single().c_tau;
    return vstack({func.F, C, C * plant.A});
}

Mat nullspace_parameterization(const Mat& theta, Index m, double tol) {
    if (m <= 0 || m > theta.rows()) throw Error(ErrorKind::Dimension, "nullspace_parameterization: bad m");
    if (rank(theta, tol) == theta.rows()) {
        throw Error(ErrorKind::NoFreedom, "Theta has full row rank: no left null space to parameterize N_tau");
    }
    const Mat proj = Mat::Identity(theta.rows(), theta.rows()) - theta * pinv(theta, tol);
    return proj.leftCols(m);
}

Mat observability_stack(const MeasurementModel& meas, const Plant& plant) {
    require_same_n(plant, meas);
    const Mat& C = meas.c_tau();
    return vstack({C, C * plant.A});
}

Mat case1_solve_Xbar(const Mat& N_tau, const Functional& func, const MeasurementModel& meas, const Plant& plant,
                     double tol) {
    const Mat theta_bar = observability_stack(meas, plant);
    if (rank(theta_bar, tol) != plant.n()) {
        throw Error(ErrorKind::WrongCase, "rank(C_tau; C_tau A) < n: use the structured (null-space) case");
    }
    if (N_tau.rows() != func.m() || N_tau.cols() != func.m()) {
        throw Error(ErrorKind::Dimension, "case1_solve_Xbar: N_tau must be m x m");
    }
    return -N_tau * func.F * pinv(theta_bar, tol);
}

FunctionalObserver assemble_single(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                   const Mat& N, const Mat& N_tau, const Mat& G_bar, const Mat& M) {
    const Mat& C = meas.as_single().c_tau;
    FunctionalObserver obs;
    obs.M = M;
    obs.N = N;
    obs.N_tau = N_tau;
    obs.G = G_bar + N * M;
    obs.G_tau = N_tau * M;
    obs.J = func.F * plant.B;
    obs.J_tau = -M * C * plant.B;
    obs.tau = meas.tau();
    obs.validate(func.m(), meas.p(), plant.r());

    const auto coeffs = error_coefficients(plant, meas, func, obs);
    const double tol = consistency_tol({&plant.A, &plant.B, &C, &N, &N_tau, &M, &G_bar});
    if (!theorem_conditions_hold(coeffs, tol)) {
        throw Error(ErrorKind::Inconsistent,
                    "assembled observer violates decoupling (residual " + std::to_string(coeffs.residual_norm) + ")");
    }
    return obs;
}

Mat ReducedGain::embed(const Mat& Z_bar) const {
    if (Z_bar.cols() != static_cast<Index>(rows.size())) {
        throw Error(ErrorKind::Dimension, "embed: Zbar has " + std::to_string(Z_bar.cols()) + " columns, expected " +
                                              std::to_string(rows.size()));
    }
    Mat Z = Mat::Zero(Z_bar.rows(), full_rows);
    for (size_t j = 0; j < rows.size(); ++j) Z.col(rows[j]) = Z_bar.col(static_cast<Index>(j));
    return Z;
}

ReducedGain case2_reduce(const Mat& N_tau2, double tol) {
    if (N_tau2.size() == 0) throw Error(ErrorKind::InvalidInput, "case2_reduce: empty N_tau2");
    const double smax = largest_singular_value(N_tau2);
    if (!(smax > 0.0)) throw Error(ErrorKind::NoFreedom, "case2_reduce: N_tau2 is zero, nothing to stabilize with");
    ReducedGain out;
    out.rows = independent_rows(N_tau2, tol * smax);
    out.full_rows = N_tau2.rows();
    out.N_bar.resize(static_cast<Index>(out.rows.size()), N_tau2.cols());
    for (size_t j = 0; j < out.rows.size(); ++j) out.N_bar.row(static_cast<Index>(j)) = N_tau2.row(out.rows[j]);
    return out;
}

Case2Blocks case2_blocks(const Mat& Z, const Mat& theta, Index m, Index p, double tol) {
    if (theta.rows() != m + 2 * p || Z.cols() != theta.rows()) {
        throw Error(ErrorKind::Dimension, "case2_blocks: Z / Theta sizes disagree with (m, p)");
    }
    const Mat proj = Mat::Identity(theta.rows(), theta.rows()) - theta * pinv(theta, tol);
    const Mat X = Z * proj;
    return {X.leftCols(m), X.middleCols(m, p), X.rightCols(p)};
}

AugmentedFunctional augment(const Functional& func, const Plant& plant, double tol) {
    require_same_n(plant, func);
    const Index n = plant.n();
    const Index m = func.m();
    Mat f0(m * n, n);
    Mat power = func.F;
    for (Index k = 0; k < n; ++k) {
        f0.middleRows(k * m, m) = power;
        power = power * plant.A;
    }
    const auto picked = independent_rows(f0, tol * largest_singular_value(f0));
    const auto q = static_cast<Index>(picked.size());
    if (q == m) {
        throw Error(ErrorKind::Internal, "augment: (F; FA; ...) has rank m, so the rank condition already holds");
    }
    AugmentedFunctional out;
    out.F_bar.resize(q, n);
    for (Index i = 0; i < q; ++i) out.F_bar.row(i) = f0.row(picked[static_cast<size_t>(i)]);
    out.R = out.F_bar.bottomRows(q - m);
    out.K = Mat::Zero(m, q);
    out.K.leftCols(m).setIdentity();
    return out;
}

AugmentedFunctional augment_with(const Functional& func, const Mat& R, const Plant& plant, double tol) {
    require_same_n(plant, func);
    if (R.cols() != plant.n() || R.rows() == 0) throw Error(ErrorKind::Dimension, "augment_with: R has wrong width");
    AugmentedFunctional out;
    out.F_bar = vstack({func.F, R});
    out.R = R;
    if (rank(out.F_bar, tol) != out.F_bar.rows()) {
        throw Error(ErrorKind::InvalidInput, "augment_with: (F; R) is not of full row rank");
    }
    if (!check_rank_condition(Functional(out.F_bar), plant, tol)) {
        throw Error(ErrorKind::InvalidInput, "augment_with: (F; R) still violates rank(FA; F) = rank(F)");
    }
    out.K = Mat::Zero(func.m(), out.F_bar.rows());
    out.K.leftCols(func.m()).setIdentity();
    return out;
}

Mat two_delay_stack(const MeasurementModel& meas, const Plant& plant) {
    require_same_n(plant, meas);
    const auto& td = meas.as_two_delay();
    return vstack({hstack({td.c_tau, td.c_h}), hstack({td.c_tau * plant.A, td.c_h * plant.A})});
}

bool two_delay_rank_check(const MeasurementModel& meas, const Plant& plant, double tol) {
    return rank(two_delay_stack(meas, plant), tol) == 2 * plant.n();
}

Mat two_delay_solve(const Mat& N_tau, const Mat& N_h, const Functional& func, const MeasurementModel& meas,
                    const Plant& plant, double tol) {
    if (!two_delay_rank_check(meas, plant, tol)) {
        throw Error(ErrorKind::Unsupported,
                    "rank(C_tau C_h; C_tau A C_h A) < 2n: the rank-deficient two-delay case is not supported");
    }
    const Mat upsilon = -hstack({N_tau * func.F, N_h * func.F});
    return upsilon * pinv(two_delay_stack(meas, plant), tol);
}

FunctionalObserver assemble_two_delay(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                      const Mat& N, const Mat& N_tau, const Mat& N_h, const Mat& G_bar,
                                      const Mat& M) {
    const auto& td = meas.as_two_delay();
    FunctionalObserver obs;
    obs.M = M;
    obs.N = N;
    obs.N_tau = N_tau;
    obs.N_h = N_h;
    obs.G = G_bar + N * M;
    obs.G_tau = N_tau * M;
    obs.G_h = N_h * M;
    obs.J = func.F * plant.B;
    obs.J_tau = -M * td.c_tau * plant.B;
    obs.J_h = -M * td.c_h * plant.B;
    obs.tau = td.tau;
    obs.h = td.h;
    obs.validate(func.m(), meas.p(), plant.r());

    const auto coeffs = error_coefficients(plant, meas, func, obs);
    const double tol = consistency_tol({&plant.A, &plant.B, &td.c_tau, &td.c_h, &N, &N_tau, &N_h, &M, &G_bar});
    if (!theorem_conditions_hold(coeffs, tol)) {
        throw Error(ErrorKind::Inconsistent, "assembled two-delay observer violates decoupling (residual " +
                                                 std::to_string(coeffs.residual_norm) + ")");
    }
    return obs;
}

MeasurementModel extend_measurement(const MeasurementModel& meas, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "extend_measurement: alpha must be positive");
    const auto& s = meas.as_single();
    const Mat zero = Mat::Zero(s.c_tau.rows(), s.c_tau.cols());
    return MeasurementModel::two_delay(vstack({s.c_tau, zero}), vstack({zero, s.c_tau}), s.tau, s.tau + alpha);
}

ClosedLoopSystems closed_loop_systems(const Plant& plant, const MeasurementModel& meas, const Mat& F,
                                      const FunctionalObserver& obs, const Mat& K) {
    const Index n = plant.n();
    const Index q = obs.order();
    const Index m = F.rows();
    if (obs.two_delay()) throw Error(ErrorKind::Unsupported, "closed_loop_systems: single-delay observers only");
    if (F.cols() != n || K.rows() != m || K.cols() != q) throw Error(ErrorKind::Dimension, "closed_loop_systems: F/K sizes");
    if (plant.r() != m) throw Error(ErrorKind::Dimension, "closed_loop_systems: u = z requires r = m");
    const Mat& A = plant.A;
    const Mat& B = plant.B;
    const Mat& C = meas.as_single().c_tau;
    const double tau = obs.tau;

    Mat a_err = Mat::Zero(n + q, n + q);
    a_err.topLeftCorner(n, n) = A + B * F;
    a_err.topRightCorner(n, q) = B * K;
    a_err.bottomRightCorner(q, q) = obs.N;
    Mat d_err = Mat::Zero(n + q, n + q);
    d_err.bottomRightCorner(q, q) = obs.N_tau;

    const Mat n_t = obs.N + obs.J * K;
    const Mat n_tau_t = obs.N_tau + obs.J_tau * K;
    const Mat g_t = obs.G + obs.J * K * obs.M;
    const Mat g_tau_t = obs.G_tau + obs.J_tau * K * obs.M;

    Mat a_obs = Mat::Zero(n + q, n + q);
    a_obs.topLeftCorner(n, n) = A;
    a_obs.topRightCorner(n, q) = B * K;
    a_obs.bottomRightCorner(q, q) = n_t;
    Mat d1 = Mat::Zero(n + q, n + q);
    d1.topLeftCorner(n, n) = B * K * obs.M * C;
    d1.bottomLeftCorner(q, n) = g_t * C;
    d1.bottomRightCorner(q, q) = n_tau_t;
    Mat d2 = Mat::Zero(n + q, n + q);
    d2.bottomLeftCorner(q, n) = g_tau_t * C;

    return {DdeSystem::merged(a_err, {{d_err, tau}}),
            DdeSystem::merged(a_obs, {{d1, tau}, {d2, 2.0 * tau}})};
}

const char* to_string(SynthesisCase c) {
    switch (c) {
        case SynthesisCase::FullRank: return "case1_full_rank";
        case SynthesisCase::Structured: return "case2_structured";
    }
    return "unknown";
}

SynthesisPlan plan_synthesis(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                             const std::optional<Mat>& R, double tol) {
    require_same_n(plant, func);
    require_same_n(plant, meas);
    std::optional<AugmentedFunctional> aug;
    if (!check_rank_condition(func, plant, tol)) {
        aug = R ? augment_with(func, *R, plant, tol) : augment(func, plant, tol);
    }
    const Functional active = aug ? Functional(aug->F_bar) : func;
    SynthesisPlan plan{.case_tag = SynthesisCase::FullRank,
                       .augmented = aug.has_value(),
                       .functional = active,
                       .augmentation = aug,
                       .N = compute_N(active, plant, tol),
                       .theta_bar = {},
                       .theta = {},
                       .N_tau2 = {},
                       .reduced = std::nullopt};
    if (meas.is_two_delay()) {
        if (!two_delay_rank_check(meas, plant, tol)) {
            throw Error(ErrorKind::Unsupported,
                        "rank(C_tau C_h; C_tau A C_h A) < 2n: the rank-deficient two-delay case is not supported");
        }
        plan.theta_bar = two_delay_stack(meas, plant);
        return plan;
    }
    const Mat theta_bar = observability_stack(meas, plant);
    if (rank(theta_bar, tol) == plant.n()) {
        plan.theta_bar = theta_bar;
        return plan;
    }
    plan.case_tag = SynthesisCase::Structured;
    plan.theta = build_theta(active, meas, plant);
    plan.N_tau2 = nullspace_parameterization(plan.theta, active.m(), tol);
    plan.reduced = case2_reduce(plan.N_tau2, tol);
    return plan;
}

} // namespace tdc
