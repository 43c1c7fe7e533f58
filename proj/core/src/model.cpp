#include "tdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdc/errors.hpp"

namespace tdc {

namespace {

std::string shape(const Mat& a) { return std::to_string(a.rows()) + "x" + std::to_string(a.cols()); }

void expect_shape(const Mat& a, Index rows, Index cols, const char* name) {
    if (a.rows() != rows || a.cols() != cols) {
        throw Error(ErrorKind::Dimension, std::string(name) + " is " + shape(a) + ", expected " +
                                              std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void expect_finite(const Mat& a, const char* name) {
    if (!all_finite(a)) throw Error(ErrorKind::InvalidInput, std::string(name) + " has non-finite entries");
}

} // namespace

Plant::Plant(Mat a, Mat b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw Error(ErrorKind::Dimension, "plant: A must be square, got " + shape(A));
    if (B.rows() != A.rows() || B.cols() == 0) throw Error(ErrorKind::Dimension, "plant: B is " + shape(B));
    expect_finite(A, "A");
    expect_finite(B, "B");
}

MeasurementModel MeasurementModel::single(Mat c_tau, double tau) {
    if (c_tau.size() == 0) throw Error(ErrorKind::Dimension, "measurement: empty C_tau");
    expect_finite(c_tau, "C_tau");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidInput, "measurement: tau must be positive");
    if (rank(c_tau) != c_tau.rows()) {
        throw Error(ErrorKind::InvalidInput, "measurement: C_tau must have full row rank");
    }
    return MeasurementModel(SingleDelay{std::move(c_tau), tau});
}

MeasurementModel MeasurementModel::two_delay(Mat c_tau, Mat c_h, double tau, double h) {
    if (c_tau.size() == 0) throw Error(ErrorKind::Dimension, "measurement: empty C_tau");
    expect_shape(c_h, c_tau.rows(), c_tau.cols(), "C_h");
    expect_finite(c_tau, "C_tau");
    expect_finite(c_h, "C_h");
    if (!(tau > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidInput, "measurement: tau must be positive");
    if (!(h > tau)) throw Error(ErrorKind::Ordering, "measurement: h must exceed tau");
    return MeasurementModel(TwoDelay{std::move(c_tau), std::move(c_h), tau, h});
}

const SingleDelay& MeasurementModel::as_single() const {
    if (const auto* s = std::get_if<SingleDelay>(&data_)) return *s;
    throw Error(ErrorKind::Configuration, "measurement is two-delay, single-delay expected");
}

const TwoDelay& MeasurementModel::as_two_delay() const {
    if (const auto* s = std::get_if<TwoDelay>(&data_)) return *s;
    throw Error(ErrorKind::Configuration, "measurement is single-delay, two-delay expected");
}

const Mat& MeasurementModel::c_tau() const {
    return std::visit([](const auto& d) -> const Mat& { return d.c_tau; }, data_);
}

double MeasurementModel::tau() const {
    return std::visit([](const auto& d) { return d.tau; }, data_);
}

Functional::Functional(Mat f) : F(std::move(f)) {
    if (F.size() == 0) throw Error(ErrorKind::Dimension, "functional: empty F");
    expect_finite(F, "F");
    if (F.rows() > F.cols()) throw Error(ErrorKind::InvalidInput, "functional: more rows than states");
    if (rank(F) != F.rows()) throw Error(ErrorKind::InvalidInput, "functional: F must have full row rank");
}

void FunctionalObserver::validate(Index m, Index p, Index r) const {
    expect_shape(M, m, p, "M");
    expect_shape(N, m, m, "N");
    expect_shape(N_tau, m, m, "N_tau");
    expect_shape(G, m, p, "G");
    expect_shape(G_tau, m, p, "G_tau");
    expect_shape(J, m, r, "J");
    expect_shape(J_tau, m, r, "J_tau");
    const bool any_h = N_h || G_h || J_h;
    if (two_delay()) {
        if (!(N_h && G_h && J_h)) throw Error(ErrorKind::Configuration, "two-delay observer lacks *_h blocks");
        expect_shape(*N_h, m, m, "N_h");
        expect_shape(*G_h, m, p, "G_h");
        expect_shape(*J_h, m, r, "J_h");
        if (!(*h > tau)) throw Error(ErrorKind::Ordering, "observer: h must exceed tau");
    } else if (any_h) {
        throw Error(ErrorKind::Configuration, "single-delay observer carries *_h blocks");
    }
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidInput, "observer: tau must be positive");
}

const Mat& ErrorCoefficients::block(const std::string& name) const {
    for (const auto& [key, value] : blocks) {
        if (key == name) return value;
    }
    throw Error(ErrorKind::InvalidInput, "no error coefficient named " + name);
}

ErrorCoefficients error_coefficients(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                     const FunctionalObserver& obs) {
    const Index n = plant.n();
    if (meas.n() != n || func.F.cols() != n) throw Error(ErrorKind::Dimension, "error_coefficients: state sizes differ");
    if (obs.two_delay() != meas.is_two_delay()) {
        throw Error(ErrorKind::Configuration, "error_coefficients: observer and measurement variants differ");
    }
    obs.validate(func.m(), meas.p(), plant.r());

    const Mat& A = plant.A;
    const Mat& B = plant.B;
    const Mat& F = func.F;
    const Mat g_bar = obs.G - obs.N * obs.M;
    const Mat g_bar_tau = obs.G_tau - obs.N_tau * obs.M;

    ErrorCoefficients out;
    if (!meas.is_two_delay()) {
        const Mat& C = meas.c_tau();
        out.blocks = {
            {"C1", obs.J - F * B},
            {"C2", obs.J_tau + obs.M * C * B},
            {"C3", obs.N * F - F * A},
            {"C4", obs.N_tau * F + g_bar * C + obs.M * C * A},
            {"C5", g_bar_tau * C},
        };
    } else {
        const auto& td = meas.as_two_delay();
        const Mat& Ct = td.c_tau;
        const Mat& Ch = td.c_h;
        const Mat g_bar_h = *obs.G_h - *obs.N_h * obs.M;
        out.blocks = {
            {"C1", obs.J - F * B},
            {"C2", obs.J_tau + obs.M * Ct * B},
            {"C3", *obs.J_h + obs.M * Ch * B},
            {"C4", obs.N * F - F * A},
            {"C5", obs.N_tau * F + g_bar * Ct + obs.M * Ct * A},
            {"C6", *obs.N_h * F + g_bar * Ch + obs.M * Ch * A},
            {"C7", g_bar_tau * Ct},
            {"C8", g_bar_h * Ct + g_bar_tau * Ch},
            {"C9", g_bar_h * Ch},
        };
    }
    for (const auto& [name, value] : out.blocks) out.residual_norm = std::max(out.residual_norm, max_abs(value));
    return out;
}

bool theorem_conditions_hold(const ErrorCoefficients& coeffs, double tol) { return coeffs.residual_norm <= tol; }

DdeSystem error_system_unchecked(const FunctionalObserver& obs) {
    std::vector<DelayTerm> terms{{obs.N_tau, obs.tau}};
    if (obs.two_delay()) terms.push_back({*obs.N_h, *obs.h});
    return DdeSystem::merged(obs.N, std::move(terms));
}

DdeSystem error_system(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                       const FunctionalObserver& obs, double tol) {
    const auto coeffs = error_coefficients(plant, meas, func, obs);
    if (!theorem_conditions_hold(coeffs, tol)) {
        throw Error(ErrorKind::Inconsistent, "error_system: decoupling conditions violated (residual " +
                                                 std::to_string(coeffs.residual_norm) + ")");
    }
    return error_system_unchecked(obs);
}

} // namespace tdc
