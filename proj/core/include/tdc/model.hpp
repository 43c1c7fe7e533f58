#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tdc/dde.hpp"
#include "tdc/linalg.hpp"

namespace tdc {

/// x'(t) = A x(t) + B u(t)
struct Plant {
    Mat A;
    Mat B;

    Plant(Mat a, Mat b);
    [[nodiscard]] Index n() const { return A.rows(); }
    [[nodiscard]] Index r() const { return B.cols(); }
};

/// y(t) = C_tau x(t - tau)
struct SingleDelay {
    Mat c_tau;
    double tau = 0.0;
};

/// y(t) = C_tau x(t - tau) + C_h x(t - h), h > tau
struct TwoDelay {
    Mat c_tau;
    Mat c_h;
    double tau = 0.0;
    double h = 0.0;
};

class MeasurementModel {
public:
    static MeasurementModel single(Mat c_tau, double tau);
    static MeasurementModel two_delay(Mat c_tau, Mat c_h, double tau, double h);

    [[nodiscard]] bool is_two_delay() const { return std::holds_alternative<TwoDelay>(data_); }
    [[nodiscard]] const SingleDelay& as_single() const;
    [[nodiscard]] const TwoDelay& as_two_delay() const;

    [[nodiscard]] const Mat& c_tau() const;
    [[nodiscard]] double tau() const;
    [[nodiscard]] Index p() const { return c_tau().rows(); }
    [[nodiscard]] Index n() const { return c_tau().cols(); }

private:
    explicit MeasurementModel(std::variant<SingleDelay, TwoDelay> d) : data_(std::move(d)) {}
    std::variant<SingleDelay, TwoDelay> data_;
};

/// z(t) = F x(t), F of full row rank.
struct Functional {
    Mat F;

    explicit Functional(Mat f);
    [[nodiscard]] Index m() const { return F.rows(); }
};

/// w'(t) = N w + N_tau w(t-tau) [+ N_h w(t-h)] + G y + G_tau y(t-tau) [+ G_h y(t-h)]
///         + J u + J_tau u(t-tau) [+ J_h u(t-h)],     z_hat = w + M y
struct FunctionalObserver {
    Mat M, N, N_tau, G, G_tau, J, J_tau;
    std::optional<Mat> N_h, G_h, J_h;
    double tau = 0.0;
    std::optional<double> h;

    [[nodiscard]] bool two_delay() const { return h.has_value(); }
    [[nodiscard]] Index order() const { return N.rows(); }

    /// Throws Dimension / Configuration errors when blocks disagree with (n, m, p, r).
    void validate(Index m, Index p, Index r) const;
};

struct ErrorCoefficients {
    std::vector<std::pair<std::string, Mat>> blocks;
    double residual_norm = 0.0;

    [[nodiscard]] const Mat& block(const std::string& name) const;
};

ErrorCoefficients error_coefficients(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                     const FunctionalObserver& obs);

bool theorem_conditions_hold(const ErrorCoefficients& coeffs, double tol = 1e-8);

/// e'(t) = N e(t) + N_tau e(t-tau) [+ N_h e(t-h)]; refuses when the decoupling
/// conditions fail at `tol`.
DdeSystem error_system(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                       const FunctionalObserver& obs, double tol = 1e-6);

/// Same system, built from the observer alone (no decoupling check).
DdeSystem error_system_unchecked(const FunctionalObserver& obs);

} // namespace tdc
