#pragma once

#include <functional>
#include <vector>

#include "tdc/linalg.hpp"

namespace tdc {

struct DelayTerm {
    Mat matrix;
    double delay = 0.0;
};

using Forcing = std::function<Vec(double)>;

/// Linear retarded system  x'(t) = A0 x(t) + sum_i A_i x(t - tau_i) + f(t)
/// with strictly increasing positive delays.
class DdeSystem {
public:
    explicit DdeSystem(Mat a0, std::vector<DelayTerm> delayed = {}, Forcing forcing = {});

    /// Sorts the terms, sums matrices that share a delay (within 1e-12) and drops
    /// terms whose matrix is exactly zero.
    static DdeSystem merged(Mat a0, std::vector<DelayTerm> terms, Forcing forcing = {});

    [[nodiscard]] const Mat& a0() const { return a0_; }
    [[nodiscard]] const std::vector<DelayTerm>& delayed() const { return delayed_; }
    [[nodiscard]] Index dim() const { return a0_.rows(); }
    [[nodiscard]] double max_delay() const;
    [[nodiscard]] double min_delay() const;
    [[nodiscard]] bool has_forcing() const { return static_cast<bool>(forcing_); }
    [[nodiscard]] const Forcing& forcing() const { return forcing_; }

    /// Delta(s) = sI - A0 - sum_i A_i e^{-s tau_i}
    [[nodiscard]] Eigen::MatrixXcd characteristic_matrix(Complex s) const;

private:
    Mat a0_;
    std::vector<DelayTerm> delayed_;
    Forcing forcing_;
};

/// Initial function on [-max_delay, 0].
using History = std::function<Vec(double)>;

History constant_history(const Vec& value);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> derivatives;
    double step = 0.0;

    [[nodiscard]] const Vec& back() const { return states.back(); }
    /// Cubic Hermite dense output for t in [0, times.back()].
    [[nodiscard]] Vec interpolate(double t) const;
    /// Largest Euclidean norm over samples with t in [t0, t1].
    [[nodiscard]] double sup_norm(double t0, double t1) const;
};

/// Method of steps with the classical 4-stage Runge-Kutta scheme. Delays that
/// are whole multiples of the step read the stored stage values of the earlier
/// step; other delays read a cubic Hermite interpolant of the stored solution.
/// Requires step <= min_delay / 4.
Trajectory simulate(const DdeSystem& sys, const History& history, double t_end, double step);

struct RootReport {
    std::vector<Complex> rightmost;  // roots sharing the largest real part (conjugates included)
    double abscissa = 0.0;
    int discretization_size = 0;
    double residual = 0.0;  // max |det Delta(s)| over the reported roots
    bool refined = true;    // false when Newton failed and raw eigenvalues are reported
    std::vector<Complex> candidates;  // refined roots, sorted by decreasing real part
};

/// Rightmost characteristic roots via Chebyshev collocation of the solution
/// operator's generator on [-tau_max, 0], Newton-polished on det Delta(s) = 0.
/// `grid` is the starting number of collocation intervals; it is doubled until
/// the rightmost root moves by less than 1e-6.
RootReport rightmost_roots(const DdeSystem& sys, int grid = 24);

/// Eigenvalues of the collocation matrix without refinement (exposed for tests).
std::vector<Complex> collocation_eigenvalues(const DdeSystem& sys, int grid);

/// Newton iteration on det Delta(s) = 0 from `guess`. Returns false on divergence.
bool refine_root(const DdeSystem& sys, Complex& root, double* residual = nullptr);

/// Scalar test for x' = a x + b x(t - tau): a + b < 0 and b >= -1/tau.
bool scalar_mori_test(double a, double b, double tau);

/// Supremum of tau for which some b passes scalar_mori_test(a, b, tau):
/// 1/a for a > 0, infinity otherwise.
double scalar_mori_delay_bound(double a);

} // namespace tdc
