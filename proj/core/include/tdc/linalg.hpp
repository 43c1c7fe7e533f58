#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace tdc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Relative singular-value cutoff used by every rank decision unless overridden.
inline constexpr double kRankTol = 1e-10;

/// Eigenvalues of a real square matrix.
struct Spectrum {
    std::vector<Complex> eigenvalues;
    double min_real = 0.0;

    /// Largest real part (spectral abscissa).
    [[nodiscard]] double max_real() const;
};

/// Moore-Penrose pseudoinverse; singular values below tol * sigma_max are dropped.
Mat pinv(const Mat& a, double tol = kRankTol);

/// Number of singular values above tol * sigma_max.
Index rank(const Mat& a, double tol = kRankTol);

Spectrum eig(const Mat& a);

/// Smallest eigenvalue of the symmetric part. Throws if `a` is not symmetric
/// to 1e-10 relative.
double min_eig_sym(const Mat& a);
double max_eig_sym(const Mat& a);

/// Solves A X = B for square nonsingular A. Throws SingularMatrixError (with a
/// condition estimate) when A is numerically singular.
Mat solve(const Mat& a, const Mat& b);

/// 1-norm condition estimate of a square matrix (infinity when singular).
double condition_estimate(const Mat& a);

/// Orthonormal basis (as rows) of the left null space of `a`.
Mat left_null_space(const Mat& a, double tol = kRankTol);

bool all_finite(const Mat& a);
double max_abs(const Mat& a);

Mat vstack(std::initializer_list<Mat> blocks);
Mat hstack(std::initializer_list<Mat> blocks);
Mat block_diag(std::initializer_list<Mat> blocks);

/// Builds a matrix from row-major nested initializer lists, for tests and fixtures.
Mat make_mat(std::initializer_list<std::initializer_list<double>> rows);

} // namespace tdc
