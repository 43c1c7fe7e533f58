#include "tdc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdc/errors.hpp"

namespace tdc {

namespace {

void require_usable(const Mat& a, const char* op) {
    if (a.size() == 0) {
        throw Error(ErrorKind::InvalidInput, std::string(op) + ": empty matrix");
    }
    if (!all_finite(a)) {
        throw Error(ErrorKind::InvalidInput, std::string(op) + ": non-finite entries");
    }
}

void require_square(const Mat& a, const char* op) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::Dimension, std::string(op) + ": matrix is " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + ", expected square");
    }
}

Eigen::JacobiSVD<Mat> thin_svd(const Mat& a) {
    return Eigen::JacobiSVD<Mat>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

} // namespace

double Spectrum::max_real() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : eigenvalues) best = std::max(best, z.real());
    return best;
}

bool all_finite(const Mat& a) { return a.allFinite(); }

double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

Mat pinv(const Mat& a, double tol) {
    require_usable(a, "pinv");
    const auto svd = thin_svd(a);
    const Vec& s = svd.singularValues();
    const double cutoff = tol * (s.size() > 0 ? s(0) : 0.0);
    Vec inv = Vec::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Index rank(const Mat& a, double tol) {
    require_usable(a, "rank");
    const Vec s = Eigen::JacobiSVD<Mat>(a).singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cutoff = tol * s(0);
    return static_cast<Index>((s.array() > cutoff).count());
}

Spectrum eig(const Mat& a) {
    require_usable(a, "eig");
    require_square(a, "eig");
    Eigen::EigenSolver<Mat> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Internal, "eig: QR iteration did not converge");
    }
    Spectrum out;
    out.eigenvalues.reserve(static_cast<size_t>(a.rows()));
    out.min_real = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < a.rows(); ++i) {
        const Complex z = solver.eigenvalues()(i);
        out.eigenvalues.push_back(z);
        out.min_real = std::min(out.min_real, z.real());
    }
    return out;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> symmetric_solver(const Mat& a, const char* op) {
    require_usable(a, op);
    require_square(a, op);
    const double scale = std::max(1.0, max_abs(a));
    if (max_abs(a - a.transpose()) > 1e-10 * scale) {
        throw Error(ErrorKind::InvalidInput, std::string(op) + ": matrix is not symmetric");
    }
    const Mat sym = 0.5 * (a + a.transpose());
    return Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly);
}

} // namespace

double min_eig_sym(const Mat& a) { return symmetric_solver(a, "min_eig_sym").eigenvalues()(0); }

double max_eig_sym(const Mat& a) {
    const auto solver = symmetric_solver(a, "max_eig_sym");
    return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

double condition_estimate(const Mat& a) {
    require_usable(a, "condition_estimate");
    require_square(a, "condition_estimate");
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
    const double rc = lu.rcond();
    return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

Mat solve(const Mat& a, const Mat& b) {
    require_usable(a, "solve");
    require_square(a, "solve");
    if (b.rows() != a.rows()) {
        throw Error(ErrorKind::Dimension, "solve: right-hand side has " + std::to_string(b.rows()) +
                                              " rows, expected " + std::to_string(a.rows()));
    }
    Eigen::FullPivLU<Mat> lu(a);
    const double rc = lu.isInvertible() ? lu.rcond() : 0.0;
    if (rc < 1e3 * std::numeric_limits<double>::epsilon()) {
        const double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
        throw SingularMatrixError("solve: matrix is numerically singular (condition estimate " +
                                      std::to_string(cond) + ")",
                                  cond);
    }
    Mat x = lu.solve(b);
    // one step of iterative refinement
    x += lu.solve(b - a * x);
    return x;
}

Mat left_null_space(const Mat& a, double tol) {
    require_usable(a, "left_null_space");
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
    const Vec& s = svd.singularValues();
    const double cutoff = (s.size() > 0 ? s(0) : 0.0) * tol;
    Index r = 0;
    while (r < s.size() && s(r) > cutoff && s(r) > 0.0) ++r;
    const Index k = a.rows() - r;
    return svd.matrixU().rightCols(k).transpose();
}

Mat vstack(std::initializer_list<Mat> blocks) {
    Index rows = 0;
    Index cols = -1;
    for (const auto& b : blocks) {
        if (b.size() == 0 && b.rows() == 0) continue;
        if (cols >= 0 && b.cols() != cols) throw Error(ErrorKind::Dimension, "vstack: column mismatch");
        cols = b.cols();
        rows += b.rows();
    }
    Mat out(rows, std::max<Index>(cols, 0));
    Index r = 0;
    for (const auto& b : blocks) {
        if (b.rows() == 0) continue;
        out.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    return out;
}

Mat hstack(std::initializer_list<Mat> blocks) {
    Index cols = 0;
    Index rows = -1;
    for (const auto& b : blocks) {
        if (b.cols() == 0) continue;
        if (rows >= 0 && b.rows() != rows) throw Error(ErrorKind::Dimension, "hstack: row mismatch");
        rows = b.rows();
        cols += b.cols();
    }
    Mat out(std::max<Index>(rows, 0), cols);
    Index c = 0;
    for (const auto& b : blocks) {
        if (b.cols() == 0) continue;
        out.middleCols(c, b.cols()) = b;
        c += b.cols();
    }
    return out;
}

Mat block_diag(std::initializer_list<Mat> blocks) {
    Index rows = 0;
    Index cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Mat out = Mat::Zero(rows, cols);
    Index r = 0;
    Index c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

Mat make_mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto nr = static_cast<Index>(rows.size());
    const auto nc = nr > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
    Mat out(nr, nc);
    Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != nc) throw Error(ErrorKind::Dimension, "make_mat: ragged rows");
        Index j = 0;
        for (double v : row) out(i, j++) = v;
        ++i;
    }
    return out;
}

} // namespace tdc
