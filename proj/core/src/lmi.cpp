#include "tdc/lmi.hpp"

#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>

#include "tdc/errors.hpp"

namespace tdc {

AffineMat::AffineMat(Index rows, Index cols) : rows_(rows), cols_(cols), constant_(Mat::Zero(rows, cols)) {}

AffineMat AffineMat::constant(Mat value) {
    AffineMat a(value.rows(), value.cols());
    a.constant_ = std::move(value);
    return a;
}

void AffineMat::add_term(Index decision, const Mat& coeff) {
    if (coeff.rows() != rows_ || coeff.cols() != cols_) throw Error(ErrorKind::Dimension, "AffineMat: term size");
    auto it = terms_.find(decision);
    if (it == terms_.end()) {
        terms_.emplace(decision, coeff);
    } else {
        it->second += coeff;
    }
}

Mat AffineMat::evaluate(const Vec& x) const {
    Mat out = constant_;
    for (const auto& [k, c] : terms_) {
        if (k >= x.size()) throw Error(ErrorKind::Dimension, "AffineMat: decision vector too short");
        out += x(k) * c;
    }
    return out;
}

AffineMat AffineMat::transpose() const {
    AffineMat t(cols_, rows_);
    t.constant_ = constant_.transpose();
    for (const auto& [k, c] : terms_) t.terms_.emplace(k, c.transpose());
    return t;
}

AffineMat& AffineMat::operator+=(const AffineMat& other) {
    if (other.rows_ != rows_ || other.cols_ != cols_) throw Error(ErrorKind::Dimension, "AffineMat: sum sizes");
    constant_ += other.constant_;
    for (const auto& [k, c] : other.terms_) add_term(k, c);
    return *this;
}

AffineMat& AffineMat::operator-=(const AffineMat& other) { return *this += -1.0 * other; }

AffineMat& AffineMat::operator*=(double s) {
    constant_ *= s;
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

namespace {

AffineMat mapped(const AffineMat& a, Index rows, Index cols, const std::function<Mat(const Mat&)>& f) {
    AffineMat out = AffineMat::constant(f(a.offset()));
    if (out.rows() != rows || out.cols() != cols) throw Error(ErrorKind::Internal, "AffineMat: mapped size");
    for (const auto& [k, c] : a.terms()) {
        Mat m = f(c);
        if (!m.isZero(0.0)) out.add_term(k, m);
    }
    return out;
}

} // namespace

AffineMat operator*(const Mat& left, const AffineMat& a) {
    if (left.cols() != a.rows()) throw Error(ErrorKind::Dimension, "AffineMat: left product sizes");
    return mapped(a, left.rows(), a.cols(), [&left](const Mat& c) -> Mat { return left * c; });
}

AffineMat operator*(const AffineMat& a, const Mat& right) {
    if (a.cols() != right.rows()) throw Error(ErrorKind::Dimension, "AffineMat: right product sizes");
    return mapped(a, a.rows(), right.cols(), [&right](const Mat& c) -> Mat { return c * right; });
}

AffineMat AffineMat::blocks(const AffineMat& a11, const AffineMat& a12, const AffineMat& a21, const AffineMat& a22) {
    if (a11.rows() != a12.rows() || a21.rows() != a22.rows() || a11.cols() != a21.cols() ||
        a12.cols() != a22.cols()) {
        throw Error(ErrorKind::Dimension, "AffineMat: block sizes");
    }
    const Index r = a11.rows() + a21.rows();
    const Index c = a11.cols() + a12.cols();
    AffineMat out(r, c);
    auto place = [&](const AffineMat& a, Index r0, Index c0) {
        out.constant_.block(r0, c0, a.rows(), a.cols()) += a.constant_;
        for (const auto& [k, m] : a.terms_) {
            Mat full = Mat::Zero(r, c);
            full.block(r0, c0, a.rows(), a.cols()) = m;
            out.add_term(k, full);
        }
    };
    place(a11, 0, 0);
    place(a12, 0, a11.cols());
    place(a21, a11.rows(), 0);
    place(a22, a11.rows(), a11.cols());
    return out;
}

AffineMat sym(const AffineMat& a) { return a + a.transpose(); }

AffineMat congruence(const Mat& left, const AffineMat& a) {
    const Mat right = left.transpose();
    return mapped(a, left.rows(), left.rows(), [&](const Mat& c) -> Mat { return left * c * right; });
}

AffineMat diag2(const AffineMat& a) {
    const AffineMat z(a.rows(), a.cols());
    return AffineMat::blocks(a, z, z, a);
}

SelectorBasis::SelectorBasis(Index n, Index k) : n_(n), k_(k) {
    if (n <= 0 || k <= 0) throw Error(ErrorKind::InvalidInput, "SelectorBasis: sizes must be positive");
}

Mat SelectorBasis::v(Index i) const {
    if (i < 1 || i > k_) throw Error(ErrorKind::InvalidInput, "SelectorBasis: index out of range");
    Mat out = Mat::Zero(k_ * n_, n_);
    out.middleRows((i - 1) * n_, n_).setIdentity();
    return out;
}

Mat SelectorBasis::row(const std::vector<std::pair<Index, Mat>>& blocks, Index rows) const {
    Mat out = Mat::Zero(rows, k_ * n_);
    for (const auto& [i, m] : blocks) {
        if (i < 1 || i > k_ || m.rows() != rows || m.cols() != n_) {
            throw Error(ErrorKind::Dimension, "SelectorBasis::row: bad block");
        }
        out.middleCols((i - 1) * n_, n_) += m;
    }
    return out;
}

const char* to_string(Structure s) {
    switch (s) {
        case Structure::SymmetricPD: return "symmetric_pd";
        case Structure::Symmetric: return "symmetric";
        case Structure::General: return "general";
        case Structure::Scalar: return "scalar";
    }
    return "unknown";
}

const char* to_string(Sense s) { return s == Sense::Negative ? "negative" : "positive"; }

AffineMat LmiProblem::add_variable(const std::string& name, Index rows, Index cols, Structure structure) {
    for (const auto& v : variables_) {
        if (v.name == name) throw Error(ErrorKind::InvalidInput, "LmiProblem: duplicate variable " + name);
    }
    const bool symmetric = structure == Structure::Symmetric || structure == Structure::SymmetricPD;
    if (structure == Structure::Scalar && (rows != 1 || cols != 1)) {
        throw Error(ErrorKind::Dimension, "LmiProblem: scalar variable must be 1x1");
    }
    if (symmetric && rows != cols) throw Error(ErrorKind::Dimension, "LmiProblem: symmetric variable must be square");

    VariableBlock var{name, rows, cols, structure, decisions_, 0};
    AffineMat a(rows, cols);
    Index k = decisions_;
    if (symmetric) {
        for (Index i = 0; i < rows; ++i) {
            for (Index j = i; j < cols; ++j) {
                Mat e = Mat::Zero(rows, cols);
                e(i, j) = 1.0;
                e(j, i) = 1.0;
                a.add_term(k++, e);
            }
        }
    } else {
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                Mat e = Mat::Zero(rows, cols);
                e(i, j) = 1.0;
                a.add_term(k++, e);
            }
        }
    }
    var.count = k - decisions_;
    decisions_ = k;
    variables_.push_back(var);
    if (structure == Structure::SymmetricPD) add_constraint(name + " > 0", Sense::Positive, a);
    return a;
}

void LmiProblem::add_constraint(std::string label, Sense sense, AffineMat map) {
    if (map.rows() != map.cols()) throw Error(ErrorKind::Dimension, "LmiProblem: constraint must be square");
    constraints_.push_back({std::move(label), sense, std::move(map)});
}

const VariableBlock& LmiProblem::variable(const std::string& name) const {
    for (const auto& v : variables_) {
        if (v.name == name) return v;
    }
    throw Error(ErrorKind::InvalidInput, "LmiProblem: no variable named " + name);
}

Mat LmiProblem::value(const VariableBlock& var, const Vec& x) const {
    if (x.size() != decisions_) throw Error(ErrorKind::Dimension, "LmiProblem: decision vector size");
    Mat out(var.rows, var.cols);
    Index k = var.offset;
    if (var.structure == Structure::Symmetric || var.structure == Structure::SymmetricPD) {
        for (Index i = 0; i < var.rows; ++i) {
            for (Index j = i; j < var.cols; ++j) {
                out(i, j) = x(k);
                out(j, i) = x(k);
                ++k;
            }
        }
    } else {
        for (Index i = 0; i < var.rows; ++i) {
            for (Index j = 0; j < var.cols; ++j) out(i, j) = x(k++);
        }
    }
    return out;
}

std::map<std::string, Mat> LmiProblem::assignment(const Vec& x) const {
    std::map<std::string, Mat> out;
    for (const auto& v : variables_) out.emplace(v.name, value(v, x));
    return out;
}

double LmiProblem::margin(const Vec& x) const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints_) {
        Mat f = c.map.evaluate(x);
        f = 0.5 * (f + f.transpose());
        if (c.sense == Sense::Negative) f = -f;
        worst = std::min(worst, min_eig_sym(f));
    }
    return worst;
}

void write_problem(std::ostream& os, const LmiProblem& problem) {
    os << std::setprecision(17);
    os << "kind " << problem.kind << "\n";
    os << "delays";
    for (double d : problem.delays) os << ' ' << d;
    os << "\n";
    if (problem.synthesis) os << "lambda " << problem.synthesis->lambda << "\n";
    os << "decisions " << problem.decisions() << "\n";
    for (const auto& v : problem.variables()) {
        os << "variable " << v.name << ' ' << v.rows << ' ' << v.cols << ' ' << to_string(v.structure) << ' '
           << v.offset << ' ' << v.count << "\n";
    }
    auto dump = [&os](const Mat& m) {
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
            os << "\n";
        }
    };
    for (const auto& c : problem.constraints()) {
        os << "constraint \"" << c.label << "\" " << to_string(c.sense) << ' ' << c.map.rows() << ' '
           << c.map.terms().size() << "\n";
        os << "offset\n";
        dump(c.map.offset());
        for (const auto& [k, m] : c.map.terms()) {
            os << "term " << k << "\n";
            dump(m);
        }
    }
}

} // namespace tdc
