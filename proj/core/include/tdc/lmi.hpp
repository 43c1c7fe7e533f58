#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdc/linalg.hpp"

namespace tdc {

/// Matrix-valued affine map  x -> C0 + sum_k x_k C_k  over a decision vector x.
class AffineMat {
public:
    AffineMat() = default;
    AffineMat(Index rows, Index cols);
    static AffineMat constant(Mat value);
    static AffineMat zero(Index rows, Index cols) { return AffineMat(rows, cols); }

    [[nodiscard]] Index rows() const { return rows_; }
    [[nodiscard]] Index cols() const { return cols_; }
    [[nodiscard]] const Mat& offset() const { return constant_; }
    [[nodiscard]] const std::map<Index, Mat>& terms() const { return terms_; }

    void add_term(Index decision, const Mat& coeff);
    [[nodiscard]] Mat evaluate(const Vec& x) const;
    [[nodiscard]] AffineMat transpose() const;

    AffineMat& operator+=(const AffineMat& other);
    AffineMat& operator-=(const AffineMat& other);
    AffineMat& operator*=(double s);

    friend AffineMat operator+(AffineMat a, const AffineMat& b) { return a += b; }
    friend AffineMat operator-(AffineMat a, const AffineMat& b) { return a -= b; }
    friend AffineMat operator-(AffineMat a) { return a *= -1.0; }
    friend AffineMat operator*(double s, AffineMat a) { return a *= s; }
    friend AffineMat operator*(const Mat& left, const AffineMat& a);
    friend AffineMat operator*(const AffineMat& a, const Mat& right);

    /// 2x2 block assembly.
    static AffineMat blocks(const AffineMat& a11, const AffineMat& a12, const AffineMat& a21, const AffineMat& a22);

private:
    Index rows_ = 0;
    Index cols_ = 0;
    Mat constant_;
    std::map<Index, Mat> terms_;
};

/// A + A^T
AffineMat sym(const AffineMat& a);

/// L A L^T, with the congruence done on every coefficient.
AffineMat congruence(const Mat& left, const AffineMat& a);

/// diag(a, a)
AffineMat diag2(const AffineMat& a);

/// Block selectors v_i (i = 1..k), each k*n x n.
class SelectorBasis {
public:
    SelectorBasis(Index n, Index k);
    [[nodiscard]] Index n() const { return n_; }
    [[nodiscard]] Index k() const { return k_; }
    [[nodiscard]] Mat v(Index i) const;
    /// (M_1 ... M_k) as an n x kn row of blocks; blocks not listed are zero.
    [[nodiscard]] Mat row(const std::vector<std::pair<Index, Mat>>& blocks, Index rows) const;

private:
    Index n_;
    Index k_;
};

enum class Structure { SymmetricPD, Symmetric, General, Scalar };
const char* to_string(Structure s);

struct VariableBlock {
    std::string name;
    Index rows = 0;
    Index cols = 0;
    Structure structure = Structure::General;
    Index offset = 0;  // first decision index
    Index count = 0;   // number of decisions
};

enum class Sense { Negative, Positive };
const char* to_string(Sense s);

struct LmiConstraint {
    std::string label;
    Sense sense = Sense::Negative;
    AffineMat map;
};

/// e' = (base + sum_j Z_j right_j) e(t - delay)
struct ClosedLoopTerm {
    double delay = 0.0;
    Mat base;
    std::vector<std::pair<Index, Mat>> gains;  // (gain index, right factor)
};

/// Gains Z_i = X^{-1} G_i and the closed loop they produce.
struct SynthesisInfo {
    double lambda = 0.0;
    std::string x_name = "X";
    std::vector<std::string> gain_names;  // reported names (N_tau, Z, Z_tau, ...)
    std::vector<std::string> g_names;     // variable names G_i
    ClosedLoopTerm undelayed;
    std::vector<ClosedLoopTerm> delayed;
    std::optional<std::pair<double, double>> interval;
    std::vector<double> partition;  // tau_1 < tau_2 < tau_3 used by the constant-delay condition
};

class LmiProblem {
public:
    std::string kind;            // builder name, e.g. "stability_constant"
    std::vector<double> delays;  // the delay data the problem was built for
    double data_scale = 0.0;     // largest norm of the system matrices
    std::optional<SynthesisInfo> synthesis;

    /// Registers a variable and returns its affine matrix. SymmetricPD variables
    /// also add a strict-positive constraint "<name> > 0".
    AffineMat add_variable(const std::string& name, Index rows, Index cols, Structure structure);
    void add_constraint(std::string label, Sense sense, AffineMat map);

    [[nodiscard]] Index decisions() const { return decisions_; }
    [[nodiscard]] const std::vector<VariableBlock>& variables() const { return variables_; }
    [[nodiscard]] const std::vector<LmiConstraint>& constraints() const { return constraints_; }
    [[nodiscard]] const VariableBlock& variable(const std::string& name) const;

    [[nodiscard]] Mat value(const VariableBlock& var, const Vec& x) const;
    [[nodiscard]] Mat value(const std::string& name, const Vec& x) const { return value(variable(name), x); }
    [[nodiscard]] std::map<std::string, Mat> assignment(const Vec& x) const;

    /// Smallest eigenvalue of -F(x) (Negative) or F(x) (Positive) over all
    /// constraints; positive iff every strict inequality holds.
    [[nodiscard]] double margin(const Vec& x) const;

    /// epsilon = 1e-6 (1 + data_scale)
    [[nodiscard]] double strictness() const { return 1e-6 * (1.0 + data_scale); }

private:
    std::vector<VariableBlock> variables_;
    std::vector<LmiConstraint> constraints_;
    Index decisions_ = 0;
};

/// Plain-text dump: variables, then every constraint as offset and per-decision
/// coefficient matrices, row-major with 17 significant digits.
void write_problem(std::ostream& os, const LmiProblem& problem);

// ---- Stability conditions -------------------------------------------------

/// e' = N e + N_tau e(t - tau): Wirtinger-based functional, 4-block basis.
LmiProblem stability_constant(const Mat& N, const Mat& N_tau, double tau);

/// Same system, any tau in [tau_lo, tau_hi] (reciprocally convex bound).
LmiProblem stability_interval(const Mat& N, const Mat& N_tau, double tau_lo, double tau_hi);

/// Interval condition with variables affine in tau.
LmiProblem stability_interval_pd(const Mat& N, const Mat& N_tau, double tau_lo, double tau_hi);

/// e' = N e + N1 e(t - tau1) + N2 e(t - tau2) + N3 e(t - tau3).
LmiProblem stability_multi(const Mat& N, const Mat& N1, const Mat& N2, const Mat& N3, double tau1, double tau2,
                           double tau3);

/// stability_multi on the grid tau/3, 2tau/3, tau with N1 = N2 = 0.
LmiProblem stability_partitioned(const Mat& N, const Mat& N_tau, double tau);

/// stability_multi on the grid tau/2, tau, h with N1 = 0.
LmiProblem stability_two_delay(const Mat& N, const Mat& N_tau, const Mat& N_h, double tau, double h);

// ---- Stabilization conditions ---------------------------------------------
// Each adds free-weighting terms sym((v1 + lambda v8) X N1^T) + sym((v1 + lambda v8) G_i N2i^T)
// and records the gain rule Z_i = X^{-1} G_i.

LmiProblem synth_constant(const Mat& N, double tau, double lambda);
LmiProblem synth_interval(const Mat& N, double tau_lo, double tau_hi, double lambda);
LmiProblem synth_structured_constant(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2, double tau,
                                     double lambda);
LmiProblem synth_structured_interval(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2,
                                     double tau_lo, double tau_hi, double lambda);
LmiProblem synth_two_delay(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2, const Mat& Nh1,
                           const Mat& Nh2, double tau, double h, double lambda);

struct ThreeDelayBlocks {
    Mat N01, N02;
    Mat N11, N12;
    Mat N21, N22;
    Mat N31, N32;
};
LmiProblem synth_three_delay(const ThreeDelayBlocks& blocks, double tau1, double tau2, double tau3, double lambda);

/// Stability problem for the closed loop of a synthesis problem with gains
/// substituted: the interval condition for interval problems, otherwise
/// stability_multi on the recorded partition.
LmiProblem closed_loop_stability_problem(const SynthesisInfo& info, const std::vector<Mat>& gains);

/// e' = A0 e + sum A_i e(t - tau_i) for the closed loop of a synthesis
/// problem. `tau_override` replaces the delay of the single delayed term
/// (used to probe interior points of an interval).
std::pair<Mat, std::vector<std::pair<Mat, double>>> closed_loop_matrices(const SynthesisInfo& info,
                                                                         const std::vector<Mat>& gains,
                                                                         std::optional<double> tau_override = {});

} // namespace tdc
