#include <cmath>
#include <string>

#include "tdc/errors.hpp"
#include "tdc/lmi.hpp"

namespace tdc {

namespace {

const double kSqrt3 = std::sqrt(3.0);

Index square_dim(const Mat& N, const char* what) {
    if (N.rows() == 0 || N.rows() != N.cols()) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": N must be square and nonempty");
    }
    if (!all_finite(N)) throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite data");
    return N.rows();
}

void require_shape(const Mat& M, Index rows, Index cols, const char* what) {
    if (M.rows() != rows || M.cols() != cols) {
        throw Error(ErrorKind::Dimension, std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + ", got " + std::to_string(M.rows()) + "x" +
                                              std::to_string(M.cols()));
    }
    if (!all_finite(M)) throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite data");
}

void require_positive(double tau, const char* what) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidInput, std::string(what) + ": delay must be positive");
}

void require_increasing(std::initializer_list<double> taus, const char* what) {
    double prev = 0.0;
    for (double t : taus) {
        if (!std::isfinite(t) || !(t > prev)) {
            throw Error(ErrorKind::Ordering, std::string(what) + ": delays must satisfy 0 < d1 < d2 < ...");
        }
        prev = t;
    }
}

double spectral_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(M).singularValues()(0);
}

double data_scale(std::initializer_list<const Mat*> mats) {
    double s = 0.0;
    for (const Mat* m : mats) s = std::max(s, spectral_norm(*m));
    return s;
}

Mat hcat(const Mat& a, const Mat& b) { return hstack({a, b}); }

Mat gamma(const SelectorBasis& b, Index a, Index c, Index mid) {
    return hcat(b.v(a) - b.v(c), kSqrt3 * (b.v(a) + b.v(c) - 2.0 * b.v(mid)));
}

// v A v^T with a constant selector
AffineMat outer(const Mat& v, const AffineMat& a) { return congruence(v, a); }

struct MultiVars {
    AffineMat P;
    AffineMat Q[3];
    AffineMat R[3];
};

// Terms shared by every 8-block condition: sym(Pi1 P Pi2^T) and the Q chain.
AffineMat energy_terms(const SelectorBasis& b, const Mat& pi1, const AffineMat& P, const AffineMat (&Q)[3]) {
    const Mat pi2 = hstack({b.v(8), b.v(1) - b.v(2), b.v(2) - b.v(3), b.v(3) - b.v(4)});
    AffineMat out = sym(pi1 * P * pi2.transpose());
    out += outer(b.v(1), Q[0]);
    out -= outer(b.v(2), Q[0] - Q[1]);
    out -= outer(b.v(3), Q[1] - Q[2]);
    out -= outer(b.v(4), Q[2]);
    return out;
}

// Theta_3 for delays t1 < t2 < t3.
AffineMat theta_multi(const SelectorBasis& b, double t1, double t2, double t3, const MultiVars& v) {
    const Mat pi1 = hstack({b.v(1), t1 * b.v(5), (t2 - t1) * b.v(6), (t3 - t2) * b.v(7)});
    AffineMat out = energy_terms(b, pi1, v.P, v.Q);
    const Mat v8 = b.v(8);
    out += t1 * outer(v8, v.R[0]);
    out += (t2 - t1) * outer(v8, v.R[1]);
    out += (t3 - t2) * outer(v8, v.R[2]);
    out -= (1.0 / t1) * congruence(gamma(b, 1, 2, 5), diag2(v.R[0]));
    out -= (1.0 / (t2 - t1)) * congruence(gamma(b, 2, 3, 6), diag2(v.R[1]));
    out -= (1.0 / (t3 - t2)) * congruence(gamma(b, 3, 4, 7), diag2(v.R[2]));
    return out;
}

AffineMat xi_block(const AffineMat& R2, const AffineMat& S) {
    const AffineMat rt = diag2(R2);
    return AffineMat::blocks(rt, S, S.transpose(), rt);
}

// Theta_1(tau) on [lo, hi]; R[2] unused.
AffineMat theta_interval(const SelectorBasis& b, double tau, double lo, double hi, const AffineMat& P,
                         const AffineMat (&Q)[3], const AffineMat& R1, const AffineMat& R2, const AffineMat& S) {
    const Mat pi1 = hstack({b.v(1), lo * b.v(5), (tau - lo) * b.v(6), (hi - tau) * b.v(7)});
    AffineMat out = energy_terms(b, pi1, P, Q);
    const Mat v8 = b.v(8);
    out += lo * outer(v8, R1);
    out += (hi - lo) * outer(v8, R2);
    out -= (1.0 / lo) * congruence(gamma(b, 1, 2, 5), diag2(R1));
    const Mat g23 = hcat(gamma(b, 2, 3, 6), gamma(b, 3, 4, 7));
    out -= (1.0 / (hi - lo)) * congruence(g23, xi_block(R2, S));
    return out;
}

// sym((v1 X + v_k Y) Nt), Nt = n x kn
AffineMat free_weighting(const SelectorBasis& b, const AffineMat& X, const AffineMat& Y, const Mat& Nt) {
    return sym(b.v(1) * X * Nt) + sym(b.v(b.k()) * Y * Nt);
}

MultiVars multi_variables(LmiProblem& p, Index n, int r_count) {
    MultiVars v;
    v.P = p.add_variable("P", 4 * n, 4 * n, Structure::SymmetricPD);
    for (int i = 0; i < 3; ++i) v.Q[i] = p.add_variable("Q" + std::to_string(i + 1), n, n, Structure::SymmetricPD);
    for (int i = 0; i < r_count; ++i) {
        v.R[i] = p.add_variable("R" + std::to_string(i + 1), n, n, Structure::SymmetricPD);
    }
    return v;
}

struct GainSpec {
    std::string gain_name;
    std::string g_name;
    std::vector<std::pair<Index, Mat>> n2;  // blocks of N2^T (m x n each)
    Index m = 0;
};

enum class Frame { Constant, Interval };

// Shared body of the stabilization conditions.
LmiProblem synthesis_problem(std::string kind, Index n, Frame frame, std::vector<double> taus,
                             const std::vector<std::pair<Index, Mat>>& n1_blocks, const std::vector<GainSpec>& gains,
                             double lambda, SynthesisInfo info, double scale) {
    if (!std::isfinite(lambda)) throw Error(ErrorKind::InvalidInput, "lambda must be finite");
    LmiProblem p;
    p.kind = std::move(kind);
    p.delays = taus;
    p.data_scale = scale;
    const SelectorBasis b(n, 8);

    std::vector<std::pair<Index, Mat>> n1 = n1_blocks;
    n1.emplace_back(8, -Mat::Identity(n, n));
    const Mat n1t = b.row(n1, n);
    const Mat w = b.v(1) + lambda * b.v(8);

    AffineMat fw(8 * n, 8 * n);
    std::vector<AffineMat> g_vars;
    std::vector<Mat> n2t;
    for (const auto& g : gains) n2t.push_back(b.row(g.n2, g.m));

    if (frame == Frame::Constant) {
        const MultiVars v = multi_variables(p, n, 3);
        const AffineMat X = p.add_variable("X", n, n, Structure::General);
        fw = sym(w * X * n1t);
        for (size_t i = 0; i < gains.size(); ++i) {
            const AffineMat G = p.add_variable(gains[i].g_name, n, gains[i].m, Structure::General);
            fw += sym(w * G * n2t[i]);
        }
        p.add_constraint("Theta3 + sym((v1 + lambda v8) X N1^T) + sym((v1 + lambda v8) G N2^T) < 0", Sense::Negative,
                         theta_multi(b, taus[0], taus[1], taus[2], v) + fw);
        info.partition = taus;
    } else {
        const double lo = taus[0];
        const double hi = taus[1];
        const MultiVars v = multi_variables(p, n, 2);
        const AffineMat S = p.add_variable("S", 2 * n, 2 * n, Structure::General);
        const AffineMat X = p.add_variable("X", n, n, Structure::General);
        fw = sym(w * X * n1t);
        for (size_t i = 0; i < gains.size(); ++i) {
            const AffineMat G = p.add_variable(gains[i].g_name, n, gains[i].m, Structure::General);
            fw += sym(w * G * n2t[i]);
        }
        for (double tau : {lo, hi}) {
            p.add_constraint("Theta1(" + std::to_string(tau) + ") + free weighting < 0", Sense::Negative,
                             theta_interval(b, tau, lo, hi, v.P, v.Q, v.R[0], v.R[1], S) + fw);
        }
        p.add_constraint("Xi(R2, S) > 0", Sense::Positive, xi_block(v.R[1], S));
        info.interval = std::make_pair(lo, hi);
    }
    info.lambda = lambda;
    for (const auto& g : gains) {
        info.gain_names.push_back(g.gain_name);
        info.g_names.push_back(g.g_name);
    }
    p.synthesis = std::move(info);
    return p;
}

} // namespace

LmiProblem stability_constant(const Mat& N, const Mat& N_tau, double tau) {
    const Index n = square_dim(N, "stability_constant");
    require_shape(N_tau, n, n, "stability_constant: N_tau");
    require_positive(tau, "stability_constant");
    LmiProblem p;
    p.kind = "stability_constant";
    p.delays = {tau};
    p.data_scale = data_scale({&N, &N_tau});
    const SelectorBasis b(n, 4);
    const AffineMat P = p.add_variable("P", 2 * n, 2 * n, Structure::SymmetricPD);
    const AffineMat Q = p.add_variable("Q", n, n, Structure::SymmetricPD);
    const AffineMat R = p.add_variable("R", n, n, Structure::SymmetricPD);
    const AffineMat X = p.add_variable("X", n, n, Structure::General);
    const AffineMat Y = p.add_variable("Y", n, n, Structure::General);

    const Mat pi1 = hcat(b.v(1), tau * b.v(3));
    const Mat pi2 = hcat(b.v(4), b.v(1) - b.v(2));
    const Mat g = hcat(b.v(1) - b.v(2), kSqrt3 * (b.v(1) + b.v(2) - 2.0 * b.v(3)));
    AffineMat theta = sym(pi1 * P * pi2.transpose());
    theta += outer(b.v(1), Q);
    theta -= outer(b.v(2), Q);
    theta += tau * outer(b.v(4), R);
    theta -= (1.0 / tau) * congruence(g, diag2(R));
    const Mat nt = b.row({{1, N}, {2, N_tau}, {4, -Mat::Identity(n, n)}}, n);
    p.add_constraint("Theta + sym((v1 X + v4 Y) N^T) < 0", Sense::Negative, theta + free_weighting(b, X, Y, nt));
    return p;
}

LmiProblem stability_interval(const Mat& N, const Mat& N_tau, double tau_lo, double tau_hi) {
    const Index n = square_dim(N, "stability_interval");
    require_shape(N_tau, n, n, "stability_interval: N_tau");
    require_increasing({tau_lo, tau_hi}, "stability_interval");
    LmiProblem p;
    p.kind = "stability_interval";
    p.delays = {tau_lo, tau_hi};
    p.data_scale = data_scale({&N, &N_tau});
    const SelectorBasis b(n, 8);
    const MultiVars v = multi_variables(p, n, 2);
    const AffineMat X = p.add_variable("X", n, n, Structure::General);
    const AffineMat Y = p.add_variable("Y", n, n, Structure::General);
    const AffineMat S = p.add_variable("S", 2 * n, 2 * n, Structure::General);
    const Mat nt = b.row({{1, N}, {3, N_tau}, {8, -Mat::Identity(n, n)}}, n);
    const AffineMat fw = free_weighting(b, X, Y, nt);
    for (double tau : {tau_lo, tau_hi}) {
        p.add_constraint("Theta1(" + std::to_string(tau) + ") + sym((v1 X + v8 Y) N^T) < 0", Sense::Negative,
                         theta_interval(b, tau, tau_lo, tau_hi, v.P, v.Q, v.R[0], v.R[1], S) + fw);
    }
    p.add_constraint("Xi(R2, S) > 0", Sense::Positive, xi_block(v.R[1], S));
    return p;
}

LmiProblem stability_interval_pd(const Mat& N, const Mat& N_tau, double tau_lo, double tau_hi) {
    const Index n = square_dim(N, "stability_interval_pd");
    require_shape(N_tau, n, n, "stability_interval_pd: N_tau");
    require_increasing({tau_lo, tau_hi}, "stability_interval_pd");
    LmiProblem p;
    p.kind = "stability_interval_pd";
    p.delays = {tau_lo, tau_hi};
    p.data_scale = data_scale({&N, &N_tau});
    const SelectorBasis b(n, 8);

    const AffineMat P11a = p.add_variable("P11_1", 2 * n, 2 * n, Structure::Symmetric);
    const AffineMat P11b = p.add_variable("P11_2", 2 * n, 2 * n, Structure::Symmetric);
    const AffineMat P12 = p.add_variable("P12", 2 * n, 2 * n, Structure::General);
    const AffineMat P22 = p.add_variable("P22", 2 * n, 2 * n, Structure::Symmetric);
    const AffineMat P1 = AffineMat::blocks(P11a, P12, P12.transpose(), P22);
    const AffineMat P2 = AffineMat::blocks(P11b, P12, P12.transpose(), P22);
    p.add_constraint("P1 > 0", Sense::Positive, P1);
    p.add_constraint("P2 > 0", Sense::Positive, P2);

    AffineMat Q[3][2];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            Q[i][j] = p.add_variable("Q" + std::to_string(i + 1) + std::to_string(j + 1), n, n,
                                     Structure::SymmetricPD);
        }
    }
    AffineMat R[2][2];
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            R[i][j] = p.add_variable("R" + std::to_string(i + 1) + std::to_string(j + 1), n, n,
                                     Structure::SymmetricPD);
        }
    }
    const AffineMat S1 = p.add_variable("S1", 2 * n, 2 * n, Structure::General);
    const AffineMat S2 = p.add_variable("S2", 2 * n, 2 * n, Structure::General);
    const AffineMat X1 = p.add_variable("X1", n, n, Structure::General);
    const AffineMat X2 = p.add_variable("X2", n, n, Structure::General);
    const AffineMat Y1 = p.add_variable("Y1", n, n, Structure::General);
    const AffineMat Y2 = p.add_variable("Y2", n, n, Structure::General);

    const Mat nt = b.row({{1, N}, {3, N_tau}, {8, -Mat::Identity(n, n)}}, n);
    for (double tau : {tau_lo, tau_hi}) {
        const double a = tau - tau_lo;
        const double c = tau_hi - tau;
        auto mix = [a, c](const AffineMat& u, const AffineMat& w) { return a * u + c * w; };
        const AffineMat Qt[3] = {mix(Q[0][0], Q[0][1]), mix(Q[1][0], Q[1][1]), mix(Q[2][0], Q[2][1])};
        const AffineMat R1 = mix(R[0][0], R[0][1]);
        const AffineMat R2 = mix(R[1][0], R[1][1]);
        const AffineMat S = mix(S1, S2);
        const std::string at = std::to_string(tau);
        p.add_constraint("Theta2(" + at + ") + sym((v1 X + v8 Y) N^T) < 0", Sense::Negative,
                         theta_interval(b, tau, tau_lo, tau_hi, mix(P1, P2), Qt, R1, R2, S) +
                             free_weighting(b, mix(X1, X2), mix(Y1, Y2), nt));
        p.add_constraint("Xi(R2, S)(" + at + ") > 0", Sense::Positive, xi_block(R2, S));
    }
    return p;
}

LmiProblem stability_multi(const Mat& N, const Mat& N1, const Mat& N2, const Mat& N3, double tau1, double tau2,
                           double tau3) {
    const Index n = square_dim(N, "stability_multi");
    require_shape(N1, n, n, "stability_multi: N1");
    require_shape(N2, n, n, "stability_multi: N2");
    require_shape(N3, n, n, "stability_multi: N3");
    require_increasing({tau1, tau2, tau3}, "stability_multi");
    LmiProblem p;
    p.kind = "stability_multi";
    p.delays = {tau1, tau2, tau3};
    p.data_scale = data_scale({&N, &N1, &N2, &N3});
    const SelectorBasis b(n, 8);
    const MultiVars v = multi_variables(p, n, 3);
    const AffineMat X = p.add_variable("X", n, n, Structure::General);
    const AffineMat Y = p.add_variable("Y", n, n, Structure::General);
    const Mat nt = b.row({{1, N}, {2, N1}, {3, N2}, {4, N3}, {8, -Mat::Identity(n, n)}}, n);
    p.add_constraint("Theta3 + sym((v1 X + v8 Y) N^T) < 0", Sense::Negative,
                     theta_multi(b, tau1, tau2, tau3, v) + free_weighting(b, X, Y, nt));
    return p;
}

LmiProblem stability_partitioned(const Mat& N, const Mat& N_tau, double tau) {
    require_positive(tau, "stability_partitioned");
    const Mat z = Mat::Zero(N.rows(), N.cols());
    LmiProblem p = stability_multi(N, z, z, N_tau, tau / 3.0, 2.0 * tau / 3.0, tau);
    p.kind = "stability_partitioned";
    return p;
}

LmiProblem stability_two_delay(const Mat& N, const Mat& N_tau, const Mat& N_h, double tau, double h) {
    require_increasing({tau, h}, "stability_two_delay");
    const Mat z = Mat::Zero(N.rows(), N.cols());
    LmiProblem p = stability_multi(N, z, N_tau, N_h, tau / 2.0, tau, h);
    p.kind = "stability_two_delay";
    return p;
}

LmiProblem synth_constant(const Mat& N, double tau, double lambda) {
    const Index n = square_dim(N, "synth_constant");
    require_positive(tau, "synth_constant");
    const Mat I = Mat::Identity(n, n);
    SynthesisInfo info;
    info.undelayed = {0.0, N, {}};
    info.delayed = {{tau, Mat::Zero(n, n), {{0, I}}}};
    return synthesis_problem("synth_constant", n, Frame::Constant, {tau / 3.0, 2.0 * tau / 3.0, tau}, {{1, N}},
                             {{"N_tau", "G", {{4, I}}, n}}, lambda, std::move(info), data_scale({&N}));
}

LmiProblem synth_interval(const Mat& N, double tau_lo, double tau_hi, double lambda) {
    const Index n = square_dim(N, "synth_interval");
    require_increasing({tau_lo, tau_hi}, "synth_interval");
    const Mat I = Mat::Identity(n, n);
    SynthesisInfo info;
    info.undelayed = {0.0, N, {}};
    info.delayed = {{tau_hi, Mat::Zero(n, n), {{0, I}}}};
    return synthesis_problem("synth_interval", n, Frame::Interval, {tau_lo, tau_hi}, {{1, N}},
                             {{"N_tau", "G", {{3, I}}, n}}, lambda, std::move(info), data_scale({&N}));
}

namespace {

Index structured_m(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2, const char* what) {
    const Index n = square_dim(N01, what);
    const Index m = Ntau2.rows();
    if (m == 0) throw Error(ErrorKind::Dimension, std::string(what) + ": N_tau2 has no rows");
    require_shape(N02, m, n, what);
    require_shape(Ntau1, n, n, what);
    require_shape(Ntau2, m, n, what);
    return m;
}

} // namespace

LmiProblem synth_structured_constant(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2, double tau,
                                     double lambda) {
    const Index m = structured_m(N01, N02, Ntau1, Ntau2, "synth_structured_constant");
    require_positive(tau, "synth_structured_constant");
    SynthesisInfo info;
    info.undelayed = {0.0, N01, {{0, N02}}};
    info.delayed = {{tau, Ntau1, {{0, Ntau2}}}};
    return synthesis_problem("synth_structured_constant", N01.rows(), Frame::Constant,
                             {tau / 3.0, 2.0 * tau / 3.0, tau}, {{1, N01}, {4, Ntau1}},
                             {{"Z", "G", {{1, N02}, {4, Ntau2}}, m}}, lambda, std::move(info),
                             data_scale({&N01, &N02, &Ntau1, &Ntau2}));
}

LmiProblem synth_structured_interval(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2,
                                     double tau_lo, double tau_hi, double lambda) {
    const Index m = structured_m(N01, N02, Ntau1, Ntau2, "synth_structured_interval");
    require_increasing({tau_lo, tau_hi}, "synth_structured_interval");
    SynthesisInfo info;
    info.undelayed = {0.0, N01, {{0, N02}}};
    info.delayed = {{tau_hi, Ntau1, {{0, Ntau2}}}};
    return synthesis_problem("synth_structured_interval", N01.rows(), Frame::Interval, {tau_lo, tau_hi},
                             {{1, N01}, {3, Ntau1}}, {{"Z", "G", {{1, N02}, {3, Ntau2}}, m}}, lambda,
                             std::move(info), data_scale({&N01, &N02, &Ntau1, &Ntau2}));
}

LmiProblem synth_two_delay(const Mat& N01, const Mat& N02, const Mat& Ntau1, const Mat& Ntau2, const Mat& Nh1,
                           const Mat& Nh2, double tau, double h, double lambda) {
    const Index n = square_dim(N01, "synth_two_delay");
    require_increasing({tau, h}, "synth_two_delay");
    require_shape(Ntau1, n, n, "synth_two_delay: N_tau1");
    require_shape(Nh1, n, n, "synth_two_delay: N_h1");
    if (N02.cols() != n || Ntau2.cols() != n || Nh2.cols() != n || N02.rows() == 0 || Ntau2.rows() == 0 ||
        Nh2.rows() == 0) {
        throw Error(ErrorKind::Dimension, "synth_two_delay: gain factors must be m x n");
    }
    SynthesisInfo info;
    info.undelayed = {0.0, N01, {{0, N02}}};
    info.delayed = {{tau, Ntau1, {{1, Ntau2}}}, {h, Nh1, {{2, Nh2}}}};
    return synthesis_problem("synth_two_delay", n, Frame::Constant, {tau / 2.0, tau, h},
                             {{1, N01}, {3, Ntau1}, {4, Nh1}},
                             {{"Z0", "G0", {{1, N02}}, N02.rows()},
                              {"Z_tau", "G_tau", {{3, Ntau2}}, Ntau2.rows()},
                              {"Z_h", "G_h", {{4, Nh2}}, Nh2.rows()}},
                             lambda, std::move(info), data_scale({&N01, &N02, &Ntau1, &Ntau2, &Nh1, &Nh2}));
}

LmiProblem synth_three_delay(const ThreeDelayBlocks& k, double tau1, double tau2, double tau3, double lambda) {
    const Index n = square_dim(k.N01, "synth_three_delay");
    require_increasing({tau1, tau2, tau3}, "synth_three_delay");
    const Mat* firsts[] = {&k.N11, &k.N21, &k.N31};
    for (const Mat* m : firsts) require_shape(*m, n, n, "synth_three_delay: N_i1");
    const Mat* seconds[] = {&k.N02, &k.N12, &k.N22, &k.N32};
    for (const Mat* m : seconds) {
        if (m->cols() != n || m->rows() == 0) throw Error(ErrorKind::Dimension, "synth_three_delay: N_i2 must be m x n");
    }
    SynthesisInfo info;
    info.undelayed = {0.0, k.N01, {{0, k.N02}}};
    info.delayed = {{tau1, k.N11, {{1, k.N12}}}, {tau2, k.N21, {{2, k.N22}}}, {tau3, k.N31, {{3, k.N32}}}};
    return synthesis_problem("synth_three_delay", n, Frame::Constant, {tau1, tau2, tau3},
                             {{1, k.N01}, {2, k.N11}, {3, k.N21}, {4, k.N31}},
                             {{"Z0", "G0", {{1, k.N02}}, k.N02.rows()},
                              {"Z1", "G1", {{2, k.N12}}, k.N12.rows()},
                              {"Z2", "G2", {{3, k.N22}}, k.N22.rows()},
                              {"Z3", "G3", {{4, k.N32}}, k.N32.rows()}},
                             lambda, std::move(info),
                             data_scale({&k.N01, &k.N02, &k.N11, &k.N12, &k.N21, &k.N22, &k.N31, &k.N32}));
}

std::pair<Mat, std::vector<std::pair<Mat, double>>> closed_loop_matrices(const SynthesisInfo& info,
                                                                         const std::vector<Mat>& gains,
                                                                         std::optional<double> tau_override) {
    auto eval = [&gains](const ClosedLoopTerm& t) {
        Mat m = t.base;
        for (const auto& [g, right] : t.gains) {
            if (g >= static_cast<Index>(gains.size())) throw Error(ErrorKind::Internal, "closed loop: missing gain");
            m += gains[static_cast<size_t>(g)] * right;
        }
        return m;
    };
    std::vector<std::pair<Mat, double>> delayed;
    for (const auto& t : info.delayed) delayed.emplace_back(eval(t), t.delay);
    if (tau_override) {
        if (delayed.size() != 1) throw Error(ErrorKind::Configuration, "closed loop: delay override needs one term");
        delayed.front().second = *tau_override;
    }
    return {eval(info.undelayed), std::move(delayed)};
}

LmiProblem closed_loop_stability_problem(const SynthesisInfo& info, const std::vector<Mat>& gains) {
    const auto [a0, delayed] = closed_loop_matrices(info, gains);
    const Index n = a0.rows();
    if (info.interval) return stability_interval(a0, delayed.front().first, info.interval->first, info.interval->second);
    if (info.partition.size() != 3) throw Error(ErrorKind::Internal, "closed loop: missing partition");
    Mat slot[3] = {Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
    for (const auto& [m, d] : delayed) {
        bool placed = false;
        for (int i = 0; i < 3; ++i) {
            if (std::abs(info.partition[static_cast<size_t>(i)] - d) <= 1e-12 * (1.0 + d)) {
                slot[i] += m;
                placed = true;
            }
        }
        if (!placed) throw Error(ErrorKind::Internal, "closed loop: delay not on the partition");
    }
    return stability_multi(a0, slot[0], slot[1], slot[2], info.partition[0], info.partition[1], info.partition[2]);
}

} // namespace tdc
