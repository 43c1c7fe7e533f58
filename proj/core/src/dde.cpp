#include "tdc/dde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tdc/errors.hpp"

namespace tdc {

DdeSystem::DdeSystem(Mat a0, std::vector<DelayTerm> delayed, Forcing forcing)
    : a0_(std::move(a0)), delayed_(std::move(delayed)), forcing_(std::move(forcing)) {
    if (a0_.rows() == 0 || a0_.rows() != a0_.cols()) {
        throw Error(ErrorKind::Dimension, "DdeSystem: A0 must be square and nonempty");
    }
    if (!all_finite(a0_)) throw Error(ErrorKind::InvalidInput, "DdeSystem: non-finite A0");
    double prev = 0.0;
    for (const auto& term : delayed_) {
        if (term.matrix.rows() != a0_.rows() || term.matrix.cols() != a0_.cols()) {
            throw Error(ErrorKind::Dimension, "DdeSystem: delayed matrix dimension mismatch");
        }
        if (!all_finite(term.matrix) || !std::isfinite(term.delay)) {
            throw Error(ErrorKind::InvalidInput, "DdeSystem: non-finite delayed term");
        }
        if (!(term.delay > prev)) {
            throw Error(ErrorKind::Ordering, "DdeSystem: delays must be positive and strictly increasing");
        }
        prev = term.delay;
    }
}

DdeSystem DdeSystem::merged(Mat a0, std::vector<DelayTerm> terms, Forcing forcing) {
    std::sort(terms.begin(), terms.end(), [](const DelayTerm& a, const DelayTerm& b) { return a.delay < b.delay; });
    std::vector<DelayTerm> out;
    for (auto& term : terms) {
        if (!out.empty() && std::abs(out.back().delay - term.delay) <= 1e-12 * std::max(1.0, term.delay)) {
            out.back().matrix += term.matrix;
        } else {
            out.push_back(std::move(term));
        }
    }
    std::erase_if(out, [](const DelayTerm& t) { return t.matrix.size() > 0 && t.matrix.isZero(0.0); });
    return DdeSystem(std::move(a0), std::move(out), std::move(forcing));
}

double DdeSystem::max_delay() const { return delayed_.empty() ? 0.0 : delayed_.back().delay; }

double DdeSystem::min_delay() const { return delayed_.empty() ? 0.0 : delayed_.front().delay; }

Eigen::MatrixXcd DdeSystem::characteristic_matrix(Complex s) const {
    const Index n = dim();
    Eigen::MatrixXcd delta = s * Eigen::MatrixXcd::Identity(n, n) - a0_.cast<Complex>();
    for (const auto& term : delayed_) delta -= std::exp(-s * term.delay) * term.matrix.cast<Complex>();
    return delta;
}

History constant_history(const Vec& value) {
    return [value](double) { return value; };
}

double Trajectory::sup_norm(double t0, double t1) const {
    double best = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t0 - 1e-12 && times[k] <= t1 + 1e-12) best = std::max(best, states[k].norm());
    }
    return best;
}

namespace {

Vec hermite(const Vec& x0, const Vec& d0, const Vec& x1, const Vec& d1, double h, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * x0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * x1 +
           (u3 - u2) * h * d1;
}

} // namespace

Vec Trajectory::interpolate(double t) const {
    if (states.empty()) throw Error(ErrorKind::InvalidInput, "Trajectory::interpolate: empty trajectory");
    if (states.size() == 1 || t <= 0.0) return states.front();
    const double last = static_cast<double>(states.size() - 1);
    const double k = std::clamp(std::floor(t / step), 0.0, last - 1.0);
    const auto i = static_cast<size_t>(k);
    const double u = std::clamp((t - k * step) / step, 0.0, 1.0);
    return hermite(states[i], derivatives[i], states[i + 1], derivatives[i + 1], step, u);
}

// ---------------------------------------------------------------------------
// Method of steps

namespace {

class DenseSolution {
public:
    DenseSolution(const History& history, double step) : history_(history), step_(step) {}

    void push(Vec x, Vec dx) {
        states_.push_back(std::move(x));
        slopes_.push_back(std::move(dx));
    }

    [[nodiscard]] std::vector<Vec> take_slopes() { return std::move(slopes_); }
    [[nodiscard]] const Vec& node(size_t i) const { return states_[i]; }

    [[nodiscard]] Vec at(double s) const {
        if (s <= 0.0) return history_(s);
        const auto last = static_cast<double>(states_.size() - 1);
        double k = std::floor(s / step_);
        k = std::clamp(k, 0.0, std::max(0.0, last - 1.0));
        const auto i = static_cast<size_t>(k);
        if (i + 1 >= states_.size()) return states_.back();
        const double u = (s - k * step_) / step_;
        return hermite(states_[i], slopes_[i], states_[i + 1], slopes_[i + 1], step_, u);
    }


private:
    const History& history_;
    double step_;
    std::vector<Vec> states_;
    std::vector<Vec> slopes_;
};

} // namespace

Trajectory simulate(const DdeSystem& sys, const History& history, double t_end, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::Configuration, "simulate: step must be positive");
    if (!(t_end >= 0.0)) throw Error(ErrorKind::Configuration, "simulate: t_end must be nonnegative");
    if (!sys.delayed().empty() && step > sys.min_delay() / 4.0 + 1e-15) {
        throw Error(ErrorKind::Configuration, "simulate: step " + std::to_string(step) +
                                                  " exceeds min delay / 4 = " + std::to_string(sys.min_delay() / 4.0));
    }
    const Index n = sys.dim();
    Vec x0 = history(0.0);
    if (x0.size() != n) throw Error(ErrorKind::Dimension, "simulate: history dimension mismatch");

    DenseSolution sol(history, step);

    // When every delay is a whole number of steps, delayed values at the RK4
    // stages are read from the stored stages of the earlier step. The scheme is
    // then RK4 on the method-of-steps system, so linear invariants such as the
    // observer decoupling survive discretization.
    std::vector<long> lags;
    for (const auto& term : sys.delayed()) {
        const double ratio = term.delay / step;
        const double whole = std::round(ratio);
        if (std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio)) {
            lags.clear();
            break;
        }
        lags.push_back(static_cast<long>(whole));
    }
    const bool aligned = !sys.delayed().empty() && lags.size() == sys.delayed().size();
    std::vector<Vec> stage2, stage3, stage4;  // per step: x + h/2 k1, x + h/2 k2, x + h k3

    // stage: 0 = start node, 1 and 2 = midpoint stages, 3 = end stage
    auto delayed_value = [&](size_t k, int stage, size_t term) -> Vec {
        const double t = (static_cast<double>(k) + (stage == 3 ? 1.0 : stage == 0 ? 0.0 : 0.5)) * step;
        if (!aligned) return sol.at(t - sys.delayed()[term].delay);
        const long j = static_cast<long>(k) - lags[term];
        if (stage == 0) return j >= 0 ? sol.node(static_cast<size_t>(j)) : history(static_cast<double>(j) * step);
        if (j < 0) return history((static_cast<double>(j) + (stage == 3 ? 1.0 : 0.5)) * step);
        const auto i = static_cast<size_t>(j);
        return stage == 1 ? stage2[i] : stage == 2 ? stage3[i] : stage4[i];
    };
    auto rhs = [&](size_t k, int stage, const Vec& x) {
        Vec dx = sys.a0() * x;
        for (size_t i = 0; i < sys.delayed().size(); ++i) {
            dx.noalias() += sys.delayed()[i].matrix * delayed_value(k, stage, i);
        }
        if (sys.has_forcing()) {
            const double c = stage == 3 ? 1.0 : stage == 0 ? 0.0 : 0.5;
            dx += sys.forcing()((static_cast<double>(k) + c) * step);
        }
        return dx;
    };

    const auto steps = static_cast<size_t>(std::ceil(t_end / step - 1e-9));
    Trajectory traj;
    traj.step = step;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);

    Vec x = x0;
    sol.push(x, rhs(0, 0, x));
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (size_t k = 0; k < steps; ++k) {
        const Vec k1 = rhs(k, 0, x);
        Vec y2 = x + 0.5 * step * k1;
        const Vec k2 = rhs(k, 1, y2);
        Vec y3 = x + 0.5 * step * k2;
        const Vec k3 = rhs(k, 2, y3);
        Vec y4 = x + step * k3;
        const Vec k4 = rhs(k, 3, y4);
        if (aligned) {
            stage2.push_back(std::move(y2));
            stage3.push_back(std::move(y3));
            stage4.push_back(std::move(y4));
        }
        x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) throw Error(ErrorKind::Internal, "simulate: solution overflowed");
        const double t1 = static_cast<double>(k + 1) * step;
        sol.push(x, rhs(k + 1, 0, x));
        traj.times.push_back(t1);
        traj.states.push_back(x);
    }
    traj.derivatives = sol.take_slopes();
    return traj;
}

// ---------------------------------------------------------------------------
// Characteristic roots

namespace {

struct ChebyshevGrid {
    Vec nodes;  // x_j = cos(pi j / N), j = 0..N
    Mat diff;   // differentiation matrix on [-1, 1]
};

ChebyshevGrid chebyshev(int intervals) {
    const int n = intervals;
    ChebyshevGrid g;
    g.nodes.resize(n + 1);
    for (int j = 0; j <= n; ++j) g.nodes(j) = std::cos(std::numbers::pi * j / n);
    Vec c(n + 1);
    for (int j = 0; j <= n; ++j) c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2 == 0) ? 1.0 : -1.0);
    g.diff = Mat::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            g.diff(i, j) = (c(i) / c(j)) / (g.nodes(i) - g.nodes(j));
            row_sum += g.diff(i, j);
        }
        g.diff(i, i) = -row_sum;
    }
    return g;
}

// Barycentric Lagrange weights of the Chebyshev points evaluated at x.
Vec lagrange_row(const Vec& nodes, double x) {
    const Index n = nodes.size() - 1;
    Vec out = Vec::Zero(n + 1);
    for (Index j = 0; j <= n; ++j) {
        if (std::abs(x - nodes(j)) < 1e-14) {
            out(j) = 1.0;
            return out;
        }
    }
    double denom = 0.0;
    for (Index j = 0; j <= n; ++j) {
        const double w = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
        out(j) = w / (x - nodes(j));
        denom += out(j);
    }
    return out / denom;
}

double det_residual(const DdeSystem& sys, Complex s) {
    return std::abs(sys.characteristic_matrix(s).determinant());
}

} // namespace

std::vector<Complex> collocation_eigenvalues(const DdeSystem& sys, int grid) {
    const Index n = sys.dim();
    if (sys.delayed().empty()) return eig(sys.a0()).eigenvalues;
    const double tau_max = sys.max_delay();
    const auto g = chebyshev(grid);
    const Index size = (grid + 1) * n;
    Mat gen = Mat::Zero(size, size);
    gen.block(0, 0, n, n) = sys.a0();
    for (const auto& term : sys.delayed()) {
        const Vec l = lagrange_row(g.nodes, 1.0 - 2.0 * term.delay / tau_max);
        for (Index j = 0; j <= grid; ++j) {
            if (l(j) != 0.0) gen.block(0, j * n, n, n) += l(j) * term.matrix;
        }
    }
    const double scale = 2.0 / tau_max;
    for (Index i = 1; i <= grid; ++i) {
        for (Index j = 0; j <= grid; ++j) {
            const double d = scale * g.diff(i, j);
            for (Index k = 0; k < n; ++k) gen(i * n + k, j * n + k) = d;
        }
    }
    return eig(gen).eigenvalues;
}

bool refine_root(const DdeSystem& sys, Complex& root, double* residual) {
    const Index n = sys.dim();
    Complex s = root;
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const Eigen::MatrixXcd delta = sys.characteristic_matrix(s);
        Eigen::MatrixXcd ddelta = Eigen::MatrixXcd::Identity(n, n);
        for (const auto& term : sys.delayed()) {
            ddelta += term.delay * std::exp(-s * term.delay) * term.matrix.cast<Complex>();
        }
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(delta);
        if (std::abs(lu.determinant()) == 0.0) {
            converged = true;
            break;
        }
        const Complex tr = lu.solve(ddelta).trace();
        if (tr == Complex(0.0, 0.0) || !std::isfinite(tr.real()) || !std::isfinite(tr.imag())) break;
        const Complex delta_s = 1.0 / tr;
        s -= delta_s;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s - root) > 1.0 + 10.0 * std::abs(root)) {
            break;
        }
        if (std::abs(delta_s) <= 1e-14 * (1.0 + std::abs(s))) {
            converged = true;
            break;
        }
    }
    const double res = std::isfinite(s.real()) ? det_residual(sys, s) : std::numeric_limits<double>::infinity();
    if (residual) *residual = res;
    if (converged || res <= 1e-10) {
        root = s;
        return true;
    }
    return false;
}

namespace {

struct RefinedSet {
    std::vector<Complex> roots;
    bool all_refined = true;
};

RefinedSet refine_candidates(const DdeSystem& sys, std::vector<Complex> eigs) {
    std::sort(eigs.begin(), eigs.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
    RefinedSet out;
    const size_t take = std::min<size_t>(eigs.size(), 12);
    for (size_t i = 0; i < take; ++i) {
        Complex z = eigs[i];
        if (!refine_root(sys, z)) {
            out.all_refined = out.all_refined && i > 1;  // only the leading candidates matter
            if (i <= 1) z = eigs[i];
            else continue;
        }
        const bool dup = std::any_of(out.roots.begin(), out.roots.end(),
                                     [&](Complex w) { return std::abs(w - z) <= 1e-8 * (1.0 + std::abs(z)); });
        if (!dup) out.roots.push_back(z);
    }
    std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return out;
}

} // namespace

RootReport rightmost_roots(const DdeSystem& sys, int grid) {
    if (grid < 8) throw Error(ErrorKind::Configuration, "rightmost_roots: grid must be at least 8");
    RootReport report;
    if (sys.delayed().empty()) {
        auto spec = eig(sys.a0()).eigenvalues;
        std::sort(spec.begin(), spec.end(), [](Complex a, Complex b) { return a.real() > b.real(); });
        report.candidates = spec;
        report.discretization_size = 0;
    } else {
        constexpr int kMaxGrid = 384;
        RefinedSet prev = refine_candidates(sys, collocation_eigenvalues(sys, grid));
        int n = grid;
        while (true) {
            const int next = 2 * n;
            if (next > kMaxGrid || static_cast<Index>(next + 1) * sys.dim() > 1600) break;
            RefinedSet cur = refine_candidates(sys, collocation_eigenvalues(sys, next));
            const bool settled = !cur.roots.empty() && !prev.roots.empty() &&
                                 std::abs(cur.roots.front().real() - prev.roots.front().real()) < 1e-6 &&
                                 std::abs(std::abs(cur.roots.front().imag()) - std::abs(prev.roots.front().imag())) <
                                     1e-6;
            prev = std::move(cur);
            n = next;
            if (settled) break;
        }
        report.candidates = prev.roots;
        report.refined = prev.all_refined;
        report.discretization_size = n;
    }
    if (report.candidates.empty()) throw Error(ErrorKind::Internal, "rightmost_roots: no candidates");
    report.abscissa = report.candidates.front().real();
    for (const auto& z : report.candidates) {
        if (z.real() >= report.abscissa - 1e-9 * (1.0 + std::abs(report.abscissa))) {
            report.rightmost.push_back(z);
            report.residual = std::max(report.residual, det_residual(sys, z));
        }
    }
    return report;
}

bool scalar_mori_test(double a, double b, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorKind::Configuration, "scalar_mori_test: tau must be positive");
    return a + b < 0.0 && b >= -1.0 / tau;
}

double scalar_mori_delay_bound(double a) {
    return a > 0.0 ? 1.0 / a : std::numeric_limits<double>::infinity();
}

} // namespace tdc
