#include "tdc_cli/repro.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "tdc/coupled.hpp"
#include "tdc/design.hpp"
#include "tdc/errors.hpp"
#include "tdc/synthesis.hpp"
#include "tdc_cli/examples.hpp"

namespace tdc::cli {

namespace {

constexpr double kSearchTol = 2e-3;
constexpr int kSweepPoints = 12;

struct Run {
    SolverConfig cfg;
    unsigned jobs = 1;
    std::atomic<bool> inconclusive{false};

    Verdict note(Verdict v) {
        if (v.status == Status::Inconclusive) inconclusive = true;
        return v;
    }
    DelayProbe track(DelayProbe p) {
        return [this, p = std::move(p)](double t) { return note(p(t)); };
    }
};

struct Reported {
    bool ok = false;
    std::string measured;
    std::string expected;
};

using CheckFn = std::function<Reported(Run&)>;

struct Check {
    std::string id;
    CheckFn fn;
};

std::string num(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

std::string cnum(Complex z) { return num(z.real()) + (z.imag() < 0 ? " - j" : " + j") + num(std::abs(z.imag())); }

double max_diff(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

std::vector<double> sorted_real_spectrum(const Mat& a) {
    std::vector<double> out;
    for (const Complex& s : eig(a).eigenvalues) out.push_back(s.real());
    std::sort(out.begin(), out.end());
    return out;
}

Reported spectrum_check(const Mat& a, std::vector<double> expected) {
    const std::vector<double> got = sorted_real_spectrum(a);
    std::sort(expected.begin(), expected.end());
    double err = 0.0;
    double imag = 0.0;
    for (const Complex& s : eig(a).eigenvalues) imag = std::max(imag, std::abs(s.imag()));
    for (size_t i = 0; i < expected.size(); ++i) err = std::max(err, std::abs(got[i] - expected[i]));
    std::string g = "{", e = "{";
    for (size_t i = 0; i < got.size(); ++i) {
        g += (i ? ", " : "") + num(got[i], 10);
        e += (i ? ", " : "") + num(expected[i], 1);
    }
    return {got.size() == expected.size() && err <= 1e-9 && imag <= 1e-9, g + "}, err " + sci(err),
            e + "} within 1e-9"};
}

Design pinned_design(const golden::ObserverExample& ex, Run& r) {
    DesignOptions opts;
    opts.R = ex.R;
    opts.pinned = ex.pinned;
    opts.solver = r.cfg;
    DesignAttempt a = design_observer(ex.plant, ex.meas, ex.func, opts);
    if (!a.design) throw Error(ErrorKind::Extraction, "no observer assembled from the published gains");
    return *a.design;
}

Reported xbar_check(const golden::ObserverExample& ex, const Mat& expected, Index rows, double tol, Run& r) {
    const Design d = pinned_design(ex, r);
    const Mat got = d.X_bar.topRows(rows);
    const double err = max_diff(got, expected);
    std::ostringstream g;
    g << "max deviation " << sci(err);
    return {err <= tol, g.str(), "published X_bar within " + sci(tol)};
}

Reported residual_check(const golden::ObserverExample& ex, Run& r) {
    const Design d = pinned_design(ex, r);
    const double res = d.coefficients.residual_norm;
    return {res <= 1e-8, "residual " + sci(res), "<= 1e-8"};
}

Reported printed_residual_check(const golden::ObserverExample& ex) {
    const ErrorCoefficients c = error_coefficients(ex.plant, ex.meas, ex.func, *ex.printed);
    return {c.residual_norm <= 1e-2, "residual " + sci(c.residual_norm), "<= 1e-2 from 4-decimal gains"};
}

Reported printed_observer_check(const golden::ObserverExample& ex, Run& r) {
    const Design d = pinned_design(ex, r);
    const FunctionalObserver& o = d.observer;
    const FunctionalObserver& p = *ex.printed;
    double err = std::max({max_diff(o.M, p.M), max_diff(o.N, p.N), max_diff(o.N_tau, p.N_tau), max_diff(o.G, p.G),
                           max_diff(o.G_tau, p.G_tau), max_diff(o.J, p.J), max_diff(o.J_tau, p.J_tau)});
    if (p.two_delay()) {
        if (!o.two_delay()) return {false, "single-delay observer assembled", "two-delay observer"};
        err = std::max({err, max_diff(*o.N_h, *p.N_h), max_diff(*o.G_h, *p.G_h), max_diff(*o.J_h, *p.J_h)});
    }
    return {err <= 1e-3, "max deviation " + sci(err), "published observer within 1e-3"};
}

bool near_pair(const std::vector<Complex>& roots, Complex target, double tol) {
    auto close = [&](Complex z) {
        return std::any_of(roots.begin(), roots.end(), [&](Complex s) { return std::abs(s - z) <= tol; });
    };
    return close(target) && close(std::conj(target));
}

Reported roots_check(const DdeSystem& sys, Complex expected) {
    const RootReport rep = rightmost_roots(sys);
    const bool ok = near_pair(rep.rightmost, expected, 1e-3) && rep.residual <= 1e-8;
    const Complex top = rep.rightmost.empty() ? Complex{} : rep.rightmost.front();
    return {ok, cnum(std::imag(top) < 0 ? std::conj(top) : top) + ", residual " + sci(rep.residual),
            cnum(expected) + " (and conjugate) within 1e-3, residual <= 1e-8"};
}

/// Nominal tolerance max(0.05, 5%); the check itself fails only when the
/// achieved bound is more than 10% below the published one.
Reported maximum_check(double achieved, double expected, bool capped, const std::string& extra = {}) {
    const double tol = std::max(0.05, 0.05 * expected);
    const bool within = std::abs(achieved - expected) <= tol;
    std::string m = (capped ? ">= " : "") + num(achieved, 3);
    m += within ? " (within nominal tolerance)" : " (outside nominal tolerance +-" + num(tol, 3) + ")";
    if (!extra.empty()) m += ", " + extra;
    return {achieved >= 0.9 * expected, m, num(expected, 3) + ", fail below " + num(0.9 * expected, 3)};
}

std::string abscissa_note(const Verdict& v) {
    return v.closed_loop_abscissa ? "closed-loop abscissa " + num(*v.closed_loop_abscissa) : std::string{};
}

Reported constant_max(Run& r, std::function<LmiProblem(double)> fam, double lo, double hi, double expected) {
    const DelaySweepResult s = max_delay(r.track(analysis_probe(std::move(fam), r.cfg)), lo, hi, kSearchTol);
    return maximum_check(s.certified_max_delay, expected, s.certified_max_delay >= hi - kSearchTol);
}

Reported synth_max(Run& r, std::function<LmiProblem(double, double)> fam, double lo, double hi, double expected) {
    const DelaySweepResult s = max_delay(r.track(synthesis_probe(std::move(fam), r.cfg)), lo, hi, kSearchTol);
    return maximum_check(s.certified_max_delay, expected, s.certified_max_delay >= hi - kSearchTol,
                         abscissa_note(s.best));
}

std::vector<double> grid(double lo, double hi) {
    std::vector<double> g;
    for (int i = 0; i < kSweepPoints; ++i) g.push_back(lo + (hi - lo) * i / (kSweepPoints - 1));
    return g;
}

Reported interval_max(Run& r, std::function<LmiProblem(double)> fam, double lo, double hi, double expected) {
    ProbeFactory make = [&r, fam] { return r.track(analysis_probe(fam, r.cfg)); };
    const DelaySweepResult s = max_delay_sweep(make, grid(lo, hi), kSearchTol, {}, r.jobs);
    return maximum_check(s.certified_max_delay, expected, s.certified_max_delay >= hi - kSearchTol);
}

Reported synth_interval_max(Run& r, std::function<LmiProblem(double, double)> fam, double lo, double hi,
                            double expected) {
    ProbeFactory make = [&r, fam] { return r.track(synthesis_probe(fam, r.cfg)); };
    const DelaySweepResult s = max_delay_sweep(make, grid(lo, hi), kSearchTol, {}, r.jobs);
    return maximum_check(s.certified_max_delay, expected, s.certified_max_delay >= hi - kSearchTol,
                         abscissa_note(s.best));
}

Reported synth_feasible(Run& r, const LambdaFamily& fam, const std::string& expected) {
    const Verdict v = r.note(solve_synthesis(fam, r.cfg));
    std::string m = to_string(v.status);
    if (v.lambda) m += " at lambda " + num(*v.lambda, 3);
    if (v.closed_loop_abscissa) m += ", " + abscissa_note(v);
    return {v.feasible(), m, expected};
}

Reported synthesis_golden(const golden::ObserverExample& ex, Run& r) {
    DesignOptions opts;
    opts.R = ex.R;
    opts.solver = r.cfg;
    const DesignAttempt a = design_observer(ex.plant, ex.meas, ex.func, opts);
    r.note(a.search);
    if (!a.design) return {false, std::string("search ") + to_string(a.search.status), "stable synthesized observer"};
    const Design& d = *a.design;
    const bool ok = a.search.feasible() && d.stable() && d.certificate.feasible();
    return {ok,
            "search " + std::string(to_string(a.search.status)) + ", abscissa " + num(d.roots.abscissa) +
                ", certificate " + to_string(d.certificate.status),
            "feasible search, negative abscissa, certified"};
}

Reported printed_certificate(const golden::PrintedGains& g, Run& r) {
    const SynthesisInfo& info = *g.problem.synthesis;
    const Verdict v = r.note(solve(closed_loop_stability_problem(info, g.gains), r.cfg));
    auto [a0, terms] = closed_loop_matrices(info, g.gains);
    std::vector<DelayTerm> dt;
    for (auto& [m, t] : terms) dt.push_back({m, t});
    const RootReport rep = rightmost_roots(DdeSystem::merged(a0, dt));
    return {v.feasible() && rep.abscissa < 0.0,
            std::string("condition ") + to_string(v.status) + ", abscissa " + num(rep.abscissa),
            "feasible and negative abscissa"};
}

CoupledHistory ones_history(Index n, Index m) {
    return {Vec::Ones(n), Vec::Ones(m), StateHistory::Constant, ObserverHistory::Constant};
}

Reported decoupling_check(Run& r) {
    double worst = 0.0;
    for (const golden::ObserverExample& ex : golden::observer_examples()) {
        const Design d = pinned_design(ex, r);
        const Functional f(d.F_active);
        const CoupledHistory h = ones_history(ex.plant.n(), d.observer.order());
        const double t_end = 10.0;
        const auto a = simulate_coupled(ex.plant, ex.meas, f, d.observer, InputSignal::zero(), h, t_end, 0.01);
        const auto b =
            simulate_coupled(ex.plant, ex.meas, f, d.observer, InputSignal::square(1.0, 2.0), h, t_end, 0.01);
        for (size_t k = 0; k < a.e.size(); ++k) worst = std::max(worst, (a.e[k] - b.e[k]).norm());
    }
    return {worst <= 1e-9, "max |e_zero - e_square| " + sci(worst), "<= 1e-9 for examples 1-7"};
}

Reported example1_simulation(Run& r) {
    const golden::ObserverExample ex = golden::example1();
    const Design d = pinned_design(ex, r);
    const auto tr = simulate_coupled(ex.plant, ex.meas, ex.func, d.observer, InputSignal::step(1.0),
                                     ones_history(2, 2), 20.0, 0.01);
    const double e = tr.e.back().norm();
    return {e <= 1e-3, "|e(20)| = " + sci(e), "<= 1e-3"};
}

Reported zero_error_history(Run& r) {
    const golden::ObserverExample ex = golden::example3();
    const Design d = pinned_design(ex, r);
    CoupledHistory h{Vec::Ones(2), Vec(), StateHistory::FreeResponse, ObserverHistory::ZeroError};
    const auto tr = simulate_coupled(ex.plant, ex.meas, ex.func, d.observer, InputSignal::square(1.0, 3.0), h, 10.0,
                                     0.01);
    const double worst = tr.tail_error_norm(0.0);
    return {worst <= 1e-9, "max |e| " + sci(worst), "<= 1e-9"};
}

Reported example7_augmentation(Run& r) {
    const golden::ObserverExample ex = golden::example7();
    const Design d = pinned_design(ex, r);
    const Mat N_pub = make_mat({{0.2833, -0.4583}, {-0.1667, -0.0833}});
    const double err = max_diff(d.observer.N, N_pub);
    const bool ok = d.case_tag == "case3_augment_then_retry" && d.observer.order() == 2 && err <= 1e-4;
    return {ok, d.case_tag + ", q = " + std::to_string(d.observer.order()) + ", N deviation " + sci(err),
            "case3_augment_then_retry, q = 2, N within 1e-4"};
}

Reported example7_printed_observer(Run& r) {
    const golden::ObserverExample ex = golden::example7();
    const Design d = pinned_design(ex, r);
    const FunctionalObserver& o = d.observer;
    const Mat KM = d.K() * o.M;
    const double err = std::max({std::abs(KM(0, 0) + 0.9670), max_diff(o.G, make_mat({{-0.7630}, {0.2007}})),
                                 max_diff(o.G_tau, make_mat({{0.5327}, {-0.1962}})),
                                 max_diff(o.J, make_mat({{-1.7}, {1}})), max_diff(o.J_tau, Mat::Zero(2, 1))});
    return {err <= 1e-3, "max deviation " + sci(err), "published observer within 1e-3"};
}

Reported example7_separation(Run& r) {
    const golden::ObserverExample ex = golden::example7();
    const Design d = pinned_design(ex, r);
    const ClosedLoopSystems cl = closed_loop_systems(ex.plant, ex.meas, *ex.gain, d.observer, d.K());
    const DdeSystem err_sys = error_system_unchecked(d.observer);
    const Mat Acl = ex.plant.A + ex.plant.B * *ex.gain;
    double worst = 0.0;
    for (Complex s : {Complex(0.3, 0.2), Complex(-0.7, 1.1), Complex(1.5, 0.0), Complex(-0.2, -2.5)}) {
        const Eigen::MatrixXcd sf = s * Eigen::MatrixXcd::Identity(2, 2) - Acl.cast<Complex>();
        const Complex lhs = cl.state_error.characteristic_matrix(s).determinant();
        const Complex rhs = sf.determinant() * err_sys.characteristic_matrix(s).determinant();
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    const double a_cl = rightmost_roots(cl.state_error).abscissa;
    const double a_e = rightmost_roots(err_sys).abscissa;
    const double gap = std::abs(a_cl - std::max(-0.5, a_e));
    return {worst <= 1e-9 && gap <= 1e-6,
            "det factorization error " + sci(worst) + ", abscissa " + num(a_cl) + " vs max(-0.5, " + num(a_e) + ")",
            "closed-loop spectrum = sigma(A+BF) U error spectrum"};
}

Reported example7_closed_loop(Run& r) {
    const golden::ObserverExample ex = golden::example7();
    const Design d = pinned_design(ex, r);
    const auto tr = simulate_closed_loop(ex.plant, ex.meas, *ex.gain, Functional(d.F_active), d.observer, d.K(),
                                         InputSignal::step(1.0), ones_history(2, 2), 40.0, 0.01);
    double max_gap = 0.0, peak = 0.0;
    for (size_t k = 0; k < tr.times.size(); ++k) {
        max_gap = std::max(max_gap, (tr.x[k] - tr.x_state_feedback[k]).norm());
        peak = std::max(peak, tr.x[k].norm());
    }
    const double final_gap = (tr.x.back() - tr.x_state_feedback.back()).norm();
    const bool ok = final_gap <= 1e-3 && max_gap > 10.0 * final_gap && std::isfinite(peak) && peak <= 1e3;
    return {ok, "max gap " + num(max_gap) + ", final gap " + sci(final_gap) + ", peak |x| " + num(peak),
            "transient gap that decays below 1e-3 by t = 40"};
}

Reported eq24a_unstable() {
    const DdeSystem sys(Mat::Constant(1, 1, 0.5), {{Mat::Constant(1, 1, -0.5), 2.0}});
    const RootReport rep = rightmost_roots(sys);
    const bool mori = scalar_mori_test(0.5, -0.5, 2.0);
    return {rep.abscissa >= -1e-9 && !mori, "abscissa " + sci(rep.abscissa) + ", exact test " + (mori ? "pass" : "fail"),
            "abscissa >= 0 (root at s = 0), exact test fails"};
}

Reported eq24b_certified(Run& r) {
    const Mat N = Mat::Constant(1, 1, 0.5), Nt = Mat::Constant(1, 1, -0.8566), Nh = Mat::Constant(1, 1, 0.3509);
    const Verdict v = r.note(solve(stability_two_delay(N, Nt, Nh, 2.3, 3.0), r.cfg));
    const RootReport rep = rightmost_roots(DdeSystem::merged(N, {{Nt, 2.3}, {Nh, 3.0}}));
    return {v.feasible() && rep.abscissa < 0.0,
            std::string("condition ") + to_string(v.status) + ", abscissa " + num(rep.abscissa),
            "feasible and negative abscissa"};
}

Reported mori_bound() {
    const double bound = scalar_mori_delay_bound(0.5);
    const bool below = scalar_mori_test(0.5, -0.5 - 1e-9, 2.0 - 1e-6);
    const bool at = scalar_mori_test(0.5, -0.5, 2.0) || scalar_mori_test(0.5, -0.5 - 1e-9, 2.0);
    const bool design = scalar_mori_test(0.5, -0.7, 1.0);
    return {bound == 2.0 && below && !at && design,
            "bound " + num(bound, 12) + (below ? ", feasible just below" : ", infeasible below") +
                (at ? ", feasible at 2" : ", infeasible at 2"),
            "tau < 2 exactly"};
}

std::vector<Check> catalog() {
    using namespace golden;
    std::vector<Check> c;
    auto add = [&](std::string id, CheckFn fn) { c.push_back({std::move(id), std::move(fn)}); };

    add("example1.spectrum", [](Run&) { return spectrum_check(example1().plant.A, {0.5, -2.4}); });
    add("example1.xbar", [](Run& r) {
        return xbar_check(example1(), make_mat({{0.4359, 0.1745, 0.2181, 0.0869}, {0.1745, 0.0694, 0.0869, 0.0357}}),
                          2, 2e-4, r);
    });
    add("example1.residual", [](Run& r) { return residual_check(example1(), r); });
    add("example1.printed_residual", [](Run&) { return printed_residual_check(example1()); });
    add("example1.printed_observer", [](Run& r) { return printed_observer_check(example1(), r); });
    add("example1.roots", [](Run&) {
        const auto e = example1();
        return roots_check(DdeSystem(e.plant.A, {{*e.pinned.N_tau, 1.0}}), {-0.4725, 0.2865});
    });
    add("example1.simulation", example1_simulation);
    add("example1.synthesis", [](Run& r) { return synthesis_golden(example1(), r); });

    add("example2.residual", [](Run& r) { return residual_check(example2(), r); });
    add("example2.printed_residual", [](Run&) { return printed_residual_check(example2()); });
    add("example2.printed_observer", [](Run& r) { return printed_observer_check(example2(), r); });

    add("example3.spectrum", [](Run&) { return spectrum_check(example3().plant.A, {0.1, 0.5}); });
    add("example3.xbar", [](Run& r) { return xbar_check(example3(), make_mat({{-0.07, 0.7}}), 1, 1e-12, r); });
    add("example3.residual", [](Run& r) { return residual_check(example3(), r); });
    add("example3.printed_residual", [](Run&) { return printed_residual_check(example3()); });
    add("example3.printed_observer", [](Run& r) { return printed_observer_check(example3(), r); });
    add("example3.roots", [](Run&) {
        return roots_check(DdeSystem(Mat::Constant(1, 1, 0.5), {{Mat::Constant(1, 1, -0.7), 1.0}}),
                           {-0.4041, 0.5311});
    });
    add("example3.mori_bound", [](Run&) { return mori_bound(); });
    add("example3.zero_error_history", zero_error_history);

    add("example4.residual", [](Run& r) { return residual_check(example4(), r); });
    add("example4.printed_residual", [](Run&) { return printed_residual_check(example4()); });
    add("example4.printed_observer", [](Run& r) { return printed_observer_check(example4(), r); });
    add("example4.synthesis", [](Run& r) { return synthesis_golden(example4(), r); });

    add("example5.xbar", [](Run& r) {
        return xbar_check(example5(), make_mat({{-0.0857, 0.0351, 0.8566, -0.3509}}), 1, 2e-4, r);
    });
    add("example5.residual", [](Run& r) { return residual_check(example5(), r); });
    add("example5.printed_residual", [](Run&) { return printed_residual_check(example5()); });
    add("example5.printed_observer", [](Run& r) { return printed_observer_check(example5(), r); });
    add("example5.single_delay_unstable", [](Run&) { return eq24a_unstable(); });
    add("example5.two_delay_certified", eq24b_certified);
    add("example5.synthesis", [](Run& r) { return synthesis_golden(example5(), r); });

    add("example6.xbar", [](Run& r) {
        return xbar_check(example6(),
                          make_mat({{-0.1490, 0.0598, 1.0222, -0.1200}, {-2.9902, 0.3296, 1.8944, -0.1795}}), 2,
                          2e-4, r);
    });
    add("example6.residual", [](Run& r) { return residual_check(example6(), r); });
    add("example6.printed_residual", [](Run&) { return printed_residual_check(example6()); });
    add("example6.printed_observer", [](Run& r) { return printed_observer_check(example6(), r); });
    add("example6.synthesis", [](Run& r) { return synthesis_golden(example6(), r); });

    add("example7.state_feedback_spectrum", [](Run&) {
        const auto e = example7();
        return spectrum_check(e.plant.A + e.plant.B * *e.gain, {-0.5, -1.0});
    });
    add("example7.augmentation", example7_augmentation);
    add("example7.residual", [](Run& r) { return residual_check(example7(), r); });
    add("example7.printed_observer", example7_printed_observer);
    add("example7.separation", example7_separation);
    add("example7.closed_loop", example7_closed_loop);
    add("example7.synthesis", [](Run& r) { return synthesis_golden(example7(), r); });

    add("observers.decoupling", decoupling_check);

    const A1Data d = a1();
    add("a1.constant", [d](Run& r) {
        return constant_max(r, [d](double t) { return stability_constant(d.N, d.N_tau, t); }, 1.0, 3.0, 1.54);
    });
    const std::vector<std::pair<double, double>> interval_rows{{0.2, 1.42}, {0.3, 1.55}, {0.5, 1.65}, {0.8, 1.66},
                                                               {1.2, 1.64}};
    const std::vector<std::pair<double, double>> interval_pd_rows{{0.2, 1.62}, {0.3, 1.65}, {0.5, 1.67},
                                                                  {0.8, 1.66}, {1.2, 1.64}};
    for (auto [lo, expected] : interval_rows) {
        add("a1.interval.tau_lo=" + num(lo, 1), [d, lo, expected](Run& r) {
            return interval_max(
                r, [d, lo](double t) { return stability_interval(d.N, d.N_tau, lo, t); }, lo + 0.01, 3.0, expected);
        });
    }
    for (auto [lo, expected] : interval_pd_rows) {
        add("a1.interval_pd.tau_lo=" + num(lo, 1), [d, lo, expected](Run& r) {
            return interval_max(
                r, [d, lo](double t) { return stability_interval_pd(d.N, d.N_tau, lo, t); }, lo + 0.01, 3.0,
                expected);
        });
    }
    add("a2.partitioned", [d](Run& r) {
        return constant_max(r, [d](double t) { return stability_partitioned(d.N, d.N_tau, t); }, 1.0, 3.0, 1.69);
    });
    add("a3.two_delay", [d](Run& r) {
        const Mat Nh = a3_N_h();
        return constant_max(r, [d, Nh](double h) { return stability_two_delay(d.N, d.N_tau, Nh, 1.2, h); }, 1.21,
                            4.0, 1.68);
    });

    const Mat N = a4_N();
    const Mat z13 = Mat::Zero(1, 3), z33 = Mat::Zero(3, 3), n2 = a5_N_tau2();
    add("a4.synth_constant", [N](Run& r) {
        return synth_max(r, [N](double t, double l) { return synth_constant(N, t, l); }, 1.0, 6.0, 4.8);
    });
    add("a4.synth_interval", [N](Run& r) {
        return synth_interval_max(r, [N](double t, double l) { return synth_interval(N, 2.0, t, l); }, 2.01, 6.0,
                                  4.78);
    });
    add("a5.synth_structured", [=](Run& r) {
        return synth_max(
            r, [=](double t, double l) { return synth_structured_constant(N, z13, z33, n2, t, l); }, 1.0, 3.5, 2.2);
    });
    add("a5.synth_structured_interval", [=](Run& r) {
        return synth_interval_max(
            r, [=](double t, double l) { return synth_structured_interval(N, z13, z33, n2, 1.0, t, l); }, 1.01,
            3.5, 2.1);
    });
    add("a6.synth_two_delay", [](Run& r) {
        const Mat two = Mat::Constant(1, 1, 2.0), one = Mat::Ones(1, 1), zero = Mat::Zero(1, 1);
        return synth_max(
            r, [=](double t, double l) { return synth_two_delay(two, zero, zero, one, zero, one, t, 0.8, l); }, 0.3,
            0.79, 0.595);
    });
    add("a6.synth_single_delay", [](Run& r) {
        const Mat two = Mat::Constant(1, 1, 2.0);
        return synth_max(r, [=](double t, double l) { return synth_constant(two, t, l); }, 0.1, 1.0, 0.495);
    });
    add("a7.synth_two_delay", [=](Run& r) {
        return synth_max(
            r, [=](double t, double l) { return synth_two_delay(N, z13, z33, n2, z33, n2, t, 2.7, l); }, 1.0, 2.69,
            2.43);
    });
    add("a8.synth_three_delay", [](Run& r) {
        const ThreeDelayBlocks b = a8_blocks();
        return synth_feasible(
            r, [b](double l) { return synth_three_delay(b, 3.65, 3.7, 3.75, l); }, "feasible at (3.65, 3.7, 3.75)");
    });

    for (const PrintedGains& g : printed_gains()) {
        add(g.id + ".printed_certificate", [g](Run& r) { return printed_certificate(g, r); });
    }
    return c;
}

CheckResult run_one(const Check& check, const SolverConfig& cfg, unsigned jobs) {
    Run run;
    run.cfg = cfg;
    run.jobs = jobs;
    CheckResult res;
    res.id = check.id;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Reported rep = check.fn(run);
        res.measured = rep.measured;
        res.expected = rep.expected;
        res.outcome = rep.ok ? Outcome::Pass : run.inconclusive ? Outcome::Inconclusive : Outcome::Fail;
    } catch (const std::exception& e) {
        res.measured = std::string("error: ") + e.what();
        res.outcome = run.inconclusive ? Outcome::Inconclusive : Outcome::Fail;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

} // namespace

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "PASS";
        case Outcome::Fail: return "FAIL";
        case Outcome::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

std::vector<std::string> repro_check_ids() {
    std::vector<std::string> ids;
    for (const Check& c : catalog()) ids.push_back(c.id);
    return ids;
}

std::vector<CheckResult> run_repro(const ReproSettings& s) {
    std::vector<Check> selected;
    for (Check& c : catalog()) {
        if (c.id.find(s.filter) != std::string::npos) selected.push_back(std::move(c));
    }
    std::vector<CheckResult> results(selected.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(s.jobs, static_cast<unsigned>(selected.size())));
    const unsigned inner_jobs = selected.size() == 1 ? std::max(1u, s.jobs) : 1u;
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < selected.size(); i = next++) results[i] = run_one(selected[i], s.solver, inner_jobs);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return results;
}

int repro_exit_code(const std::vector<CheckResult>& results) {
    bool fail = false, inconclusive = false;
    for (const CheckResult& r : results) {
        fail |= r.outcome == Outcome::Fail;
        inconclusive |= r.outcome == Outcome::Inconclusive;
    }
    return fail ? kNotFound : inconclusive ? kInconclusive : kOk;
}

int cmd_repro(const Options& o, std::ostream& out, std::ostream& err) {
    ReproSettings s;
    if (o.lambda_grid) s.solver.lambda_grid = *o.lambda_grid;
    if (o.max_iterations) s.solver.max_iterations = *o.max_iterations;
    s.filter = o.filter;
    s.jobs = std::max(1u, o.jobs);
    const std::vector<CheckResult> results = run_repro(s);
    if (results.empty()) {
        err << "no check matches filter \"" << o.filter << "\"\n";
        return kValidation;
    }
    size_t width = 0;
    for (const CheckResult& r : results) width = std::max(width, r.id.size());
    int counts[3] = {0, 0, 0};
    json report = json::array();
    for (const CheckResult& r : results) {
        ++counts[static_cast<int>(r.outcome)];
        out << std::left << std::setw(static_cast<int>(width) + 2) << r.id << std::setw(14) << to_string(r.outcome)
            << r.measured << "  [expected " << r.expected << "]  " << std::fixed << std::setprecision(2) << r.seconds
            << "s\n";
        report.push_back({{"id", r.id},
                          {"outcome", to_string(r.outcome)},
                          {"measured", r.measured},
                          {"expected", r.expected},
                          {"seconds", r.seconds}});
    }
    out << results.size() << " checks: " << counts[0] << " passed, " << counts[1] << " failed, " << counts[2]
        << " inconclusive\n";
    if (!o.out.empty()) write_json(o.out, report);
    return repro_exit_code(results);
}

} // namespace tdc::cli
