#include "tdc_cli/queries.hpp"

#include <algorithm>

#include "tdc/errors.hpp"
#include "tdc/synthesis.hpp"

namespace tdc::cli {

namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorKind::Configuration, what); }

const Mat& need(const std::optional<Mat>& m, const char* name, const std::string& condition) {
    if (!m) usage(condition + " needs error_system." + name);
    return *m;
}

double need(const std::optional<double>& v, const char* name, const std::string& condition) {
    if (!v) usage(condition + " needs error_system." + name);
    return *v;
}

} // namespace

const std::vector<std::string>& condition_ids() {
    static const std::vector<std::string> ids{"constant",         "partitioned",      "interval",
                                              "interval-pd",      "two-delay",        "synth-constant",
                                              "synth-interval",   "synth-structured", "synth-structured-interval",
                                              "synth-two-delay",  "synth-three-delay"};
    return ids;
}

DelayQuery make_query(const std::string& c, const ErrorSystemSpec& s, const std::string& sweep) {
    DelayQuery q;
    q.condition = c;
    q.swept = "tau";
    const Mat N = s.N;
    const Index n = N.rows();
    if (c == "constant" || c == "partitioned") {
        const Mat Nt = need(s.N_tau, "N_tau", c);
        q.analysis = c == "constant" ? std::function<LmiProblem(double)>(
                                           [=](double t) { return stability_constant(N, Nt, t); })
                                     : [=](double t) { return stability_partitioned(N, Nt, t); };
    } else if (c == "interval" || c == "interval-pd") {
        const Mat Nt = need(s.N_tau, "N_tau", c);
        const double lo = need(s.tau_lo, "tau_lo", c);
        q.interval = true;
        q.swept = "tau_hi";
        q.default_lo = lo + 0.01;
        q.analysis = c == "interval" ? std::function<LmiProblem(double)>(
                                           [=](double t) { return stability_interval(N, Nt, lo, t); })
                                     : [=](double t) { return stability_interval_pd(N, Nt, lo, t); };
    } else if (c == "two-delay") {
        const Mat Nt = need(s.N_tau, "N_tau", c);
        const Mat Nh = need(s.N_h, "N_h", c);
        q.swept = sweep.empty() ? "h" : sweep;
        if (q.swept == "h") {
            const double tau = need(s.tau, "tau", c);
            q.default_lo = tau + 0.01;
            q.analysis = [=](double h) { return stability_two_delay(N, Nt, Nh, tau, h); };
        } else {
            const double h = need(s.h, "h", c);
            q.default_hi = h - 1e-3;
            q.analysis = [=](double t) { return stability_two_delay(N, Nt, Nh, t, h); };
        }
    } else if (c == "synth-constant") {
        q.synthesis = true;
        q.synth = [=](double t, double l) { return synth_constant(N, t, l); };
    } else if (c == "synth-interval") {
        const double lo = need(s.tau_lo, "tau_lo", c);
        q.synthesis = q.interval = true;
        q.swept = "tau_hi";
        q.default_lo = lo + 0.01;
        q.synth = [=](double t, double l) { return synth_interval(N, lo, t, l); };
    } else if (c == "synth-structured" || c == "synth-structured-interval") {
        const Mat Nt2 = need(s.N_tau2, "N_tau2", c);
        const Mat N02 = s.N02.value_or(Mat::Zero(Nt2.rows(), n));
        const Mat Nt1 = s.N_tau1.value_or(Mat::Zero(n, n));
        q.synthesis = true;
        if (c == "synth-structured") {
            q.synth = [=](double t, double l) { return synth_structured_constant(N, N02, Nt1, Nt2, t, l); };
        } else {
            const double lo = need(s.tau_lo, "tau_lo", c);
            q.interval = true;
            q.swept = "tau_hi";
            q.default_lo = lo + 0.01;
            q.synth = [=](double t, double l) { return synth_structured_interval(N, N02, Nt1, Nt2, lo, t, l); };
        }
    } else if (c == "synth-two-delay") {
        const Mat Nt2 = need(s.N_tau2, "N_tau2", c);
        const Mat Nh2 = need(s.N_h2, "N_h2", c);
        const Mat N02 = s.N02.value_or(Mat::Zero(Nt2.rows(), n));
        const Mat Nt1 = s.N_tau1.value_or(Mat::Zero(n, n));
        const Mat Nh1 = s.N_h1.value_or(Mat::Zero(n, n));
        q.synthesis = true;
        q.swept = sweep.empty() ? "tau" : sweep;
        if (q.swept == "tau") {
            const double h = need(s.h, "h", c);
            q.default_hi = h - 1e-3;
            q.synth = [=](double t, double l) { return synth_two_delay(N, N02, Nt1, Nt2, Nh1, Nh2, t, h, l); };
        } else {
            const double tau = need(s.tau, "tau", c);
            q.default_lo = tau + 0.01;
            q.synth = [=](double h, double l) { return synth_two_delay(N, N02, Nt1, Nt2, Nh1, Nh2, tau, h, l); };
        }
    } else if (c == "synth-three-delay") {
        if (!s.three) usage(c + " needs error_system.three_delay");
        if (s.taus.size() < 2) usage(c + " needs error_system.taus (tau1, tau2[, tau3])");
        const ThreeDelayBlocks b = *s.three;
        const double t1 = s.taus[0], t2 = s.taus[1];
        q.synthesis = true;
        q.swept = "tau3";
        q.default_lo = t2 + 0.01;
        q.synth = [=](double t3, double l) { return synth_three_delay(b, t1, t2, t3, l); };
    } else {
        usage("unknown condition \"" + c + "\"");
    }
    if (q.swept != "tau" && q.swept != "tau_hi" && q.swept != "h" && q.swept != "tau3") {
        usage("--sweep must be tau or h");
    }
    return q;
}

ErrorSystemSpec error_system_for(const Problem& p) {
    if (p.error_system) return *p.error_system;
    if (!p.has_observer_data()) usage("problem has neither an error_system nor observer data");
    const Plant& plant = *p.plant;
    const MeasurementModel& meas = *p.measurement;
    const SynthesisPlan plan = plan_synthesis(plant, meas, *p.functional, p.design.R, p.design.rank_tol);
    ErrorSystemSpec s;
    s.N = plan.N;
    const Index m = plan.N.rows();
    s.tau = meas.tau();
    s.tau_lo = p.design.tau_lo;
    s.N_tau = p.design.pinned.N_tau;
    s.N_h = p.design.pinned.N_h;
    if (meas.is_two_delay()) {
        s.h = meas.as_two_delay().h;
        s.N02 = Mat::Zero(m, m);
        s.N_tau1 = s.N_h1 = Mat::Zero(m, m);
        s.N_tau2 = s.N_h2 = Mat::Identity(m, m);
    } else if (plan.case_tag == SynthesisCase::Structured) {
        s.N02 = Mat::Zero(plan.reduced->N_bar.rows(), m);
        s.N_tau1 = Mat::Zero(m, m);
        s.N_tau2 = plan.reduced->N_bar;
    }
    return s;
}

DelaySweepResult run_query(const DelayQuery& q, double lo, double hi, double tol, const SolverConfig& cfg,
                           unsigned jobs) {
    const std::string label = q.condition + " over " + q.swept;
    ProbeFactory make = q.synthesis ? ProbeFactory([&] { return synthesis_probe(q.synth, cfg); })
                                    : ProbeFactory([&] { return analysis_probe(q.analysis, cfg); });
    if (!q.interval) return max_delay(make(), lo, hi, tol, label);
    constexpr int points = 12;
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
    return max_delay_sweep(make, grid, tol, label, jobs);
}

} // namespace tdc::cli
