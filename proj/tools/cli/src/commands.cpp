#include "tdc_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "tdc/coupled.hpp"
#include "tdc/design.hpp"
#include "tdc/errors.hpp"
#include "tdc/synthesis.hpp"
#include "tdc_cli/queries.hpp"

namespace tdc::cli {

namespace {

int exit_for(Status s) {
    switch (s) {
        case Status::Feasible: return kOk;
        case Status::NotFound: return kNotFound;
        case Status::Inconclusive: return kInconclusive;
    }
    return kInternal;
}

void emit(const json& j, const Options& o, std::ostream& out) {
    if (o.out.empty()) {
        out << j.dump(2) << '\n';
    } else {
        write_json(o.out, j);
        out << "wrote " << o.out.string() << '\n';
    }
}

Problem load_with_observer_data(const std::filesystem::path& path) {
    Problem p = load_problem(path);
    if (!p.has_observer_data()) {
        throw Error(ErrorKind::InvalidInput, path.string() + ": plant, measurement and functional are required");
    }
    return p;
}

/// Observer to simulate: read back from a report or designed on the spot.
struct ObserverSource {
    FunctionalObserver observer;
    Mat F;  // functional the observer estimates (F_bar when augmented)
    Mat K;
    std::optional<Design> design;
};

ObserverSource observer_source(const Problem& p, const Options& o, const SolverConfig& cfg) {
    if (o.observer_report) {
        const json report = read_json(*o.observer_report);
        const json& d = report.contains("design") ? report.at("design") : report;
        ObserverSource src{observer_from_json(d.at("observer")), mat_from_json(d.at("F"), "report.F"), {}, {}};
        src.K = d.contains("augmentation") ? mat_from_json(d.at("augmentation").at("K"), "report.K")
                                           : Mat(Mat::Identity(src.F.rows(), src.F.rows()));
        return src;
    }
    DesignOptions opts = p.design;
    opts.solver = cfg;
    DesignAttempt a = design_observer(*p.plant, *p.measurement, *p.functional, opts);
    if (!a.design) {
        throw Error(ErrorKind::Extraction, "no observer could be designed: " + a.search.detail);
    }
    ObserverSource src{a.design->observer, a.design->F_active, a.design->K(), a.design};
    return src;
}

CoupledHistory default_history(const Problem& p, Index m) {
    if (p.simulation.history_given) {
        CoupledHistory h = p.simulation.history;
        if (h.w0.size() == 0) h.w0 = Vec::Ones(m);
        return h;
    }
    return {Vec::Ones(p.plant->n()), Vec::Ones(m), StateHistory::Constant, ObserverHistory::Constant};
}

std::filesystem::path default_out(const Options& o, const Problem& p, const std::string& suffix) {
    return o.out.empty() ? std::filesystem::path(p.name + suffix) : o.out;
}

void append(std::vector<double>& row, const Vec& v) {
    for (Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

void name_columns(std::vector<std::string>& header, const std::string& stem, Index count) {
    for (Index i = 1; i <= count; ++i) header.push_back(stem + std::to_string(i));
}

} // namespace

SolverConfig solver_config(const Problem& p, const Options& o) {
    SolverConfig cfg = p.design.solver;
    if (o.lambda_grid) cfg.lambda_grid = *o.lambda_grid;
    if (o.max_iterations) cfg.max_iterations = *o.max_iterations;
    return cfg;
}

void write_table(const std::filesystem::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    std::ofstream c(csv);
    std::filesystem::path dat = csv;
    dat.replace_extension(".dat");
    std::ofstream d(dat);
    if (!c || !d) throw Error(ErrorKind::Configuration, "cannot write " + csv.string());
    c << std::setprecision(17);
    d << std::setprecision(17) << '#';
    for (size_t i = 0; i < header.size(); ++i) {
        c << (i ? "," : "") << header[i];
        d << ' ' << header[i];
    }
    c << '\n';
    d << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            c << (i ? "," : "") << row[i];
            d << (i ? " " : "") << row[i];
        }
        c << '\n';
        d << '\n';
    }
}

int cmd_synthesize(const std::filesystem::path& path, const Options& o, std::ostream& out, std::ostream& err) {
    const Problem p = load_with_observer_data(path);
    DesignOptions opts = p.design;
    opts.solver = solver_config(p, o);
    if (o.tol) opts.rank_tol = *o.tol;
    const DesignAttempt a = design_observer(*p.plant, *p.measurement, *p.functional, opts);
    json report{{"problem", p.name}};
    if (!a.design) {
        report["search"] = verdict_to_json(a.search);
        emit(report, o, out);
        err << "no stabilizing delayed gains found (" << to_string(a.search.status) << "): " << a.search.detail
            << '\n';
        return exit_for(a.search.status);
    }
    report["design"] = design_to_json(*a.design);
    emit(report, o, out);
    for (const auto& w : a.design->warnings) err << "warning: " << w << '\n';
    if (!a.design->stable()) {
        err << "error system is not stable: rightmost root abscissa " << a.design->roots.abscissa << '\n';
        return kNotFound;
    }
    return kOk;
}

int cmd_max_delay(const std::filesystem::path& path, const Options& o, std::ostream& out, std::ostream& err) {
    const Problem p = load_problem(path);
    const ErrorSystemSpec spec = error_system_for(p);
    const SolverConfig cfg = solver_config(p, o);
    const double tol = o.tol.value_or(0.005);
    if (!(tol > 0.0)) throw Error(ErrorKind::Configuration, "--tol must be positive");
    json report{{"problem", p.name}, {"condition", o.condition}};
    if (o.condition == "scalar") {
        if (spec.N.size() != 1) throw Error(ErrorKind::Configuration, "scalar condition needs a 1x1 N");
        const double bound = scalar_mori_delay_bound(spec.N(0, 0));
        report["bound"] = std::isfinite(bound) ? json(bound) : json("unbounded");
        report["certificate"] = "analytic: a + b < 0 and b >= -1/tau admit some b iff tau < 1/a";
        emit(report, o, out);
        return kOk;
    }
    if (o.condition.empty()) throw Error(ErrorKind::Configuration, "max-delay needs --condition");
    const DelayQuery q = make_query(o.condition, spec, o.sweep);
    const double lo = o.range ? o.range->first : q.default_lo;
    const double hi = o.range ? o.range->second : q.default_hi;
    const DelaySweepResult r = run_query(q, lo, hi, tol, cfg, o.jobs);
    report["sweeps"] = json::array({sweep_to_json(r)});
    emit(report, o, out);
    err << q.swept << " max = " << r.certified_max_delay << (r.inconclusive_seen ? " (inconclusive probes seen)" : "")
        << '\n';
    return kOk;
}

int cmd_simulate(const std::filesystem::path& path, const Options& o, std::ostream& out, std::ostream& err) {
    const Problem p = load_with_observer_data(path);
    const SolverConfig cfg = solver_config(p, o);
    const ObserverSource src = observer_source(p, o, cfg);
    const double step = o.step.value_or(p.simulation.step);
    const double t_end = o.t_end.value_or(p.simulation.t_end);
    if (!(step > 0.0) || !(t_end > step)) throw Error(ErrorKind::Configuration, "invalid --step / --t-end");
    const Functional func(src.F);
    if (!theorem_conditions_hold(error_coefficients(*p.plant, *p.measurement, func, src.observer), 1e-6)) {
        throw Error(ErrorKind::Inconsistent, "observer violates the decoupling conditions; refusing to simulate");
    }
    const CoupledHistory hist = default_history(p, src.observer.order());
    const CoupledTrajectory tr =
        simulate_coupled(*p.plant, *p.measurement, func, src.observer, p.simulation.input, hist, t_end, step);

    std::vector<std::string> header{"t"};
    name_columns(header, "x", p.plant->n());
    name_columns(header, "zhat", src.observer.order());
    name_columns(header, "y", p.measurement->p());
    name_columns(header, "e", src.observer.order());
    std::vector<std::vector<double>> rows;
    rows.reserve(tr.times.size());
    for (size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<double> row{tr.times[k]};
        append(row, tr.x[k]);
        append(row, tr.z_hat[k]);
        append(row, tr.y[k]);
        append(row, tr.e[k]);
        rows.push_back(std::move(row));
    }
    const auto csv = default_out(o, p, "_trajectory.csv");
    write_table(csv, header, rows);
    json summary{{"problem", p.name},
                 {"csv", csv.string()},
                 {"samples", tr.times.size()},
                 {"t_end", tr.times.back()},
                 {"step", step},
                 {"input", to_string(p.simulation.input.kind)},
                 {"final_error_norm", tr.e.back().norm()},
                 {"tail_error_norm", tr.tail_error_norm(0.9 * tr.times.back())}};
    out << summary.dump(2) << '\n';
    (void)err;
    return kOk;
}

int cmd_closed_loop(const std::filesystem::path& path, const Options& o, std::ostream& out, std::ostream& err) {
    const Problem p = load_with_observer_data(path);
    if (p.measurement->is_two_delay()) {
        throw Error(ErrorKind::Unsupported, "closed-loop mode needs a single-delay measurement");
    }
    const SolverConfig cfg = solver_config(p, o);
    const ObserverSource src = observer_source(p, o, cfg);
    const Mat gain = p.gain.value_or(p.functional->F);
    if (gain.rows() != p.plant->r() || gain.cols() != p.plant->n()) {
        throw Error(ErrorKind::Dimension, "control.gain must be r x n");
    }
    const double step = o.step.value_or(p.simulation.step);
    const double t_end = o.t_end.value_or(p.simulation.t_end);
    if (!(step > 0.0) || !(t_end > step)) throw Error(ErrorKind::Configuration, "invalid --step / --t-end");
    const CoupledHistory hist = default_history(p, src.observer.order());
    const CoupledTrajectory tr = simulate_closed_loop(*p.plant, *p.measurement, gain, Functional(src.F),
                                                      src.observer, src.K, p.simulation.input, hist, t_end, step);
    const ClosedLoopSystems cl = closed_loop_systems(*p.plant, *p.measurement, gain, src.observer, src.K);

    std::vector<std::string> header{"t"};
    name_columns(header, "x", p.plant->n());
    name_columns(header, "x_sf", p.plant->n());
    name_columns(header, "u", p.plant->r());
    name_columns(header, "e", src.observer.order());
    std::vector<std::vector<double>> rows;
    double gap = 0.0;
    for (size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<double> row{tr.times[k]};
        append(row, tr.x[k]);
        append(row, tr.x_state_feedback[k]);
        append(row, tr.u[k]);
        append(row, tr.e[k]);
        rows.push_back(std::move(row));
        gap = std::max(gap, (tr.x[k] - tr.x_state_feedback[k]).norm());
    }
    const auto csv = default_out(o, p, "_closed_loop.csv");
    write_table(csv, header, rows);

    const Spectrum sf = eig(p.plant->A + p.plant->B * gain);
    json sf_eigs = json::array();
    for (const Complex& s : sf.eigenvalues) sf_eigs.push_back({s.real(), s.imag()});
    const auto& xs = tr.x;
    json summary{{"problem", p.name},
                 {"csv", csv.string()},
                 {"state_feedback_eigenvalues", sf_eigs},
                 {"state_error_roots", roots_to_json(rightmost_roots(cl.state_error))},
                 {"state_observer_roots", roots_to_json(rightmost_roots(cl.state_observer))},
                 {"max_gap_to_state_feedback", gap},
                 {"final_gap_to_state_feedback", (xs.back() - tr.x_state_feedback.back()).norm()},
                 {"final_error_norm", tr.e.back().norm()}};
    out << summary.dump(2) << '\n';
    (void)err;
    return kOk;
}

int cmd_roots(const std::filesystem::path& path, const Options& o, std::ostream& out, std::ostream& err) {
    const Problem p = load_problem(path);
    std::optional<DdeSystem> sys;
    if (!p.has_observer_data()) {
        const ErrorSystemSpec& s = *p.error_system;
        std::vector<DelayTerm> terms;
        if (s.N_tau) terms.push_back({*s.N_tau, s.tau.value_or(0.0)});
        if (s.N_h) terms.push_back({*s.N_h, s.h.value_or(0.0)});
        for (const auto& t : terms) {
            if (!(t.delay > 0.0)) throw Error(ErrorKind::InvalidInput, "error_system: delays must be given");
        }
        sys = DdeSystem::merged(s.N, terms);
    } else {
        const ObserverSource src = observer_source(p, o, solver_config(p, o));
        sys = error_system_unchecked(src.observer);
    }
    const RootReport r = rightmost_roots(*sys);
    json report{{"problem", p.name}, {"roots", roots_to_json(r)}, {"stable", r.abscissa < 0.0}};
    json cands = json::array();
    for (size_t i = 0; i < std::min<size_t>(8, r.candidates.size()); ++i) {
        cands.push_back({r.candidates[i].real(), r.candidates[i].imag()});
    }
    report["candidates"] = cands;
    emit(report, o, out);
    (void)err;
    return kOk;
}

int report_exception(std::ostream& err) {
    try {
        throw;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::InvalidInput:
            case ErrorKind::Dimension:
            case ErrorKind::Configuration:
            case ErrorKind::Ordering:
            case ErrorKind::Unsupported:
            case ErrorKind::WrongCase:
            case ErrorKind::NoFreedom: return kValidation;
            case ErrorKind::NoFeasibleStart:
            case ErrorKind::Extraction: return kNotFound;
            default: return kInternal;
        }
    } catch (const json::exception& e) {
        err << "error (json): " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

} // namespace tdc::cli
