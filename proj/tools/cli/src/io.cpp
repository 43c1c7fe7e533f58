#include "tdc_cli/io.hpp"

#include <fstream>
#include <sstream>

#include "tdc/errors.hpp"
#include "tdc/linalg.hpp"

namespace tdc::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

double number(const json& j, const std::string& what) {
    if (!j.is_number()) invalid(what + ": expected a number");
    return j.get<double>();
}

std::optional<Mat> opt_mat(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return mat_from_json(j.at(key), where + "." + key);
}

std::optional<double> opt_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number(j.at(key), where + "." + key);
}

const json& required(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) invalid(where + ": missing \"" + key + "\"");
    return j.at(key);
}

MeasurementModel measurement_from_json(const json& j) {
    const std::string kind = j.value("kind", "single");
    const Mat c_tau = mat_from_json(required(j, "C_tau", "measurement"), "measurement.C_tau");
    const double tau = number(required(j, "tau", "measurement"), "measurement.tau");
    if (kind == "single") return MeasurementModel::single(c_tau, tau);
    if (kind == "two_delay") {
        return MeasurementModel::two_delay(c_tau, mat_from_json(required(j, "C_h", "measurement"), "measurement.C_h"),
                                           tau, number(required(j, "h", "measurement"), "measurement.h"));
    }
    if (kind == "extended") {
        return extend_measurement(MeasurementModel::single(c_tau, tau),
                                  number(required(j, "alpha", "measurement"), "measurement.alpha"));
    }
    invalid("measurement.kind must be single, two_delay or extended");
}

InputSignal input_from_json(const json& j) {
    const std::string kind = j.value("kind", "zero");
    const double amplitude = j.contains("amplitude") ? number(j.at("amplitude"), "input.amplitude") : 1.0;
    if (kind == "zero") return InputSignal::zero();
    if (kind == "step") return InputSignal::step(amplitude);
    if (kind == "square") {
        return InputSignal::square(amplitude, number(required(j, "period", "input"), "input.period"));
    }
    invalid("input.kind must be zero, step or square");
}

ErrorSystemSpec error_system_from_json(const json& j) {
    const std::string w = "error_system";
    ErrorSystemSpec s;
    s.N = mat_from_json(required(j, "N", w), w + ".N");
    s.N_tau = opt_mat(j, "N_tau", w);
    s.N_h = opt_mat(j, "N_h", w);
    s.N02 = opt_mat(j, "N02", w);
    s.N_tau1 = opt_mat(j, "N_tau1", w);
    s.N_tau2 = opt_mat(j, "N_tau2", w);
    s.N_h1 = opt_mat(j, "N_h1", w);
    s.N_h2 = opt_mat(j, "N_h2", w);
    if (j.contains("three_delay")) {
        const json& t = j.at("three_delay");
        const std::string tw = w + ".three_delay";
        auto get = [&](const char* key) { return mat_from_json(required(t, key, tw), tw + "." + key); };
        s.three = ThreeDelayBlocks{s.N, get("N02"), get("N11"), get("N12"), get("N21"), get("N22"), get("N31"),
                                   get("N32")};
    }
    s.tau = opt_number(j, "tau", w);
    s.h = opt_number(j, "h", w);
    s.tau_lo = opt_number(j, "tau_lo", w);
    if (j.contains("taus")) {
        for (const auto& t : j.at("taus")) s.taus.push_back(number(t, w + ".taus"));
    }
    return s;
}

} // namespace

Mat mat_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return Mat::Constant(1, 1, j.get<double>());
    if (!j.is_array() || j.empty()) invalid(what + ": expected a nonempty array");
    if (!j.front().is_array()) {
        Mat m(1, static_cast<Index>(j.size()));
        for (std::size_t c = 0; c < j.size(); ++c) m(0, static_cast<Index>(c)) = number(j[c], what);
        return m;
    }
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j.front().size());
    Mat m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) invalid(what + ": ragged rows");
        for (Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
    }
    if (!all_finite(m)) invalid(what + ": non-finite entry");
    return m;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vec vec_from_json(const json& j, const std::string& what) {
    const Mat m = mat_from_json(j, what);
    if (m.rows() != 1 && m.cols() != 1) invalid(what + ": expected a vector");
    return m.rows() == 1 ? Vec(m.row(0).transpose()) : Vec(m.col(0));
}

Problem problem_from_json(const json& j) {
    if (!j.is_object()) invalid("problem: expected a JSON object");
    Problem p;
    p.name = j.value("name", "problem");
    if (j.contains("plant")) {
        const json& pl = j.at("plant");
        p.plant.emplace(mat_from_json(required(pl, "A", "plant"), "plant.A"),
                        mat_from_json(required(pl, "B", "plant"), "plant.B"));
    }
    if (j.contains("measurement")) p.measurement = measurement_from_json(j.at("measurement"));
    if (j.contains("functional")) {
        const json& f = j.at("functional");
        p.functional.emplace(mat_from_json(required(f, "F", "functional"), "functional.F"));
        p.design.R = opt_mat(f, "R", "functional");
    }
    if (p.plant && p.measurement && p.plant->n() != p.measurement->n()) {
        throw Error(ErrorKind::Dimension, "problem: C_tau column count differs from n");
    }
    if (p.plant && p.functional && p.plant->n() != p.functional->F.cols()) {
        throw Error(ErrorKind::Dimension, "problem: F column count differs from n");
    }
    if (j.contains("control")) p.gain = opt_mat(j.at("control"), "gain", "control");
    if (j.contains("synthesis")) {
        const json& s = j.at("synthesis");
        p.design.pinned.N_tau = opt_mat(s, "N_tau", "synthesis");
        p.design.pinned.N_h = opt_mat(s, "N_h", "synthesis");
        p.design.pinned.Z_bar = opt_mat(s, "Z_bar", "synthesis");
        p.design.tau_lo = opt_number(s, "tau_lo", "synthesis");
        if (auto t = opt_number(s, "rank_tol", "synthesis")) p.design.rank_tol = *t;
        if (s.contains("lambda_grid")) {
            p.design.solver.lambda_grid.clear();
            for (const auto& l : s.at("lambda_grid")) p.design.solver.lambda_grid.push_back(number(l, "lambda_grid"));
            if (p.design.solver.lambda_grid.empty()) invalid("synthesis.lambda_grid is empty");
        }
    }
    if (j.contains("error_system")) p.error_system = error_system_from_json(j.at("error_system"));
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        if (auto v = opt_number(s, "t_end", "simulation")) p.simulation.t_end = *v;
        if (auto v = opt_number(s, "step", "simulation")) p.simulation.step = *v;
        if (s.contains("input")) p.simulation.input = input_from_json(s.at("input"));
        if (s.contains("history")) {
            const json& h = s.at("history");
            auto& hist = p.simulation.history;
            hist.x0 = vec_from_json(required(h, "x0", "history"), "history.x0");
            if (h.contains("w0")) hist.w0 = vec_from_json(h.at("w0"), "history.w0");
            const std::string xm = h.value("x_mode", "constant");
            const std::string wm = h.value("w_mode", "constant");
            if (xm != "constant" && xm != "free_response") invalid("history.x_mode must be constant or free_response");
            if (wm != "constant" && wm != "zero_error") invalid("history.w_mode must be constant or zero_error");
            hist.x_mode = xm == "constant" ? StateHistory::Constant : StateHistory::FreeResponse;
            hist.w_mode = wm == "constant" ? ObserverHistory::Constant : ObserverHistory::ZeroError;
            p.simulation.history_given = true;
        }
        if (!(p.simulation.step > 0.0) || !(p.simulation.t_end > 0.0)) {
            invalid("simulation: step and t_end must be positive");
        }
    }
    if (!p.has_observer_data() && !p.error_system) {
        invalid("problem: needs plant/measurement/functional or an error_system section");
    }
    return p;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        invalid(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Problem load_problem(const std::filesystem::path& path) { return problem_from_json(read_json(path)); }

std::vector<double> parse_lambda_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            invalid("--lambda-grid: cannot parse \"" + item + "\"");
        }
    }
    if (grid.empty()) invalid("--lambda-grid is empty");
    return grid;
}

json observer_to_json(const FunctionalObserver& obs) {
    json j{{"M", mat_to_json(obs.M)},       {"N", mat_to_json(obs.N)},     {"N_tau", mat_to_json(obs.N_tau)},
           {"G", mat_to_json(obs.G)},       {"G_tau", mat_to_json(obs.G_tau)}, {"J", mat_to_json(obs.J)},
           {"J_tau", mat_to_json(obs.J_tau)}, {"tau", obs.tau}};
    if (obs.two_delay()) {
        j["N_h"] = mat_to_json(*obs.N_h);
        j["G_h"] = mat_to_json(*obs.G_h);
        j["J_h"] = mat_to_json(*obs.J_h);
        j["h"] = *obs.h;
    }
    return j;
}

FunctionalObserver observer_from_json(const json& j) {
    const std::string w = "observer";
    auto get = [&](const char* key) { return mat_from_json(required(j, key, w), w + "." + key); };
    FunctionalObserver obs;
    obs.M = get("M");
    obs.N = get("N");
    obs.N_tau = get("N_tau");
    obs.G = get("G");
    obs.G_tau = get("G_tau");
    obs.J = get("J");
    obs.J_tau = get("J_tau");
    obs.tau = number(required(j, "tau", w), "observer.tau");
    if (j.contains("h")) {
        obs.N_h = get("N_h");
        obs.G_h = get("G_h");
        obs.J_h = get("J_h");
        obs.h = number(j.at("h"), "observer.h");
    }
    return obs;
}

json verdict_to_json(const Verdict& v) {
    json j{{"status", to_string(v.status)}, {"condition", v.kind},       {"margin", v.margin},
           {"epsilon", v.epsilon},          {"objective", v.objective}, {"iterations", v.iterations},
           {"detail", v.detail}};
    if (v.lambda) j["lambda"] = *v.lambda;
    if (!v.gains.empty()) {
        json g = json::object();
        for (const auto& [name, m] : v.gains) g[name] = mat_to_json(m);
        j["gains"] = g;
    }
    if (v.closed_loop_abscissa) j["closed_loop_abscissa"] = *v.closed_loop_abscissa;
    if (v.closed_loop_margin) j["closed_loop_margin"] = *v.closed_loop_margin;
    return j;
}

json roots_to_json(const RootReport& r) {
    json roots = json::array();
    for (const Complex& s : r.rightmost) roots.push_back({s.real(), s.imag()});
    return {{"abscissa", r.abscissa},
            {"rightmost", roots},
            {"residual", r.residual},
            {"refined", r.refined},
            {"discretization_size", r.discretization_size}};
}

json sweep_to_json(const DelaySweepResult& s) {
    json trace = json::array();
    for (const auto& [tau, st] : s.trace) trace.push_back({{"delay", tau}, {"status", to_string(st)}});
    return {{"query", s.query},
            {"certified_max_delay", s.certified_max_delay},
            {"inconclusive_seen", s.inconclusive_seen},
            {"trace", trace},
            {"certificate", verdict_to_json(s.best)},
            {"note", "strict inequalities are enforced with margin epsilon; reported maxima are slightly conservative"}};
}

json design_to_json(const Design& d) {
    json j{{"case", d.case_tag},
           {"inner_case", d.inner_case},
           {"F", mat_to_json(d.F_active)},
           {"observer", observer_to_json(d.observer)},
           {"X_bar", mat_to_json(d.X_bar)},
           {"gain_source", d.gain_source},
           {"residual_norm", d.coefficients.residual_norm},
           {"certificate", verdict_to_json(d.certificate)},
           {"roots", roots_to_json(d.roots)},
           {"stable", d.stable()},
           {"warnings", d.warnings}};
    if (d.augmentation) {
        j["augmentation"] = {{"F_bar", mat_to_json(d.augmentation->F_bar)},
                             {"R", mat_to_json(d.augmentation->R)},
                             {"K", mat_to_json(d.augmentation->K)},
                             {"q", d.augmentation->q()}};
    }
    if (d.search) j["search"] = verdict_to_json(*d.search);
    json blocks = json::object();
    for (const auto& [name, m] : d.coefficients.blocks) blocks[name] = max_abs(m);
    j["coefficient_residuals"] = blocks;
    return j;
}

} // namespace tdc::cli
