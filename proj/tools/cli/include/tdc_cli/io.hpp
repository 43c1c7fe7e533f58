#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdc/coupled.hpp"
#include "tdc/design.hpp"
#include "tdc/model.hpp"
#include "tdc/sdp.hpp"

namespace tdc::cli {

using json = nlohmann::json;

/// Delay-system data for the LMI-only examples and for max-delay queries.
struct ErrorSystemSpec {
    Mat N;
    std::optional<Mat> N_tau, N_h;
    // structured stabilization: closed loop (N + Z0 N02) e + (N_tau1 + Z N_tau2) e(t - tau) ...
    std::optional<Mat> N02, N_tau1, N_tau2, N_h1, N_h2;
    // three delays: blocks N11..N32 of the four-gain condition
    std::optional<ThreeDelayBlocks> three;
    std::optional<double> tau, h, tau_lo;
    std::vector<double> taus;
};

struct SimulationSpec {
    double t_end = 20.0;
    double step = 0.01;
    InputSignal input;
    CoupledHistory history;
    bool history_given = false;
};

struct Problem {
    std::string name;
    std::optional<Plant> plant;
    std::optional<MeasurementModel> measurement;
    std::optional<Functional> functional;
    std::optional<Mat> gain;  // state feedback realized in closed-loop mode (defaults to F)
    DesignOptions design;
    std::optional<ErrorSystemSpec> error_system;
    SimulationSpec simulation;

    [[nodiscard]] bool has_observer_data() const { return plant && measurement && functional; }
};

/// Matrices are row-major nested arrays; a flat array is read as a row vector.
Mat mat_from_json(const json& j, const std::string& what);
json mat_to_json(const Mat& m);
Vec vec_from_json(const json& j, const std::string& what);

/// Validates against the model invariants; throws tdc::Error(InvalidInput / Dimension ...).
Problem problem_from_json(const json& j);
Problem load_problem(const std::filesystem::path& path);

std::vector<double> parse_lambda_grid(const std::string& csv);

json observer_to_json(const FunctionalObserver& obs);
FunctionalObserver observer_from_json(const json& j);

json verdict_to_json(const Verdict& v);
json roots_to_json(const RootReport& r);
json sweep_to_json(const DelaySweepResult& s);
json design_to_json(const Design& d);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

} // namespace tdc::cli
