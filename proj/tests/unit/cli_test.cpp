#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdc/design.hpp"
#include "tdc_cli/commands.hpp"
#include "tdc_cli/examples.hpp"
#include "tdc_cli/io.hpp"
#include "tdc_cli/queries.hpp"
#include "tdc_cli/repro.hpp"

using namespace tdc;
using namespace tdc::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TDC_DATA_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tdc_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void same_observer(const FunctionalObserver& a, const FunctionalObserver& b) {
    CHECK(a.M == b.M);
    CHECK(a.N == b.N);
    CHECK(a.N_tau == b.N_tau);
    CHECK(a.G == b.G);
    CHECK(a.G_tau == b.G_tau);
    CHECK(a.J == b.J);
    CHECK(a.J_tau == b.J_tau);
    CHECK(a.tau == b.tau);
    CHECK(a.two_delay() == b.two_delay());
    if (a.two_delay() && b.two_delay()) {
        CHECK(*a.N_h == *b.N_h);
        CHECK(*a.G_h == *b.G_h);
        CHECK(*a.J_h == *b.J_h);
        CHECK(*a.h == *b.h);
    }
}

} // namespace

TEST_CASE("problem files carry the embedded example data") {
    for (const golden::ObserverExample& ex : golden::observer_examples()) {
        CAPTURE(ex.id);
        const Problem p = load_problem(kData / (ex.id + ".json"));
        REQUIRE(p.has_observer_data());
        CHECK(p.plant->A == ex.plant.A);
        CHECK(p.plant->B == ex.plant.B);
        CHECK(p.functional->F == ex.func.F);
        CHECK(p.measurement->is_two_delay() == ex.meas.is_two_delay());
        CHECK(p.measurement->c_tau() == ex.meas.c_tau());
        CHECK(p.measurement->tau() == ex.meas.tau());
        if (ex.meas.is_two_delay()) {
            CHECK(p.measurement->as_two_delay().c_h == ex.meas.as_two_delay().c_h);
            CHECK(p.measurement->as_two_delay().h == doctest::Approx(ex.meas.as_two_delay().h).epsilon(1e-15));
        }
        CHECK(p.design.pinned.N_tau.has_value() == ex.pinned.N_tau.has_value());
        if (ex.pinned.N_tau) CHECK(*p.design.pinned.N_tau == *ex.pinned.N_tau);
        if (ex.pinned.N_h) CHECK(*p.design.pinned.N_h == *ex.pinned.N_h);
        if (ex.pinned.Z_bar) CHECK(*p.design.pinned.Z_bar == *ex.pinned.Z_bar);
        if (ex.R) CHECK(*p.design.R == *ex.R);
        if (ex.gain) CHECK(*p.gain == *ex.gain);
    }
    const auto a1 = golden::a1();
    const Problem p = load_problem(kData / "a1.json");
    REQUIRE(p.error_system);
    CHECK(p.error_system->N == a1.N);
    CHECK(*p.error_system->N_tau == a1.N_tau);
    const Problem p8 = load_problem(kData / "a8.json");
    REQUIRE(p8.error_system);
    REQUIRE(p8.error_system->three);
    CHECK(p8.error_system->three->N32 == golden::a8_blocks().N32);
}

TEST_CASE("every condition id builds a query from its problem file") {
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"constant", "a1"},        {"partitioned", "a2"},      {"interval", "a1"},
        {"interval-pd", "a1"},     {"two-delay", "a3"},        {"synth-constant", "a4"},
        {"synth-interval", "a4"},  {"synth-structured", "a5"}, {"synth-structured-interval", "a5"},
        {"synth-two-delay", "a6"}, {"synth-three-delay", "a8"}};
    CHECK(pairs.size() == condition_ids().size());
    for (const auto& [cond, file] : pairs) {
        CAPTURE(cond);
        const Problem p = load_problem(kData / (file + ".json"));
        const DelayQuery q = make_query(cond, error_system_for(p));
        CHECK(q.condition == cond);
        CHECK((q.synthesis ? static_cast<bool>(q.synth) : static_cast<bool>(q.analysis)));
    }
}

TEST_CASE("malformed problems are rejected") {
    CHECK_THROWS(problem_from_json(json::parse(R"({"plant": {"A": [[1, 2]], "B": [[1]]}})")));
    CHECK_THROWS(problem_from_json(json::parse(R"({"plant": {"A": [[1]], "B": [[1]]},
        "measurement": {"C_tau": [[1]], "tau": -1}, "functional": {"F": [[1]]}})")));
    CHECK_THROWS(make_query("bogus", ErrorSystemSpec{}));
}

TEST_CASE("synthesize then simulate from the report is bit-identical") {
    const fs::path problem = kData / "example1_search.json";
    const fs::path report = scratch("report.json");
    Options o;
    std::ostringstream out, err;
    o.out = report;
    REQUIRE(cmd_synthesize(problem, o, out, err) == kOk);

    const Problem p = load_problem(problem);
    DesignOptions d = p.design;
    d.solver = solver_config(p, Options{});
    const DesignAttempt direct = design_observer(*p.plant, *p.measurement, *p.functional, d);
    REQUIRE(direct.design);
    const json j = read_json(report);
    const json& jd = j.contains("design") ? j.at("design") : j;
    same_observer(observer_from_json(jd.at("observer")), direct.design->observer);

    Options fresh, replay;
    fresh.out = scratch("fresh.csv");
    replay.out = scratch("replay.csv");
    replay.observer_report = report;
    REQUIRE(cmd_simulate(problem, fresh, out, err) == kOk);
    REQUIRE(cmd_simulate(problem, replay, out, err) == kOk);
    CHECK(slurp(fresh.out) == slurp(replay.out));
    CHECK_FALSE(slurp(fresh.out).empty());
}

TEST_CASE("observer json round trip") {
    const FunctionalObserver o = *golden::example6().printed;
    same_observer(observer_from_json(observer_to_json(o)), o);
    const Mat m = make_mat({{0.1, 1.0 / 3.0}, {-2e-17, 5e300}});
    CHECK(mat_from_json(mat_to_json(m), "m") == m);
}

TEST_CASE("lambda grid parsing") {
    CHECK(parse_lambda_grid("1,0.5,-2") == std::vector<double>{1.0, 0.5, -2.0});
    CHECK_THROWS(parse_lambda_grid("1,,x"));
}

TEST_CASE("repro catalog and exit codes") {
    const auto ids = repro_check_ids();
    CHECK(ids.size() >= 70);
    CHECK(std::find(ids.begin(), ids.end(), "example3.roots") != ids.end());
    std::vector<CheckResult> rs(2);
    rs[0].outcome = Outcome::Pass;
    rs[1].outcome = Outcome::Inconclusive;
    CHECK(repro_exit_code(rs) == kInconclusive);
    rs[1].outcome = Outcome::Fail;
    CHECK(repro_exit_code(rs) == kNotFound);
}
