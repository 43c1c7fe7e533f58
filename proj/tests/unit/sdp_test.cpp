#include <doctest.h>

#include <random>

#include "support/properties.hpp"
#include "tdc/dde.hpp"
#include "tdc/errors.hpp"
#include "tdc/sdp.hpp"
#include "tdc_cli/examples.hpp"

using namespace tdc;
using namespace tdc::testing;
namespace golden = tdc::cli::golden;

namespace {

/// Lyapunov inequality A^T P + P A < 0, P > 0.
LmiProblem lyapunov(const Mat& A) {
    LmiProblem p;
    p.data_scale = A.norm();
    const AffineMat P = p.add_variable("P", A.rows(), A.rows(), Structure::SymmetricPD);
    p.add_constraint("lyapunov", Sense::Negative, P * A + A.transpose() * P);
    return p;
}

} // namespace

TEST_CASE("Lyapunov feasibility tracks the spectrum") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
        const Index n = 1 + t % 4;
        const Mat M = random_mat(rng, n, n);
        const double shift = eig(M).max_real();
        const Mat stable = M - (shift + 0.5) * Mat::Identity(n, n);
        const Mat unstable = M - (shift - 0.5) * Mat::Identity(n, n);
        const Verdict good = solve(lyapunov(stable));
        CHECK(good.feasible());
        CHECK(good.margin >= good.epsilon / 2);
        const Mat P = good.assignment.at("P");
        CHECK(min_eig_sym(P) > 0.0);
        CHECK(max_eig_sym(P * stable + stable.transpose() * P) < 0.0);
        CHECK_FALSE(solve(lyapunov(unstable)).feasible());
    }
}

TEST_CASE("constant-delay certificate is sound on random stable instances") {
    std::mt19937_64 rng(42);
    int feasible = 0, tried = 0;
    while (tried < 20) {
        const Index n = 1 + tried % 3;
        const Mat M = random_mat(rng, n, n);
        const Mat N = M - (eig(M).max_real() + 1.0) * Mat::Identity(n, n);
        const Mat Nt = 0.3 * random_mat(rng, n, n);
        const double tau = 0.2 + 0.1 * tried;
        const DdeSystem sys(N, {{Nt, tau}});
        const Verdict v = solve(stability_constant(N, Nt, tau));
        ++tried;
        if (!v.feasible()) continue;
        ++feasible;
        CHECK(rightmost_roots(sys).abscissa < 0.0);
    }
    CHECK(feasible >= 10);
}

TEST_CASE("worked instances: feasible verdicts have negative abscissa") {
    const auto d = golden::a1();
    for (double tau : {0.5, 1.0, 1.5}) {
        CAPTURE(tau);
        const Verdict v = solve(stability_constant(d.N, d.N_tau, tau));
        REQUIRE(v.feasible());
        CHECK(rightmost_roots(DdeSystem(d.N, {{d.N_tau, tau}})).abscissa < 0.0);
    }
}

TEST_CASE("multiplying the data by 10 flips no verdict") {
    // e' = 10 N e + 10 N_tau e(t - tau/10) is the same system in time 10 t.
    const auto d = golden::a1();
    for (double c : {0.1, 1.0}) {
        CAPTURE(c);
        CHECK(solve(stability_constant(d.N / c, d.N_tau / c, 1.2 * c)).feasible());
        CHECK_FALSE(solve(stability_constant(d.N / c, d.N_tau / c, 2.5 * c)).feasible());
    }
}

TEST_CASE("bisection converges on a known threshold") {
    const DelayProbe probe = [](double t) {
        Verdict v;
        v.status = t <= 1.2345 ? Status::Feasible : Status::NotFound;
        return v;
    };
    const DelaySweepResult r = max_delay(probe, 0.1, 5.0, 1e-4);
    CHECK(r.certified_max_delay <= 1.2345);
    CHECK(r.certified_max_delay >= 1.2345 - 1e-4);
    try {
        max_delay(probe, 2.0, 5.0, 1e-4);
        FAIL("expected NoFeasibleStart");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoFeasibleStart);
    }
}

TEST_CASE("inconclusive probes count as not feasible") {
    const DelayProbe probe = [](double t) {
        Verdict v;
        v.status = t <= 1.0 ? Status::Feasible : t <= 2.0 ? Status::Inconclusive : Status::NotFound;
        return v;
    };
    const DelaySweepResult r = max_delay(probe, 0.1, 5.0, 1e-3);
    CHECK(r.certified_max_delay <= 1.0);
    CHECK(r.inconclusive_seen);
}

TEST_CASE("grid sweep is deterministic under parallel evaluation") {
    const auto d = golden::a1();
    const auto fam = [d](double t) { return stability_interval(d.N, d.N_tau, 0.3, t); };
    const ProbeFactory make = [fam] { return analysis_probe(fam); };
    std::vector<double> grid;
    for (int i = 0; i < 8; ++i) grid.push_back(0.31 + 0.3 * i);
    const DelaySweepResult one = max_delay_sweep(make, grid, 5e-3, "serial", 1);
    const DelaySweepResult many = max_delay_sweep(make, grid, 5e-3, "parallel", 4);
    CHECK(one.certified_max_delay == many.certified_max_delay);
    REQUIRE(one.trace.size() == many.trace.size());
    for (size_t i = 0; i < one.trace.size(); ++i) {
        CHECK(one.trace[i].first == many.trace[i].first);
        CHECK(one.trace[i].second == many.trace[i].second);
    }
}

TEST_CASE("parameter-dependent interval condition is no more conservative") {
    const auto d = golden::a1();
    for (double lo : {0.2, 0.3, 0.5}) {
        CAPTURE(lo);
        std::vector<double> grid;
        for (int i = 0; i < 12; ++i) grid.push_back(lo + 0.01 + (3.0 - lo - 0.01) * i / 11.0);
        const auto plain = max_delay_sweep(
            [&] { return analysis_probe([&](double t) { return stability_interval(d.N, d.N_tau, lo, t); }); }, grid,
            2e-3, {}, 1);
        const auto pd = max_delay_sweep(
            [&] { return analysis_probe([&](double t) { return stability_interval_pd(d.N, d.N_tau, lo, t); }); },
            grid, 2e-3, {}, 1);
        CHECK(pd.certified_max_delay >= plain.certified_max_delay - 2e-3);
    }
}

TEST_CASE("synthesis extracts gains that stabilize") {
    const Mat N = Mat::Constant(1, 1, 2.0);
    const Verdict v = solve_synthesis([&](double l) { return synth_constant(N, 0.3, l); });
    REQUIRE(v.feasible());
    REQUIRE(v.closed_loop_abscissa);
    CHECK(*v.closed_loop_abscissa < 0.0);
    const double z = v.gain("N_tau")(0, 0);
    CHECK(rightmost_roots(DdeSystem(N, {{Mat::Constant(1, 1, z), 0.3}})).abscissa < 0.0);
}

TEST_CASE("an exhausted iteration budget is not a feasibility verdict") {
    SolverConfig cfg;
    cfg.max_iterations = 1;
    const auto d = golden::a1();
    const Verdict v = solve(stability_constant(d.N, d.N_tau, 1.0), cfg);
    CHECK(v.status != Status::Feasible);
}
