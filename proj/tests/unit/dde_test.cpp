#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tdc/dde.hpp"
#include "tdc/errors.hpp"

using namespace tdc;
using namespace tdc::testing;

namespace {

// x' = a x + b x(t - 1) has the exact solution e^{lt} when l = a + b e^{-l}.
DdeSystem exponential_system(double a, double l) {
    const double b = (l - a) * std::exp(l);
    return DdeSystem(Mat::Constant(1, 1, a), {{Mat::Constant(1, 1, b), 1.0}});
}

double error_at(const DdeSystem& sys, double l, double t_end, double step) {
    const History hist = [l](double t) { return Vec::Constant(1, std::exp(l * t)); };
    const Trajectory tr = simulate(sys, hist, t_end, step);
    return std::abs(tr.back()(0) - std::exp(l * tr.times.back()));
}

} // namespace

TEST_CASE("merged sums shared delays and drops zeros") {
    const Mat one = Mat::Ones(1, 1);
    const DdeSystem s = DdeSystem::merged(one, {{one, 2.0}, {one, 1.0}, {one, 2.0}, {Mat::Zero(1, 1), 3.0}});
    REQUIRE(s.delayed().size() == 2);
    CHECK(s.delayed()[0].delay == 1.0);
    CHECK(s.delayed()[1].matrix(0, 0) == 2.0);
    CHECK(s.max_delay() == 2.0);
    CHECK_THROWS_AS(DdeSystem(one, {{one, 2.0}, {one, 1.0}}), Error);
}

TEST_CASE("fourth-order convergence with a step-aligned delay") {
    const double l = -0.5;
    const DdeSystem sys = exponential_system(-1.0, l);
    const double e1 = error_at(sys, l, 5.0, 0.1);
    const double e2 = error_at(sys, l, 5.0, 0.05);
    const double order = std::log2(e1 / e2);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(order >= 3.7);
    CHECK(e2 < 1e-7);
}

TEST_CASE("fourth-order convergence with an unaligned delay") {
    const double l = 0.2;
    const double b = (l - 0.3) * std::exp(l * 0.9);
    const DdeSystem sys(Mat::Constant(1, 1, 0.3), {{Mat::Constant(1, 1, b), 0.9}});
    const History hist = [l](double t) { return Vec::Constant(1, std::exp(l * t)); };
    auto err = [&](double h) {
        const Trajectory tr = simulate(sys, hist, 4.0, h);
        return std::abs(tr.back()(0) - std::exp(l * tr.times.back()));
    };
    const double e1 = err(0.07), e2 = err(0.035);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(std::log2(e1 / e2) >= 3.5);
}

TEST_CASE("dense output reproduces the nodes and the solution between them") {
    const double l = -0.5;
    const DdeSystem sys = exponential_system(-1.0, l);
    const Trajectory tr = simulate(sys, constant_history(Vec::Ones(1)), 3.0, 0.01);
    CHECK(tr.interpolate(tr.times[37])(0) == tr.states[37](0));
    const Trajectory ex = simulate(sys, [l](double t) { return Vec::Constant(1, std::exp(l * t)); }, 3.0, 0.01);
    CHECK(std::abs(ex.interpolate(1.2345)(0) - std::exp(l * 1.2345)) < 1e-8);
}

TEST_CASE("step must resolve the smallest delay") {
    const DdeSystem sys(Mat::Constant(1, 1, -1.0), {{Mat::Constant(1, 1, 0.5), 0.1}});
    CHECK_THROWS_AS(simulate(sys, constant_history(Vec::Ones(1)), 1.0, 0.05), Error);
}

TEST_CASE("rightmost roots of x' = b x(t - 1) follow Lambert W") {
    for (double b : {-0.2, -1.0, -1.5, 0.3}) {
        CAPTURE(b);
        const DdeSystem sys(Mat::Zero(1, 1), {{Mat::Constant(1, 1, b), 1.0}});
        const RootReport rep = rightmost_roots(sys);
        const Complex want = lambert_w0(Complex(b, 0.0));
        CHECK(rep.abscissa == doctest::Approx(want.real()).epsilon(1e-8));
        bool found = false;
        for (const Complex& s : rep.rightmost) found |= std::abs(std::abs(s.imag()) - std::abs(want.imag())) < 1e-7;
        CHECK(found);
        CHECK(rep.residual <= 1e-8);
    }
}

TEST_CASE("roots satisfy the characteristic equation written out") {
    const Mat A = make_mat({{0.1, 1}, {1, -2}}), Nt = make_mat({{-0.5445, -0.2188}, {-0.2188, -0.0850}});
    const RootReport rep = rightmost_roots(DdeSystem(A, {{Nt, 1.0}}));
    for (const Complex& s : rep.rightmost) CHECK(std::abs(char_det(s, A, {{Nt, 1.0}})) <= 1e-8);
    const Complex polished = newton_root(rep.rightmost.front(), A, {{Nt, 1.0}});
    CHECK(std::abs(polished - rep.rightmost.front()) <= 1e-9);
}

TEST_CASE("the exact scalar test implies negative roots") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ua(-2.0, 1.0), ub(-3.0, 1.0), ut(0.1, 3.0);
    int passed = 0;
    for (int t = 0; t < 200 && passed < 40; ++t) {
        const double a = ua(rng), b = ub(rng), tau = ut(rng);
        if (!scalar_mori_test(a, b, tau)) continue;
        ++passed;
        const DdeSystem sys(Mat::Constant(1, 1, a), {{Mat::Constant(1, 1, b), tau}});
        CHECK(rightmost_roots(sys).abscissa < 0.0);
    }
    CHECK(passed >= 20);
}

TEST_CASE("scalar delay bound") {
    CHECK(scalar_mori_delay_bound(0.5) == 2.0);
    CHECK(std::isinf(scalar_mori_delay_bound(-1.0)));
    CHECK(scalar_mori_test(0.5, -0.7, 1.0));
    CHECK_FALSE(scalar_mori_test(0.5, -0.5, 2.0));
}

TEST_CASE("scaling time leaves the root pattern scaled") {
    // x'(t) = A x + A1 x(t - tau) and the same system in time c t: roots scale by 1/c.
    const Mat A = make_mat({{0.1, 1}, {1, -2}}), A1 = make_mat({{-0.5445, -0.2188}, {-0.2188, -0.0850}});
    const double base = rightmost_roots(DdeSystem(A, {{A1, 1.0}})).abscissa;
    for (double c : {0.01, 100.0}) {
        const double scaled = rightmost_roots(DdeSystem(A / c, {{A1 / c, c}})).abscissa;
        CHECK(scaled * c == doctest::Approx(base).epsilon(1e-6));
    }
}
