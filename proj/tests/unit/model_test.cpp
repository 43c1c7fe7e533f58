#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "tdc/coupled.hpp"
#include "tdc/design.hpp"
#include "tdc/errors.hpp"
#include "tdc/synthesis.hpp"
#include "tdc_cli/examples.hpp"

using namespace tdc;
using namespace tdc::testing;
namespace golden = tdc::cli::golden;

namespace {

Design pinned(const golden::ObserverExample& ex) {
    DesignOptions o;
    o.R = ex.R;
    o.pinned = ex.pinned;
    DesignAttempt a = design_observer(ex.plant, ex.meas, ex.func, o);
    REQUIRE(a.design);
    return *a.design;
}

bool contains(const std::vector<Complex>& set, Complex z, double tol) {
    for (const Complex& s : set)
        if (std::abs(s - z) <= tol) return true;
    return false;
}

} // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(Plant(Mat::Identity(2, 3), Mat::Ones(2, 1)), Error);
    CHECK_THROWS_AS(Functional(make_mat({{1, 2}, {2, 4}})), Error);
    CHECK_THROWS_AS(MeasurementModel::single(Mat::Identity(2, 2), 0.0), Error);
    try {
        MeasurementModel::two_delay(Mat::Identity(1, 1), Mat::Identity(1, 1), 1.0, 1.0);
        FAIL("expected an ordering error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Ordering);
    }
}

TEST_CASE("N = F A F+ keeps the spectrum inside sigma(A)") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const Index n = 2 + t % 4;
        const Index m = 1 + t % (n - 1);
        // A = V D V^{-1}: the first m rows of V^{-1} span a left-invariant subspace.
        Vec d(n);
        for (Index i = 0; i < n; ++i) d(i) = random_mat(rng, 1, 1)(0, 0);
        const Mat V = random_mat(rng, n, n) + 3.0 * Mat::Identity(n, n);
        const Mat Vi = V.inverse();
        const Plant plant(V * d.asDiagonal() * Vi, Mat::Ones(n, 1));
        const Functional func(random_mat(rng, m, m) * Vi.topRows(m) + Mat::Zero(m, n));
        if (rank(func.F) < m) continue;
        REQUIRE(check_rank_condition(func, plant, 1e-8));
        const Mat N = compute_N(func, plant);
        CHECK((N * func.F - func.F * plant.A).norm() <= 1e-8 * (1.0 + plant.A.norm()) * func.F.norm());
        const auto all = eig(plant.A).eigenvalues;
        for (const Complex& s : eig(N).eigenvalues) CHECK(contains(all, s, 1e-6));
    }
}

TEST_CASE("augmentation restores the rank condition") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 50; ++t) {
        const Index n = 2 + t % 4;
        const Plant plant(random_mat(rng, n, n), Mat::Ones(n, 1));
        const Functional func(random_mat(rng, 1, n));
        if (check_rank_condition(func, plant)) continue;
        const AugmentedFunctional aug = augment(func, plant);
        CHECK(aug.q() <= n);
        CHECK(aug.F_bar.topRows(1) == func.F);
        CHECK(rank(aug.F_bar) == aug.q());
        CHECK(check_rank_condition(Functional(aug.F_bar), plant, 1e-8));
        CHECK((aug.K * aug.F_bar - func.F).isZero());
    }
    const Plant full(Mat::Identity(2, 2), Mat::Ones(2, 1));
    CHECK_THROWS_AS(augment(Functional(Mat::Identity(2, 2)), full), Error);
}

TEST_CASE("compute_N refuses functionals that need augmentation") {
    const auto ex = golden::example7();
    try {
        compute_N(ex.func, ex.plant);
        FAIL("expected WrongCase");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongCase);
    }
}

TEST_CASE("case dispatch on the worked examples") {
    CHECK(pinned(golden::example1()).case_tag == "case1_full_rank");
    CHECK(pinned(golden::example4()).case_tag == "case2_structured");
    const Design d7 = pinned(golden::example7());
    CHECK(d7.case_tag == "case3_augment_then_retry");
    CHECK(d7.observer.order() == 2);
}

TEST_CASE("library residual agrees with the term-by-term expansion") {
    for (const auto& ex : golden::observer_examples()) {
        CAPTURE(ex.id);
        const Design d = pinned(ex);
        const double oracle = decoupling_residual(ex.plant, ex.meas, d.F_active, d.observer);
        CHECK(oracle <= 1e-8);
        CHECK(d.coefficients.residual_norm <= 1e-8);
        if (ex.printed) {
            const double printed = decoupling_residual(ex.plant, ex.meas, ex.func.F, *ex.printed);
            const double lib = error_coefficients(ex.plant, ex.meas, ex.func, *ex.printed).residual_norm;
            CHECK(printed <= 1e-2);
            CHECK(lib == doctest::Approx(printed).epsilon(1e-9));
        }
    }
}

TEST_CASE("error system refuses an inconsistent observer") {
    const auto ex = golden::example3();
    FunctionalObserver o = *ex.printed;
    o.J(0, 0) += 0.5;
    try {
        error_system(ex.plant, ex.meas, ex.func, o);
        FAIL("expected Inconsistent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Inconsistent);
    }
}

TEST_CASE("extended measurement is a two-delay model") {
    const MeasurementModel m = extend_measurement(MeasurementModel::single(make_mat({{1, 0}}), 2.3), 0.7);
    REQUIRE(m.is_two_delay());
    CHECK(m.as_two_delay().h == doctest::Approx(3.0));
    CHECK(m.p() == 2);
}

TEST_CASE("inputs are left-continuous") {
    const InputSignal sq = InputSignal::square(2.0, 1.0);
    CHECK(sq.scalar(0.0) == 0.0);
    CHECK(sq.scalar(0.25) == 2.0);
    CHECK(sq.scalar(0.5) == 2.0);
    CHECK(sq.scalar(0.75) == -2.0);
    CHECK(sq.scalar(1.0) == -2.0);
    CHECK(sq.scalar(1.1) == 2.0);
    CHECK(InputSignal::step(3.0).scalar(0.0) == 0.0);
    CHECK(InputSignal::step(3.0).scalar(1e-6) == 3.0);
    CHECK(InputSignal::zero()(5.0, 2).isZero());
}

TEST_CASE("a zero-error history keeps the error at zero") {
    const auto ex = golden::example3();
    const Design d = pinned(ex);
    const CoupledHistory h{Vec::Ones(2), Vec(), StateHistory::FreeResponse, ObserverHistory::ZeroError};
    const auto tr = simulate_coupled(ex.plant, ex.meas, ex.func, d.observer, InputSignal::square(1.0, 3.0), h, 10.0, 0.01);
    CHECK(tr.tail_error_norm(0.0) <= 1e-9);
}

TEST_CASE("the error does not depend on the input") {
    for (const auto& ex : golden::observer_examples()) {
        CAPTURE(ex.id);
        const Design d = pinned(ex);
        const Functional f(d.F_active);
        const CoupledHistory h{Vec::Ones(ex.plant.n()), Vec::Ones(d.observer.order()), StateHistory::Constant,
                               ObserverHistory::Constant};
        const auto a = simulate_coupled(ex.plant, ex.meas, f, d.observer, InputSignal::zero(), h, 8.0, 0.01);
        const auto b = simulate_coupled(ex.plant, ex.meas, f, d.observer, InputSignal::step(2.0), h, 8.0, 0.01);
        double worst = 0.0;
        for (size_t k = 0; k < a.e.size(); ++k) worst = std::max(worst, (a.e[k] - b.e[k]).norm());
        CHECK(worst <= 1e-9);
    }
}
