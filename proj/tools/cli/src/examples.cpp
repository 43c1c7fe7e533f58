#include "tdc_cli/examples.hpp"

#include "tdc/synthesis.hpp"

namespace tdc::cli::golden {

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

FunctionalObserver single_observer(Mat M, Mat N, Mat N_tau, Mat G, Mat G_tau, Mat J, Mat J_tau, double tau) {
    FunctionalObserver o;
    o.M = std::move(M);
    o.N = std::move(N);
    o.N_tau = std::move(N_tau);
    o.G = std::move(G);
    o.G_tau = std::move(G_tau);
    o.J = std::move(J);
    o.J_tau = std::move(J_tau);
    o.tau = tau;
    return o;
}

Mat ex1_A() { return make_mat({{0.1, 1}, {1, -2}}); }
Mat ex1_N_tau() { return make_mat({{-0.5445, -0.2188}, {-0.2188, -0.0850}}); }
Mat ex3_A() { return make_mat({{0.1, 1}, {0, 0.5}}); }

} // namespace

ObserverExample example1() {
    ObserverExample e{"example1", Plant(ex1_A(), make_mat({{1}, {2}})),
                      MeasurementModel::single(Mat::Identity(2, 2), 1.0), Functional(Mat::Identity(2, 2)),
                      {}, {}, {}, {}};
    e.pinned.N_tau = ex1_N_tau();
    e.printed = single_observer(make_mat({{0.2181, 0.0869}, {0.0869, 0.0357}}), ex1_A(), ex1_N_tau(),
                                make_mat({{0.5445, 0.2188}, {0.2188, 0.0850}}),
                                make_mat({{-0.1378, -0.0551}, {-0.0551, -0.0220}}), make_mat({{1}, {2}}),
                                make_mat({{-0.3918}, {-0.1582}}), 1.0);
    return e;
}

ObserverExample example2() {
    ObserverExample e{"example2", Plant(ex1_A(), make_mat({{1}, {2}})),
                      MeasurementModel::single(make_mat({{1, 0}}), 1.0), Functional(Mat::Identity(2, 2)),
                      {}, {}, {}, {}};
    e.pinned.N_tau = ex1_N_tau();
    e.printed = single_observer(make_mat({{0.2188}, {0.0850}}), ex1_A(), ex1_N_tau(), make_mat({{0.6295}, {0.2593}}),
                                make_mat({{-0.1378}, {-0.0551}}), make_mat({{1}, {2}}),
                                make_mat({{-0.2188}, {-0.0850}}), 1.0);
    return e;
}

ObserverExample example3() {
    ObserverExample e{"example3", Plant(ex3_A(), make_mat({{1}, {2}})),
                      MeasurementModel::single(make_mat({{1, 0}}), 1.0), Functional(make_mat({{0, 1}})),
                      {}, {}, {}, {}};
    e.pinned.N_tau = scalar(-0.7);
    e.printed = single_observer(scalar(0.7), scalar(0.5), scalar(-0.7), scalar(0.28), scalar(-0.49), scalar(2),
                                scalar(-0.7), 1.0);
    return e;
}

ObserverExample example4() {
    ObserverExample e{"example4", Plant(make_mat({{0.1, 1, 1}, {0, 0.2, 1}, {0, -1, -0.1}}), make_mat({{1}, {2}, {3}})),
                      MeasurementModel::single(make_mat({{1, 0, 0}}), 1.0),
                      Functional(make_mat({{0, 1, 0}, {0, 0, 1}})), {}, {}, {}, {}};
    e.pinned.Z_bar = make_mat({{-1.1384}, {0.2522}});
    e.printed = single_observer(make_mat({{0.3782}, {-0.0838}}), make_mat({{0.2, 1}, {-1, -0.1}}),
                                make_mat({{-0.3782, -0.3782}, {0.0838, 0.0838}}), make_mat({{-0.0460}, {-0.3615}}),
                                make_mat({{-0.1114}, {0.0247}}), make_mat({{2}, {3}}),
                                make_mat({{-0.3782}, {0.0838}}), 1.0);
    return e;
}

ObserverExample example5() {
    ObserverExample e{"example5", Plant(ex3_A(), make_mat({{1}, {2}})),
                      extend_measurement(MeasurementModel::single(make_mat({{1, 0}}), 2.3), 0.7),
                      Functional(make_mat({{0, 1}})), {}, {}, {}, {}};
    e.pinned.N_tau = scalar(-0.8566);
    e.pinned.N_h = scalar(0.3509);
    FunctionalObserver o = single_observer(make_mat({{0.8566, -0.3509}}), scalar(0.5), scalar(-0.8566),
                                           make_mat({{0.3427, -0.1403}}), make_mat({{-0.7338, 0.3006}}), scalar(2),
                                           scalar(-0.8566), 2.3);
    o.N_h = scalar(0.3509);
    o.G_h = make_mat({{0.3006, -0.1231}});
    o.J_h = scalar(0.3509);
    o.h = 3.0;
    e.printed = o;
    return e;
}

ObserverExample example6() {
    const Mat A = make_mat({{0.5, 1}, {-2, 2}});
    ObserverExample e{"example6", Plant(A, make_mat({{1}, {1}})),
                      MeasurementModel::two_delay(make_mat({{1, 0}, {0, 0}}), make_mat({{0, 0}, {0, 1}}), 0.65, 1.65),
                      Functional(Mat::Identity(2, 2)), {}, {}, {}, {}};
    const Mat N_tau = make_mat({{-0.3621, -1.0222}, {2.0430, -1.8944}});
    const Mat N_h = make_mat({{-0.2399, 0.1801}, {-0.3589, 0.0293}});
    e.pinned.N_tau = N_tau;
    e.pinned.N_h = N_h;
    FunctionalObserver o = single_observer(make_mat({{1.0222, -0.1200}, {1.8944, -0.1795}}), A, N_tau,
                                           make_mat({{2.2564, -0.1797}, {-1.2458, 0.2106}}),
                                           make_mat({{-2.3065, 0.2269}, {-1.5003, 0.0949}}), make_mat({{1}, {1}}),
                                           make_mat({{-1.0222}, {-1.8944}}), 0.65);
    o.N_h = N_h;
    o.G_h = make_mat({{0.0960, -0.0035}, {-0.3114, 0.0378}});
    o.J_h = make_mat({{0.1200}, {0.1795}});
    o.h = 1.65;
    e.printed = o;
    return e;
}

ObserverExample example7() {
    const Mat F = make_mat({{-0.6, -1.7}});
    ObserverExample e{"example7", Plant(make_mat({{0, 1}, {0.1, 0.2}}), make_mat({{0}, {1}})),
                      MeasurementModel::single(make_mat({{1, 0}}), 1.0), Functional(F), {}, {}, {}, {}};
    e.pinned.N_tau = make_mat({{-0.5079, 0.1035}, {0.1217, -0.1952}});
    e.R = make_mat({{0, 1}});
    e.gain = F;
    return e;
}

std::vector<ObserverExample> observer_examples() {
    return {example1(), example2(), example3(), example4(), example5(), example6(), example7()};
}

A1Data a1() { return {make_mat({{0, 1}, {-2, 0.1}}), make_mat({{0, 0}, {1, 0}})}; }

Mat a3_N_h() { return make_mat({{0, 0}, {0.2, 0}}); }

Mat a4_N() { return make_mat({{0.2, 0, 0}, {0.2, 0.1, -0.1}, {0, 0.2, 0.15}}); }

Mat a5_N_tau2() { return make_mat({{1, 2, 3}}); }

ThreeDelayBlocks a8_blocks() {
    const Mat z13 = Mat::Zero(1, 3);
    const Mat z33 = Mat::Zero(3, 3);
    return {a4_N(), z13, z33, a5_N_tau2(), z33, a5_N_tau2(), z33, make_mat({{1, 0, 0}})};
}

std::vector<PrintedGains> printed_gains() {
    const Mat N = a4_N();
    const Mat z13 = Mat::Zero(1, 3), z33 = Mat::Zero(3, 3), z31 = Mat::Zero(3, 1);
    const Mat n2 = a5_N_tau2();
    const Mat one = scalar(1), zero = scalar(0);
    const Mat z22 = Mat::Zero(2, 2), I2 = Mat::Identity(2, 2);
    std::vector<PrintedGains> out;
    out.push_back({"example1", synth_constant(ex1_A(), 1.0, 1.0), {ex1_N_tau()}});
    out.push_back({"example4",
                   synth_structured_constant(make_mat({{0.2, 1}, {-1, -0.1}}), Mat::Zero(1, 2), z22,
                                             make_mat({{0.3322, 0.3322}}), 1.0, 1.0),
                   {make_mat({{-1.1384}, {0.2522}})}});
    out.push_back({"example5", synth_two_delay(scalar(0.5), zero, zero, one, zero, one, 2.3, 3.0, 1.0),
                   {zero, scalar(-0.8566), scalar(0.3509)}});
    out.push_back({"example6",
                   synth_two_delay(make_mat({{0.5, 1}, {-2, 2}}), z22, z22, I2, z22, I2, 0.65, 1.65, 1.0),
                   {z22, make_mat({{-0.3621, -1.0222}, {2.0430, -1.8944}}),
                    make_mat({{-0.2399, 0.1801}, {-0.3589, 0.0293}})}});
    out.push_back({"example7", synth_constant(make_mat({{0.2833, -0.4583}, {-0.1667, -0.0833}}), 1.0, 1.0),
                   {make_mat({{-0.5079, 0.1035}, {0.1217, -0.1952}})}});
    out.push_back({"a4.constant", synth_constant(N, 4.8, 1.0),
                   {make_mat({{-0.2033, 0.0001, -0.0004}, {-0.1619, -0.1403, 0.0839}, {0.0195, -0.1707, -0.1751}})}});
    out.push_back({"a4.interval", synth_interval(N, 2.0, 4.78, 1.0),
                   {make_mat({{-0.2066, 0.0004, 0.0003}, {-0.1570, -0.1460, 0.0833}, {0.0174, -0.1751, -0.1731}})}});
    out.push_back({"a5.structured", synth_structured_constant(N, z13, z33, n2, 2.2, 1.0),
                   {make_mat({{-0.0568}, {-0.0726}, {-0.0601}})}});
    out.push_back({"a5.structured_interval", synth_structured_interval(N, z13, z33, n2, 1.0, 2.1, 1.0),
                   {make_mat({{-0.0646}, {-0.0860}, {-0.0612}})}});
    out.push_back({"a6.two_delay", synth_two_delay(scalar(2), zero, zero, one, zero, one, 0.595, 0.8, 1.0),
                   {zero, scalar(-3.1605), scalar(1.1556)}});
    out.push_back({"a7.two_delay", synth_two_delay(N, z13, z33, n2, z33, n2, 2.43, 2.7, 1.0),
                   {z31, make_mat({{-0.2184}, {-0.2402}, {-0.1099}}), make_mat({{0.1554}, {0.1633}, {0.0524}})}});
    out.push_back({"a8.three_delay", synth_three_delay(a8_blocks(), 3.65, 3.7, 3.75, 1.0),
                   {z31, make_mat({{-0.1159}, {-0.3993}, {-0.9907}}), make_mat({{0.1158}, {0.3869}, {0.9271}}),
                    make_mat({{-0.2249}, {-0.1297}, {0.0445}})}});
    return out;
}

} // namespace tdc::cli::golden
