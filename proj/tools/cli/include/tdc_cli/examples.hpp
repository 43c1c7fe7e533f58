#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdc/design.hpp"
#include "tdc/lmi.hpp"
#include "tdc/model.hpp"

namespace tdc::cli::golden {

/// Observer problem of a worked example with the published delayed gains.
struct ObserverExample {
    std::string id;
    Plant plant;
    MeasurementModel meas;
    Functional func;
    PinnedGains pinned;
    std::optional<Mat> R;
    std::optional<Mat> gain;
    std::optional<FunctionalObserver> printed;  // 4-decimal observer as published
};

ObserverExample example1();
ObserverExample example2();
ObserverExample example3();
ObserverExample example4();
ObserverExample example5();
ObserverExample example6();
ObserverExample example7();
std::vector<ObserverExample> observer_examples();

/// Delay-system data of the LMI-only examples.
struct A1Data { Mat N, N_tau; };
A1Data a1();                      // also used by A2
Mat a3_N_h();                     // tau = 1.2
Mat a4_N();                       // N01 of A4, A5, A7, A8
Mat a5_N_tau2();                  // (1 2 3)
ThreeDelayBlocks a8_blocks();

/// Published gains of the stabilization examples.
struct PrintedGains {
    std::string id;
    LmiProblem problem;       // built at lambda = 1; only its closed-loop data is used
    std::vector<Mat> gains;   // in the problem's gain order
};
std::vector<PrintedGains> printed_gains();

} // namespace tdc::cli::golden
