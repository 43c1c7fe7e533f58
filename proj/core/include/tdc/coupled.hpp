#pragma once

#include <vector>

#include "tdc/dde.hpp"
#include "tdc/model.hpp"

namespace tdc {

enum class InputKind { Zero, Step, Square };

/// Built-in plant inputs; every channel carries amplitude * s(t), zero for t <= 0.
/// Square waves start at +amplitude and flip every half period. Signals are
/// left-continuous, so an integrator stage that lands on a jump sees the same
/// value whether it belongs to the plant or to a delayed copy of it.
struct InputSignal {
    InputKind kind = InputKind::Zero;
    double amplitude = 1.0;
    double period = 1.0;

    static InputSignal zero() { return {}; }
    static InputSignal step(double amplitude) { return {InputKind::Step, amplitude, 1.0}; }
    static InputSignal square(double amplitude, double period);

    [[nodiscard]] double scalar(double t) const;
    [[nodiscard]] Vec operator()(double t, Index channels) const;
};

const char* to_string(InputKind k);

enum class StateHistory {
    Constant,      // x(theta) = x0
    FreeResponse,  // x(theta) = exp(A theta) x0
};

enum class ObserverHistory {
    Constant,   // w(theta) = w0
    ZeroError,  // w(theta) = F x(theta) - M y(theta)
};

struct CoupledHistory {
    Vec x0;
    Vec w0;  // ignored for ZeroError
    StateHistory x_mode = StateHistory::Constant;
    ObserverHistory w_mode = ObserverHistory::Constant;
};

struct CoupledTrajectory {
    std::vector<double> times;
    std::vector<Vec> x, w, y, z_hat, e;
    std::vector<Vec> u;
    std::vector<Vec> x_state_feedback;  // closed-loop mode only

    /// Largest ||e|| over samples with t >= t0.
    [[nodiscard]] double tail_error_norm(double t0) const;
};

/// Co-integrates the plant and the observer (single- or two-delay) from the
/// given histories, with u = 0 before t = 0. e = w + M y - F x.
CoupledTrajectory simulate_coupled(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                   const FunctionalObserver& obs, const InputSignal& input,
                                   const CoupledHistory& history, double t_end, double step);

/// Observer-based control u = K (w + M y) + r(t). `func` is the (possibly
/// augmented) functional the observer estimates; `gain` is the state-feedback
/// matrix it realizes. The pure state-feedback response to the same r and x0
/// is returned in x_state_feedback.
CoupledTrajectory simulate_closed_loop(const Plant& plant, const MeasurementModel& meas, const Mat& gain,
                                       const Functional& func, const FunctionalObserver& obs, const Mat& K,
                                       const InputSignal& reference, const CoupledHistory& history, double t_end,
                                       double step);

} // namespace tdc
