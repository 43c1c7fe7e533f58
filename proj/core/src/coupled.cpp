#include "tdc/coupled.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "tdc/errors.hpp"
#include "tdc/synthesis.hpp"

namespace tdc {

InputSignal InputSignal::square(double amplitude, double period) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidInput, "square input: period must be positive");
    return {InputKind::Square, amplitude, period};
}

double InputSignal::scalar(double t) const {
    // snap to 1e-12 so that t and a delayed copy of it that differ only by
    // rounding fall on the same side of a jump
    t = std::round(t * 1e12) * 1e-12;
    if (t <= 0.0) return 0.0;
    switch (kind) {
        case InputKind::Zero: return 0.0;
        case InputKind::Step: return amplitude;
        case InputKind::Square: {
            const double phase = std::fmod(t, period);
            return (phase > 0.0 && phase <= 0.5 * period) ? amplitude : -amplitude;
        }
    }
    return 0.0;
}

Vec InputSignal::operator()(double t, Index channels) const { return Vec::Constant(channels, scalar(t)); }

const char* to_string(InputKind k) {
    switch (k) {
        case InputKind::Zero: return "zero";
        case InputKind::Step: return "step";
        case InputKind::Square: return "square";
    }
    return "unknown";
}

double CoupledTrajectory::tail_error_norm(double t0) const {
    double worst = 0.0;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t0) worst = std::max(worst, e[k].norm());
    }
    return worst;
}

namespace {

History state_history(const Plant& plant, const CoupledHistory& h) {
    if (h.x0.size() != plant.n()) throw Error(ErrorKind::Dimension, "history: x0 has wrong size");
    if (!all_finite(h.x0)) throw Error(ErrorKind::InvalidInput, "history: x0 not finite");
    if (h.x_mode == StateHistory::Constant) return constant_history(h.x0);
    const Mat A = plant.A;
    const Vec x0 = h.x0;
    return [A, x0](double theta) -> Vec { return Mat((A * theta).exp()) * x0; };
}

// y(t) = C_tau x(t - tau) [+ C_h x(t - h)]
Vec measure(const MeasurementModel& meas, const std::function<Vec(double)>& x_at, double t) {
    if (!meas.is_two_delay()) {
        const auto& s = meas.as_single();
        return s.c_tau * x_at(t - s.tau);
    }
    const auto& td = meas.as_two_delay();
    return td.c_tau * x_at(t - td.tau) + td.c_h * x_at(t - td.h);
}

History observer_history(const MeasurementModel& meas, const Functional& func, const FunctionalObserver& obs,
                         const CoupledHistory& h, const History& xh) {
    const Index q = obs.order();
    if (h.w_mode == ObserverHistory::Constant) {
        if (h.w0.size() != q) throw Error(ErrorKind::Dimension, "history: w0 has wrong size");
        return constant_history(h.w0);
    }
    const Mat F = func.F;
    const Mat M = obs.M;
    return [meas, F, M, xh](double theta) -> Vec { return F * xh(theta) - M * measure(meas, xh, theta); };
}

void check_observer(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                    const FunctionalObserver& obs) {
    if (meas.n() != plant.n() || func.F.cols() != plant.n()) {
        throw Error(ErrorKind::Dimension, "simulation: plant, measurement and functional sizes differ");
    }
    if (obs.two_delay() != meas.is_two_delay()) {
        throw Error(ErrorKind::Configuration, "simulation: observer and measurement variants differ");
    }
    obs.validate(func.m(), meas.p(), plant.r());
}

struct Sampled {
    Trajectory traj;
    History hist;
    Index n = 0;
    Index q = 0;

    [[nodiscard]] Vec x_at(double t) const {
        return (t < 0.0 ? hist(t) : traj.interpolate(t)).head(n);
    }
};

void fill_outputs(const Sampled& s, const MeasurementModel& meas, const Functional& func,
                  const FunctionalObserver& obs, CoupledTrajectory& out) {
    const auto x_at = [&s](double t) { return s.x_at(t); };
    out.times = s.traj.times;
    const size_t count = s.traj.times.size();
    out.x.reserve(count);
    out.w.reserve(count);
    out.y.reserve(count);
    out.z_hat.reserve(count);
    out.e.reserve(count);
    for (size_t k = 0; k < count; ++k) {
        const double t = s.traj.times[k];
        const Vec& state = s.traj.states[k];
        Vec x = state.head(s.n);
        Vec w = state.tail(s.q);
        Vec y = measure(meas, x_at, t);
        Vec z = w + obs.M * y;
        out.e.push_back(z - func.F * x);
        out.x.push_back(std::move(x));
        out.w.push_back(std::move(w));
        out.y.push_back(std::move(y));
        out.z_hat.push_back(std::move(z));
    }
}

} // namespace

CoupledTrajectory simulate_coupled(const Plant& plant, const MeasurementModel& meas, const Functional& func,
                                   const FunctionalObserver& obs, const InputSignal& input,
                                   const CoupledHistory& history, double t_end, double step) {
    check_observer(plant, meas, func, obs);
    const Index n = plant.n();
    const Index q = obs.order();
    const Index r = plant.r();

    auto lower = [&](const Mat& left, const Mat& right) {
        Mat blk = Mat::Zero(n + q, n + q);
        blk.bottomLeftCorner(q, n) = left;
        blk.bottomRightCorner(q, q) = right;
        return blk;
    };
    Mat a0 = Mat::Zero(n + q, n + q);
    a0.topLeftCorner(n, n) = plant.A;
    a0.bottomRightCorner(q, q) = obs.N;
    const Mat zq = Mat::Zero(q, q);

    std::vector<DelayTerm> terms;
    const double tau = obs.tau;
    const Mat& Ct = meas.c_tau();
    terms.push_back({lower(obs.G * Ct, obs.N_tau), tau});
    terms.push_back({lower(obs.G_tau * Ct, zq), 2.0 * tau});
    if (obs.two_delay()) {
        const auto& td = meas.as_two_delay();
        const double h = td.h;
        terms.push_back({lower(obs.G * td.c_h, *obs.N_h), h});
        terms.push_back({lower(obs.G_tau * td.c_h + *obs.G_h * Ct, zq), tau + h});
        terms.push_back({lower(*obs.G_h * td.c_h, zq), 2.0 * h});
    }

    const Mat B = plant.B;
    const Mat J = obs.J;
    const Mat Jt = obs.J_tau;
    const std::optional<Mat> Jh = obs.J_h;
    const std::optional<double> h = obs.h;
    Forcing forcing = [=](double t) -> Vec {
        Vec f(n + q);
        const Vec u = input(t, r);
        f.head(n) = B * u;
        Vec fw = J * u + Jt * input(t - tau, r);
        if (Jh) fw += *Jh * input(t - *h, r);
        f.tail(q) = fw;
        return f;
    };
    const DdeSystem sys = DdeSystem::merged(a0, std::move(terms), std::move(forcing));

    const History xh = state_history(plant, history);
    const History wh = observer_history(meas, func, obs, history, xh);
    Sampled s;
    s.n = n;
    s.q = q;
    s.hist = [xh, wh, n, q](double theta) -> Vec {
        Vec v(n + q);
        v << xh(theta), wh(theta);
        return v;
    };
    s.traj = simulate(sys, s.hist, t_end, step);

    CoupledTrajectory out;
    fill_outputs(s, meas, func, obs, out);
    out.u.reserve(out.times.size());
    for (double t : out.times) out.u.push_back(input(t, r));
    return out;
}

CoupledTrajectory simulate_closed_loop(const Plant& plant, const MeasurementModel& meas, const Mat& gain,
                                       const Functional& func, const FunctionalObserver& obs, const Mat& K,
                                       const InputSignal& reference, const CoupledHistory& history, double t_end,
                                       double step) {
    check_observer(plant, meas, func, obs);
    const Index n = plant.n();
    const Index q = obs.order();
    const Index r = plant.r();
    const auto loops = closed_loop_systems(plant, meas, gain, obs, K);

    const Mat B = plant.B;
    const Mat J = obs.J;
    const Mat Jt = obs.J_tau;
    const double tau = obs.tau;
    Forcing forcing = [=](double t) -> Vec {
        Vec f(n + q);
        f.head(n) = B * reference(t, r);
        f.tail(q) = J * reference(t, r) + Jt * reference(t - tau, r);
        return f;
    };
    const auto& base = loops.state_observer;
    const DdeSystem sys(base.a0(), base.delayed(), std::move(forcing));

    const History xh = state_history(plant, history);
    const History wh = observer_history(meas, func, obs, history, xh);
    Sampled s;
    s.n = n;
    s.q = q;
    s.hist = [xh, wh, n, q](double theta) -> Vec {
        Vec v(n + q);
        v << xh(theta), wh(theta);
        return v;
    };
    s.traj = simulate(sys, s.hist, t_end, step);

    CoupledTrajectory out;
    fill_outputs(s, meas, func, obs, out);
    out.u.reserve(out.times.size());
    for (size_t k = 0; k < out.times.size(); ++k) {
        out.u.push_back(K * out.z_hat[k] + reference(out.times[k], r));
    }

    const DdeSystem sf(plant.A + plant.B * gain, {}, [B, reference, r](double t) -> Vec {
        return B * reference(t, r);
    });
    const Trajectory ref = simulate(sf, constant_history(history.x0), t_end, step);
    out.x_state_feedback = ref.states;
    return out;
}

} // namespace tdc
