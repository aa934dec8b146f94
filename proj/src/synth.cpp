#include "spenra/synth.hpp"

#include "spenra/ckde.hpp"
#include "spenra/entropy.hpp"
#include "spenra/error.hpp"
#include "spenra/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spenra {

// ---------------------------------------------------------------------------
// Second-order Markov benchmark

void Markov2Params::validate() const {
    auto prob = [](double x) { return x > 0.0 && x < 1.0; };
    if (!prob(p_plus) || !prob(p_minus)) {
        throw Error(ErrorCode::InvalidArgument, "Markov probabilities must lie in (0, 1)");
    }
    if (!(sigma_run > 0.0) || !(sigma_cross > 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::InvalidArgument, "Markov sigmas must be positive and mu finite");
    }
}

Markov2State markov2_state(double older, double newer) noexcept {
    if (older > 0.0 && newer > 0.0) return Markov2State::SameSignPositive;
    if (older < 0.0 && newer < 0.0) return Markov2State::SameSignNegative;
    return Markov2State::Mixed;
}

Series gen_markov2(const Markov2Params& params, std::size_t length, std::uint64_t seed, std::array<double, 2> init) {
    params.validate();
    if (length == 0) throw Error(ErrorCode::TooShort, "length must be >= 1");
    std::mt19937_64 rng(derive_seed(seed, 0x6d61726b6f7632ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> x;
    x.reserve(length);
    x.push_back(init[0]);
    if (length > 1) x.push_back(init[1]);
    while (x.size() < length) {
        const double older = x[x.size() - 2];
        const double newer = x.back();
        const double u = unit(rng);
        const double z = normal(rng);
        double next = 0.0;
        switch (markov2_state(older, newer)) {
            case Markov2State::SameSignPositive:
                next = (u < params.p_plus ? params.mu : -params.mu) + params.sigma_run * z;
                break;
            case Markov2State::SameSignNegative:
                next = (u < params.p_minus ? -params.mu : params.mu) + params.sigma_run * z;
                break;
            case Markov2State::Mixed:
                next = params.sigma_cross * z;
                break;
        }
        x.push_back(next);
    }
    return Series(std::move(x), std::nullopt, "markov2");
}

double markov2_true_specific_entropy(const Markov2Params& params, std::span<const double> past) {
    params.validate();
    if (past.size() != 2) throw Error(ErrorCode::InvalidArgument, "Markov past must have two values");
    if (past[0] == 0.0 || past[1] == 0.0) {
        throw Error(ErrorCode::AmbiguousState, "sign of a zero past value is undefined");
    }
    switch (markov2_state(past[0], past[1])) {
        case Markov2State::SameSignPositive:
            return mixture_entropy(PredictiveSlice({params.p_plus, 1.0 - params.p_plus}, {params.mu, -params.mu},
                                                   params.sigma_run),
                                   1e-10);
        case Markov2State::SameSignNegative:
            return mixture_entropy(PredictiveSlice({params.p_minus, 1.0 - params.p_minus}, {-params.mu, params.mu},
                                                   params.sigma_run),
                                   1e-10);
        case Markov2State::Mixed:
            break;
    }
    return mixture_entropy(PredictiveSlice({1.0}, {0.0}, params.sigma_cross), 1e-10);
}

// ---------------------------------------------------------------------------
// Flows

OdeSpec OdeSpec::lorenz() { return {}; }

OdeSpec OdeSpec::rossler() {
    OdeSpec spec;
    spec.system = OdeSystem::Rossler;
    spec.parameters = {0.1, 0.1, 14.0};
    return spec;
}

void OdeSpec::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) {
        throw Error(ErrorCode::InvalidArgument, "burn-in must be nonnegative");
    }
    for (double v : parameters) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "ODE parameters must be finite");
    }
    for (double v : initial_state) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
    }
}

State3 ode_rhs(const OdeSpec& spec, const State3& x) noexcept {
    const auto& c = spec.parameters;
    if (spec.system == OdeSystem::Lorenz) {
        return {c[0] * (x[1] - x[0]), x[0] * (c[2] - x[2]) - x[1], x[0] * x[1] - c[1] * x[2]};
    }
    return {-x[1] - x[2], x[0] + c[0] * x[1], c[1] + x[2] * (x[0] - c[2])};
}

State3 rk4_step(const OdeSpec& spec, const State3& x, double dt) noexcept {
    auto axpy = [](const State3& a, double h, const State3& d) {
        return State3{a[0] + h * d[0], a[1] + h * d[1], a[2] + h * d[2]};
    };
    const State3 k1 = ode_rhs(spec, x);
    const State3 k2 = ode_rhs(spec, axpy(x, 0.5 * dt, k1));
    const State3 k3 = ode_rhs(spec, axpy(x, 0.5 * dt, k2));
    const State3 k4 = ode_rhs(spec, axpy(x, dt, k3));
    State3 out;
    for (std::size_t i = 0; i < 3; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

namespace {

void check_finite(const State3& x, double time) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
        throw Error(ErrorCode::NonFiniteState, "trajectory diverged near t=" + std::to_string(time));
    }
}

State3 burn_in_state(const OdeSpec& spec) {
    spec.validate();
    State3 x = spec.initial_state;
    const auto steps = static_cast<std::size_t>(std::llround(spec.burn_in / spec.dt));
    for (std::size_t i = 0; i < steps; ++i) {
        x = rk4_step(spec, x, spec.dt);
        check_finite(x, -spec.burn_in + static_cast<double>(i + 1) * spec.dt);
    }
    return x;
}

}  // namespace

Trajectory integrate_ode(const OdeSpec& spec, double duration) {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw Error(ErrorCode::InvalidArgument, "duration must be positive");
    }
    State3 x = burn_in_state(spec);
    const auto steps = static_cast<std::size_t>(std::ceil(duration / spec.dt - 1e-9));
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (std::size_t i = 1; i <= steps; ++i) {
        x = rk4_step(spec, x, spec.dt);
        const double t = static_cast<double>(i) * spec.dt;
        check_finite(x, t);
        traj.times.push_back(t);
        traj.states.push_back(x);
    }
    return traj;
}

double fire_signal(FireSignal signal, const State3& x) noexcept {
    switch (signal) {
        case FireSignal::ShiftedSquareX:
            break;
    }
    const double s = x[0] + 2.0;
    return s * s;
}

void FireParams::validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
    if (max_events == 0) throw Error(ErrorCode::InvalidArgument, "max_events must be positive");
}

IntegrateAndFire::IntegrateAndFire(double theta) : theta_(theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
}

void IntegrateAndFire::push(double time, double signal) {
    if (!(signal >= 0.0)) throw Error(ErrorCode::InvalidArgument, "integrate-and-fire signal must be nonnegative");
    if (!last_time_) {
        last_time_ = time;
        last_signal_ = signal;
        return;
    }
    const double t0 = *last_time_;
    const double h = time - t0;
    const double increment = 0.5 * h * (last_signal_ + signal);
    double start = accumulated_;  // integral since the last event, at t0
    double end = start + increment;
    while (end >= theta_) {
        const double fraction = (theta_ - start) / increment;
        events_.push_back(t0 + fraction * h);
        start -= theta_;
        end -= theta_;
    }
    accumulated_ = end;
    last_time_ = time;
    last_signal_ = signal;
}

namespace {

Series intervals_from_events(const std::vector<double>& events, double origin, std::string label) {
    std::vector<double> iei(events.size());
    double previous = origin;
    for (std::size_t i = 0; i < events.size(); ++i) {
        iei[i] = events[i] - previous;
        previous = events[i];
    }
    return Series(std::move(iei), events, std::move(label));
}

}  // namespace

Series integrate_and_fire(const Trajectory& trajectory, const FireParams& fire, FireSignal signal) {
    fire.validate();
    if (trajectory.times.empty() || trajectory.times.size() != trajectory.states.size()) {
        throw Error(ErrorCode::InvalidArgument, "trajectory is empty or malformed");
    }
    IntegrateAndFire accumulator(fire.theta);
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        accumulator.push(trajectory.times[i], fire_signal(signal, trajectory.states[i]));
        if (accumulator.event_times().size() >= fire.max_events) break;
    }
    auto events = accumulator.event_times();
    if (events.empty()) throw Error(ErrorCode::NoEvents, "integrated signal never reached theta");
    if (events.size() > fire.max_events) events.resize(fire.max_events);
    return intervals_from_events(events, trajectory.times.front(), "iei");
}

Series simulate_iei(const OdeSpec& spec, const FireParams& fire, FireSignal signal) {
    fire.validate();
    constexpr std::size_t kMaxQuietSteps = 10'000'000;
    State3 x = burn_in_state(spec);
    IntegrateAndFire accumulator(fire.theta);
    accumulator.push(0.0, fire_signal(signal, x));
    std::size_t step = 0;
    std::size_t last_event_step = 0;
    std::size_t seen = 0;
    while (accumulator.event_times().size() < fire.max_events) {
        ++step;
        x = rk4_step(spec, x, spec.dt);
        const double t = static_cast<double>(step) * spec.dt;
        check_finite(x, t);
        accumulator.push(t, fire_signal(signal, x));
        if (accumulator.event_times().size() > seen) {
            seen = accumulator.event_times().size();
            last_event_step = step;
        } else if (step - last_event_step > kMaxQuietSteps) {
            throw Error(ErrorCode::NoEvents, "no threshold crossing within " + std::to_string(kMaxQuietSteps) +
                                                 " steps");
        }
    }
    auto events = accumulator.event_times();
    events.resize(fire.max_events);
    return intervals_from_events(events, 0.0, std::string(system_name(spec.system)) + "-iei");
}

double default_theta(OdeSystem system) noexcept { return system == OdeSystem::Lorenz ? 60.0 : 125.0; }

std::string_view system_name(OdeSystem system) noexcept { return system == OdeSystem::Lorenz ? "lorenz" : "rossler"; }

Series benchmark_iei(OdeSystem system, std::size_t events, std::uint64_t seed, std::optional<double> theta,
                     std::optional<double> dt, std::optional<double> burn_in) {
    OdeSpec spec = system == OdeSystem::Lorenz ? OdeSpec::lorenz() : OdeSpec::rossler();
    std::mt19937_64 rng(derive_seed(seed, system == OdeSystem::Lorenz ? 0x4c4f52ULL : 0x524f53ULL));
    std::uniform_real_distribution<double> offset(-1.0, 1.0);
    for (auto& v : spec.initial_state) v += offset(rng);
    if (dt) spec.dt = *dt;
    if (burn_in) spec.burn_in = *burn_in;
    return simulate_iei(spec, FireParams{theta.value_or(default_theta(system)), events});
}

Series concatenate(std::span<const Series> parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to concatenate");
    std::vector<double> values;
    std::string names;
    std::string bounds;
    for (const auto& part : parts) {
        if (!values.empty()) {
            bounds += (bounds.empty() ? "" : ",") + std::to_string(values.size());
            names += '+';
        }
        names += part.label().empty() ? "series" : part.label();
        values.insert(values.end(), part.values().begin(), part.values().end());
    }
    std::vector<double> times(values.size());
    double clock = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        clock += values[i];
        times[i] = clock;
    }
    std::string label = names + "|boundaries=" + bounds;
    if (std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; })) {
        return Series(std::move(values), std::move(times), std::move(label));
    }
    // Cumulative sums are only valid event times for positive intervals.
    return Series(std::move(values), std::nullopt, std::move(label));
}

Series benchmark_concatenated(std::size_t events_per_segment, std::uint64_t seed) {
    const std::array<Series, 3> parts{
        benchmark_iei(OdeSystem::Lorenz, events_per_segment, derive_seed(seed, 1)),
        benchmark_iei(OdeSystem::Rossler, events_per_segment, derive_seed(seed, 2)),
        benchmark_iei(OdeSystem::Lorenz, events_per_segment, derive_seed(seed, 3)),
    };
    return concatenate(parts);
}

}  // namespace spenra
