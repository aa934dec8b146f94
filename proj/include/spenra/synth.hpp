#pragma once

#include "spenra/series.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spenra {

// ---------------------------------------------------------------------------
// Second-order Markov benchmark

/// Transition density
///   both past values > 0:  p_plus  N(mu, s_run^2) + (1 - p_plus)  N(-mu, s_run^2)
///   both past values < 0:  p_minus N(-mu, s_run^2) + (1 - p_minus) N(mu, s_run^2)
///   otherwise:             N(0, s_cross^2)
struct Markov2Params {
    double p_plus = 0.1;
    double p_minus = 0.1;
    double mu = 5.0;
    double sigma_run = 1.0;
    double sigma_cross = 3.0;

    void validate() const;
};

enum class Markov2State { SameSignPositive, SameSignNegative, Mixed };

/// Quadrant of a past (x_{t-2}, x_{t-1}); a zero value counts as mixed.
[[nodiscard]] Markov2State markov2_state(double older, double newer) noexcept;

/// Length-T realization whose first two values are `init`. Deterministic in seed.
[[nodiscard]] Series gen_markov2(const Markov2Params& params, std::size_t length, std::uint64_t seed,
                                 std::array<double, 2> init = {1.0, 1.0});

/// Exact specific entropy rate of the transition density for a given past
/// (oldest first), by quadrature. Throws AmbiguousState if either value is 0.
[[nodiscard]] double markov2_true_specific_entropy(const Markov2Params& params, std::span<const double> past);

// ---------------------------------------------------------------------------
// Chaotic flows and integrate-and-fire events

enum class OdeSystem { Lorenz, Rossler };

struct OdeSpec {
    OdeSystem system = OdeSystem::Lorenz;
    /// (sigma, beta, rho) for Lorenz, (a, b, c) for Rossler.
    std::array<double, 3> parameters{10.0, 8.0 / 3.0, 28.0};
    std::array<double, 3> initial_state{1.0, 1.0, 1.0};
    double dt = 0.01;
    double burn_in = 100.0;

    [[nodiscard]] static OdeSpec lorenz();
    [[nodiscard]] static OdeSpec rossler();
    void validate() const;
};

using State3 = std::array<double, 3>;

struct Trajectory {
    std::vector<double> times;  ///< start at 0 after burn-in
    std::vector<State3> states;
};

/// Fixed-step classical RK4. The burn-in segment is integrated and discarded;
/// returned times run from 0 to `duration`. Throws NonFiniteState on blow-up.
[[nodiscard]] Trajectory integrate_ode(const OdeSpec& spec, double duration);

/// Derivative of the flow at a state.
[[nodiscard]] State3 ode_rhs(const OdeSpec& spec, const State3& x) noexcept;
/// One RK4 step of size dt.
[[nodiscard]] State3 rk4_step(const OdeSpec& spec, const State3& x, double dt) noexcept;

enum class FireSignal { ShiftedSquareX };  ///< S(t) = (x(t) + 2)^2

[[nodiscard]] double fire_signal(FireSignal signal, const State3& x) noexcept;

struct FireParams {
    double theta = 60.0;
    std::size_t max_events = 1000;

    void validate() const;
};

/// Streaming integrate-and-fire accumulator over a sampled nonnegative signal.
/// The running integral is accumulated by the trapezoid rule; a crossing of
/// theta inside a step is located by linear interpolation of the integral.
class IntegrateAndFire {
public:
    explicit IntegrateAndFire(double theta);

    /// Feed the next sample; the first call only sets the starting point.
    void push(double time, double signal);
    [[nodiscard]] const std::vector<double>& event_times() const noexcept { return events_; }

private:
    double theta_;
    double accumulated_ = 0.0;
    std::optional<double> last_time_;
    double last_signal_ = 0.0;
    std::vector<double> events_;
};

/// Interevent intervals of the integrate-and-fire model run over an existing
/// trajectory, with timestamps T_i (T_0 = trajectory start). Stops after
/// max_events. Throws NoEvents if theta is never reached.
[[nodiscard]] Series integrate_and_fire(const Trajectory& trajectory, const FireParams& fire,
                                        FireSignal signal = FireSignal::ShiftedSquareX);

/// Integrates the flow just long enough to emit fire.max_events events.
[[nodiscard]] Series simulate_iei(const OdeSpec& spec, const FireParams& fire,
                                  FireSignal signal = FireSignal::ShiftedSquareX);

/// Benchmark IEI series: default flow with the initial state offset by a
/// seeded uniform draw in [-1, 1]^3 and the default threshold
/// (Lorenz 60, Rossler 125) unless theta is given.
[[nodiscard]] Series benchmark_iei(OdeSystem system, std::size_t events, std::uint64_t seed,
                                   std::optional<double> theta = std::nullopt, std::optional<double> dt = std::nullopt,
                                   std::optional<double> burn_in = std::nullopt);

[[nodiscard]] double default_theta(OdeSystem system) noexcept;
[[nodiscard]] std::string_view system_name(OdeSystem system) noexcept;

/// Concatenates values in order; timestamps are rebuilt as cumulative sums
/// of the values from 0 and the segment boundaries are recorded in the label.
[[nodiscard]] Series concatenate(std::span<const Series> parts);

/// Lorenz, Rossler, Lorenz segments of `events_per_segment` each, seeded
/// independently from `seed`.
[[nodiscard]] Series benchmark_concatenated(std::size_t events_per_segment, std::uint64_t seed);

}  // namespace spenra
