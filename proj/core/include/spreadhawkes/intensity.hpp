#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spreadhawkes/market.hpp"
#include "spreadhawkes/params.hpp"

namespace spreadhawkes {

using Rates = std::array<double, 4>;

/// How a spread-narrowing event acts on the narrowing intensities.
enum class NarrowingRule : std::uint8_t {
    Additive,           // constant kernel entries (basic Hawkes)
    ResetLinear,        // excitement reset to xi * ell(tau+)
    ResetAtMinimumOnly  // reset to zero if ell(tau+) == 0, otherwise add xi
};

/// Parameters compiled into the per-target/per-source tables used by the
/// sequential recursion. Excitement is held in up to four accumulators per
/// target ("groups"), one per distinct decay rate acting on that target.
struct Kernel {
    ModelVariant variant{ModelVariant::Proposed};
    Rates base_const{};
    Rates base_slope{};
    bool indicator_base{false};  // f(ell) = slope * 1{ell > 0} instead of slope * ell
    Matrix4 alpha{};             // alpha[target][source]
    Matrix4 xi{};                // reset slopes, narrowing targets/sources only
    NarrowingRule narrowing{NarrowingRule::ResetLinear};

    std::size_t groups{1};
    std::array<std::array<std::uint8_t, 4>, 4> group_of{};  // [target][source]
    Matrix4 group_rate{};                                   // [target][group]
    bool single_rate{true};                                 // one decay rate everywhere

    [[nodiscard]] static Kernel compile(const ParamSet& params, ModelVariant variant);

    [[nodiscard]] double base(std::size_t target, double ell) const {
        const double f = indicator_base ? (ell > 0.0 ? 1.0 : 0.0) : ell;
        return base_const[target] + base_slope[target] * f;
    }
};

/// Markov state of the model: time, excitement accumulators and the book.
class IntensityState {
public:
    IntensityState(const Kernel& kernel, const MarketState& state, double t0);

    [[nodiscard]] double time() const { return t_; }
    [[nodiscard]] const MarketState& market() const { return market_; }
    [[nodiscard]] const Kernel& kernel() const { return kernel_; }

    /// Total excitement of target i at the current time (right limit after the last event).
    [[nodiscard]] double excitement(std::size_t target) const;
    [[nodiscard]] Rates excitements() const;

    /// Left-continuous intensities at t >= time(), assuming no events in between.
    [[nodiscard]] Rates intensity_at(double t) const;

    /// Integrals of the intensities over (t0, t1], time() <= t0 <= t1, no events in between.
    [[nodiscard]] Rates compensator(double t0, double t1) const;

    /// Decays the accumulators to t.
    void advance(double t);

    /// Returns the compensators over (time(), t] and decays to t. Afterwards
    /// intensity_now() is the left limit at t.
    [[nodiscard]] Rates integrate_to(double t);

    /// base + excitement at time(), i.e. the left limit if no event has been applied at time().
    [[nodiscard]] Rates intensity_now() const;

    /// Decays to t, applies the kernel jumps of the event and updates the book.
    void on_event(double t, EventKind kind, std::int64_t delta);

    /// As on_event but with a known post-event book (used in replay).
    void on_event(double t, EventKind kind, const MarketState& after);

private:
    void apply_kernel(EventKind kind);

    Kernel kernel_;
    MarketState market_;
    double t_;
    Matrix4 acc_{};  // [target][group]
};

struct ReplayResult {
    std::vector<double> own_intensity;        // lambda_{kind_j}(t_j), left limit
    std::vector<Rates> interval_compensator;  // over (t_{j-1}, t_j]
    Rates tail_compensator{};                 // over (t_n, session_end]
};

/// Internal-consistency failure: an intensity evaluated negative.
class NegativeIntensityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Sequential sweep over a stream. visit(j, own_intensity, intensities, compensators)
/// is called for every event before its jumps are applied; visit_tail(compensators)
/// once for (t_n, session_end].
template <typename Visit, typename VisitTail>
void sweep(const EventStream& stream, const Kernel& kernel, Visit&& visit, VisitTail&& visit_tail) {
    IntensityState state(kernel, stream.initial_state, stream.session_start);
    for (std::size_t j = 0; j < stream.events.size(); ++j) {
        const auto& e = stream.events[j];
        const Rates comp = state.integrate_to(e.t);
        const Rates lambda = state.intensity_now();
        visit(j, lambda[index_of(e.kind)], lambda, comp);
        state.on_event(e.t, e.kind, e.state_after);
    }
    visit_tail(state.integrate_to(stream.session_end));
}

[[nodiscard]] ReplayResult replay(const EventStream& stream, const ParamSet& params, ModelVariant variant);

}  // namespace spreadhawkes
