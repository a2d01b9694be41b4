#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spreadhawkes {

using Rng = std::mt19937_64;

/// Best-quote movements, in process order N_1..N_4.
enum class EventKind : std::uint8_t { AskUp = 0, AskDown = 1, BidUp = 2, BidDown = 3 };

inline constexpr std::array<EventKind, 4> kAllKinds{EventKind::AskUp, EventKind::AskDown,
                                                     EventKind::BidUp, EventKind::BidDown};

[[nodiscard]] constexpr std::size_t index_of(EventKind kind) { return static_cast<std::size_t>(kind); }

[[nodiscard]] constexpr EventKind kind_at(std::size_t index) { return kAllKinds.at(index); }

/// AskUp and BidDown widen the spread.
[[nodiscard]] constexpr bool is_widening(EventKind kind) {
    return kind == EventKind::AskUp || kind == EventKind::BidDown;
}

[[nodiscard]] constexpr bool is_narrowing(EventKind kind) { return !is_widening(kind); }

[[nodiscard]] constexpr bool moves_ask(EventKind kind) {
    return kind == EventKind::AskUp || kind == EventKind::AskDown;
}

[[nodiscard]] std::string_view to_string(EventKind kind);
[[nodiscard]] EventKind parse_event_kind(std::string_view text);

/// Thrown when a quote move would lock or cross the book.
class BookError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Level-one book snapshot. Prices are held as integer tick counts so that
/// spread arithmetic is exact; currency values are derived.
class MarketState {
public:
    MarketState() = default;
    MarketState(std::int64_t bid_ticks, std::int64_t ask_ticks, double tick);

    /// Rounds currency prices to the nearest tick.
    [[nodiscard]] static MarketState from_prices(double bid, double ask, double tick);

    [[nodiscard]] std::int64_t bid_ticks() const { return bid_ticks_; }
    [[nodiscard]] std::int64_t ask_ticks() const { return ask_ticks_; }
    [[nodiscard]] double tick() const { return tick_; }

    [[nodiscard]] double bid() const { return static_cast<double>(bid_ticks_) * tick_; }
    [[nodiscard]] double ask() const { return static_cast<double>(ask_ticks_) * tick_; }
    [[nodiscard]] double mid() const { return 0.5 * static_cast<double>(bid_ticks_ + ask_ticks_) * tick_; }

    /// Ticks above the one-tick minimum spread.
    [[nodiscard]] std::int64_t level() const { return ask_ticks_ - bid_ticks_ - 1; }

    /// L / p with p in currency units.
    [[nodiscard]] double relative_level() const { return static_cast<double>(level()) / mid(); }

    friend bool operator==(const MarketState&, const MarketState&) = default;

private:
    std::int64_t bid_ticks_{0};
    std::int64_t ask_ticks_{1};
    double tick_{0.01};
};

struct EventRecord {
    double t{0.0};
    EventKind kind{EventKind::AskUp};
    std::int64_t delta{1};
    MarketState state_after;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventStream {
    double session_start{0.0};
    double session_end{0.0};
    double tick{0.01};
    MarketState initial_state;
    std::vector<EventRecord> events;

    [[nodiscard]] double duration() const { return session_end - session_start; }
    [[nodiscard]] std::array<std::size_t, 4> counts() const;
    /// State prevailing at time t (after all events at or before t).
    [[nodiscard]] MarketState state_at(double t) const;

    friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Moves one side of the book by delta ticks. Throws BookError if the result
/// would be locked or crossed, std::invalid_argument on a non-positive delta.
[[nodiscard]] MarketState apply_event(const MarketState& state, EventKind kind, std::int64_t delta);

struct QuoteStep {
    EventKind kind;
    std::int64_t delta;
    friend bool operator==(const QuoteStep&, const QuoteStep&) = default;
};

enum class SplitOrder : std::uint8_t { Single, Forced, Random };

struct Transition {
    std::vector<QuoteStep> steps;
    SplitOrder order{SplitOrder::Single};
};

/// Decomposes a quote change into one or two single-side events. When both
/// sides move, the order avoids an intermediate locked/crossed book; if either
/// order is valid a fair coin from rng decides.
[[nodiscard]] Transition classify_transition(const MarketState& prev, const MarketState& next, Rng& rng);

/// Checks ordering, window bounds and replay consistency. Throws
/// std::invalid_argument with the offending index.
void validate(const EventStream& stream);

/// Appends b to a; b must start where a ends, from a's final state.
[[nodiscard]] EventStream concatenate(const EventStream& a, const EventStream& b);

/// Moves the time origin of every timestamp by offset.
[[nodiscard]] EventStream shift_time(const EventStream& stream, double offset);

}  // namespace spreadhawkes
