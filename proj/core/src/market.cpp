#include "spreadhawkes/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spreadhawkes {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::AskUp: return "ask_up";
        case EventKind::AskDown: return "ask_down";
        case EventKind::BidUp: return "bid_up";
        case EventKind::BidDown: return "bid_down";
    }
    return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
    for (auto kind : kAllKinds) {
        if (to_string(kind) == text) return kind;
    }
    throw std::invalid_argument("unknown event kind '" + std::string(text) + "'");
}

MarketState::MarketState(std::int64_t bid_ticks, std::int64_t ask_ticks, double tick)
    : bid_ticks_(bid_ticks), ask_ticks_(ask_ticks), tick_(tick) {
    if (!(tick > 0.0) || !std::isfinite(tick)) throw std::invalid_argument("tick size must be positive");
    if (ask_ticks <= bid_ticks) {
        std::ostringstream os;
        os << "locked or crossed book: bid " << bid() << " ask " << ask();
        throw BookError(os.str());
    }
    if (bid_ticks + ask_ticks <= 0) throw BookError("mid-price must be positive");
}

MarketState MarketState::from_prices(double bid, double ask, double tick) {
    if (!(tick > 0.0)) throw std::invalid_argument("tick size must be positive");
    return MarketState(std::llround(bid / tick), std::llround(ask / tick), tick);
}

std::array<std::size_t, 4> EventStream::counts() const {
    std::array<std::size_t, 4> n{};
    for (const auto& e : events) ++n[index_of(e.kind)];
    return n;
}

MarketState EventStream::state_at(double t) const {
    auto it = std::upper_bound(events.begin(), events.end(), t,
                               [](double value, const EventRecord& e) { return value < e.t; });
    if (it == events.begin()) return initial_state;
    return std::prev(it)->state_after;
}

MarketState apply_event(const MarketState& state, EventKind kind, std::int64_t delta) {
    if (delta <= 0) throw std::invalid_argument("jump size must be a positive number of ticks");
    std::int64_t bid = state.bid_ticks();
    std::int64_t ask = state.ask_ticks();
    switch (kind) {
        case EventKind::AskUp: ask += delta; break;
        case EventKind::AskDown: ask -= delta; break;
        case EventKind::BidUp: bid += delta; break;
        case EventKind::BidDown: bid -= delta; break;
    }
    return MarketState(bid, ask, state.tick());
}

Transition classify_transition(const MarketState& prev, const MarketState& next, Rng& rng) {
    const auto bid_move = next.bid_ticks() - prev.bid_ticks();
    const auto ask_move = next.ask_ticks() - prev.ask_ticks();
    if (bid_move == 0 && ask_move == 0) throw std::invalid_argument("transition without a quote change");

    const auto ask_step = QuoteStep{ask_move > 0 ? EventKind::AskUp : EventKind::AskDown, std::abs(ask_move)};
    const auto bid_step = QuoteStep{bid_move > 0 ? EventKind::BidUp : EventKind::BidDown, std::abs(bid_move)};
    if (bid_move == 0) return {{ask_step}, SplitOrder::Single};
    if (ask_move == 0) return {{bid_step}, SplitOrder::Single};

    // Intermediate books for each ordering.
    const bool ask_first_ok = next.ask_ticks() > prev.bid_ticks();
    const bool bid_first_ok = next.bid_ticks() < prev.ask_ticks();
    if (ask_first_ok && !bid_first_ok) return {{ask_step, bid_step}, SplitOrder::Forced};
    if (bid_first_ok && !ask_first_ok) return {{bid_step, ask_step}, SplitOrder::Forced};

    std::bernoulli_distribution coin(0.5);
    if (coin(rng)) return {{ask_step, bid_step}, SplitOrder::Random};
    return {{bid_step, ask_step}, SplitOrder::Random};
}

void validate(const EventStream& stream) {
    auto fail = [](std::size_t i, const std::string& what) {
        throw std::invalid_argument("event " + std::to_string(i) + ": " + what);
    };
    if (!(stream.session_end >= stream.session_start)) throw std::invalid_argument("session ends before it starts");
    MarketState state = stream.initial_state;
    double last = stream.session_start;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const auto& e = stream.events[i];
        if (!(e.t > last)) fail(i, "times must be strictly increasing within the session");
        if (e.t > stream.session_end) fail(i, "event after session end");
        try {
            state = apply_event(state, e.kind, e.delta);
        } catch (const std::exception& ex) {
            fail(i, ex.what());
        }
        if (!(state == e.state_after)) fail(i, "state_after does not match replay");
        last = e.t;
    }
}

EventStream concatenate(const EventStream& a, const EventStream& b) {
    const MarketState end_state = a.events.empty() ? a.initial_state : a.events.back().state_after;
    if (!(end_state == b.initial_state)) throw std::invalid_argument("streams do not join: state mismatch");
    if (a.session_end != b.session_start) throw std::invalid_argument("streams do not join: time gap");
    EventStream out = a;
    out.session_end = b.session_end;
    out.events.insert(out.events.end(), b.events.begin(), b.events.end());
    return out;
}

EventStream shift_time(const EventStream& stream, double offset) {
    EventStream out = stream;
    out.session_start += offset;
    out.session_end += offset;
    for (auto& e : out.events) e.t += offset;
    return out;
}

}  // namespace spreadhawkes
