#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spreadhawkes/ingest.hpp"
#include "spreadhawkes/io.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

namespace {

QuoteFile parse(const std::string& text) {
    std::istringstream in(text);
    return parse_quotes(in);
}

const std::filesystem::path kData{SPREADHAWKES_TEST_DATA};

}  // namespace

TEST_CASE("clock parsing") {
    int digits = 0;
    CHECK(parse_clock("10:03:09.057956", &digits) == 36189057956000LL);
    CHECK(digits == 6);
    CHECK(parse_clock("10:00") == 36000LL * 1'000'000'000);
    CHECK(parse_clock("00:00:00.123456789", &digits) == 123456789);
    CHECK(digits == 9);
    CHECK_THROWS_AS((void)parse_clock("25:00:00"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_clock("10:00:00.1234567890"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_clock("noon"), std::invalid_argument);
}

TEST_CASE("bid-only row with microsecond stamps") {
    const auto f = parse("time,bid,ask\n10:03:09.057956,159.33,,\n");
    REQUIRE(f.quotes.size() == 1);
    const auto& q = f.quotes[0];
    CHECK(q.seconds_since_midnight() == doctest::Approx(36189.057956).epsilon(1e-15));
    REQUIRE(q.bid.has_value());
    CHECK(*q.bid == 159.33);
    CHECK_FALSE(q.ask.has_value());
    CHECK(f.fraction_digits == 6);
    CHECK(f.resolution_ns == 1000);
}

TEST_CASE("nanosecond stamps and column mapping") {
    QuoteFormat fmt;
    fmt.time_column = "ts";
    fmt.bid_column = "b";
    fmt.ask_column = "a";
    std::istringstream in("# date: 2010-05-06\nts,a,b\n10:00:01.000000001,100.02,100.01\n");
    const auto f = parse_quotes(in, fmt);
    CHECK(f.resolution_ns == 1);
    CHECK(f.fraction_digits == 9);
    REQUIRE(f.date.has_value());
    CHECK(*f.date == "2010-05-06");
    CHECK(*f.quotes[0].ask == 100.02);
    CHECK(*f.quotes[0].bid == 100.01);
}

TEST_CASE("malformed rows are collected; too many is an error") {
    const auto f = parse(
        "time,bid,ask\n10:00:01.000,100.00,100.02\n10:00:02.000,abc,100.02\n10:00:03.000,,\n"
        "10:00:04.000,100.00,100.03\n10:00:03.500,100.00,100.04\n" +
        [] {
            std::string rows;
            for (int k = 0; k < 100; ++k) rows += "10:01:00.000,100.00,100.05\n";
            return rows;
        }());
    REQUIRE(f.malformed.size() == 3);
    CHECK(f.malformed[0].line == 3);
    CHECK(f.malformed[1].line == 4);
    CHECK(f.malformed[2].line == 6);
    CHECK(f.quotes.size() == 102);
    CHECK_THROWS_AS((void)parse("time,bid,ask\n10:00:01.000,x,y\n10:00:02.000,100,100.01\n"), IngestError);
    CHECK_THROWS_AS((void)parse("when,bid,ask\n"), IngestError);
}

TEST_CASE("rows before the session open only set the starting book") {
    const auto f = parse("time,bid,ask\n09:30:00.000,100.00,100.05\n10:00:01.000,100.00,100.04\n");
    const auto r = preprocess(f, {});
    CHECK(r.report.session_excluded == 1);
    CHECK(r.stream.initial_state == MarketState(10000, 10005, 0.01));
    REQUIRE(r.stream.events.size() == 1);
    CHECK(r.stream.events[0].t == doctest::Approx(1.0));
    CHECK(r.stream.events[0].kind == EventKind::AskDown);
    CHECK(r.stream.session_end == 19800.0);
}

TEST_CASE("same-stamp rows spread evenly inside the millisecond") {
    const auto f = parse(
        "time,bid,ask\n09:59:00.000,100.00,100.05\n10:00:00.001,100.00,100.04\n"
        "10:00:00.001,100.00,100.03\n10:00:00.001,100.00,100.02\n10:00:00.002,100.00,100.03\n");
    const auto r = preprocess(f, {});
    REQUIRE(r.stream.events.size() == 4);
    CHECK(r.stream.events[0].t == doctest::Approx(0.001000).epsilon(1e-12));
    CHECK(r.stream.events[1].t == doctest::Approx(0.001250).epsilon(1e-12));
    CHECK(r.stream.events[2].t == doctest::Approx(0.001500).epsilon(1e-12));
    CHECK(r.stream.events[3].t == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(r.report.relocation_groups == 1);
    CHECK(r.report.relocated_rows == 2);
}

TEST_CASE("relocation never reorders and stays inside one unit") {
    std::string text = "time,bid,ask\n09:59:00.000,100.00,100.50\n";
    Rng rng(4);
    std::uniform_int_distribution<int> dup(1, 6);
    std::int64_t ask = 10050;
    for (int ms = 1; ms < 400; ++ms) {
        const int n = dup(rng);
        for (int k = 0; k < n && ask > 10001; ++k) {
            --ask;
            char line[64];
            std::snprintf(line, sizeof line, "10:00:00.%03d,100.00,%.2f\n", ms, ask / 100.0);
            text += line;
        }
    }
    const auto f = parse(text);
    const auto r = preprocess(f, {});
    REQUIRE(r.stream.events.size() == f.quotes.size() - 1);
    for (std::size_t j = 0; j < r.stream.events.size(); ++j) {
        const double raw = double(f.quotes[j + 1].ns_since_midnight - 36000LL * 1'000'000'000) * 1e-9;
        CHECK(r.stream.events[j].t >= raw - 1e-12);
        CHECK(r.stream.events[j].t < raw + 0.001);
        if (j > 0) CHECK(r.stream.events[j].t > r.stream.events[j - 1].t);
    }
}

TEST_CASE("locked quote is dropped and counted") {
    const auto f = parse("time,bid,ask\n10:00:01.000,159.30,159.35\n10:00:02.000,159.33,159.33\n10:00:03.000,159.31,\n");
    const auto r = preprocess(f, {});
    CHECK(r.report.locked_dropped == 1);
    CHECK(r.report.dropped() == 1);
    CHECK(r.report.drop_percentage() == doctest::Approx(100.0 / 3.0));
    // the ask carried forward from the dropped row
    REQUIRE(r.stream.events.size() == 2);
    CHECK(r.stream.events.back().state_after == MarketState(15931, 15933, 0.01));
}

TEST_CASE("only the seed changes random split outcomes") {
    std::string text = "time,bid,ask\n09:59:00.000,100.00,100.02\n";
    for (int s = 1; s <= 200; ++s) {
        const double b = 100.00 + 0.01 * s;
        char line[64];
        std::snprintf(line, sizeof line, "10:%02d:%02d.000,%.2f,%.2f\n", s / 60, s % 60, b, b + 0.02);
        text += line;
    }
    const auto f = parse(text);
    PreprocessConfig a;
    a.seed = 1;
    PreprocessConfig b;
    b.seed = 2;
    const auto ra = preprocess(f, a);
    const auto rb = preprocess(f, b);
    CHECK(ra.report.random_splits == 200);
    CHECK(rb.report.random_splits == 200);
    CHECK(preprocess(f, a).stream == ra.stream);
    CHECK_FALSE(ra.stream == rb.stream);
    REQUIRE(ra.stream.events.size() == rb.stream.events.size());
    for (std::size_t j = 0; j < ra.stream.events.size(); j += 2) {
        CHECK(ra.stream.events[j + 1].state_after == rb.stream.events[j + 1].state_after);
        CHECK(ra.stream.events[j].t == rb.stream.events[j].t);
    }
}

TEST_CASE("shipped raw fixture yields the documented stream") {
    const auto f = parse_quotes(kData / "preprocess_raw.csv");
    const auto r = preprocess(f, {});
    const auto expected = read_events(kData / "preprocess_expected.csv").stream;
    REQUIRE(r.stream.events.size() == expected.events.size());
    CHECK(r.stream.initial_state == expected.initial_state);
    for (std::size_t j = 0; j < expected.events.size(); ++j) {
        CAPTURE(j);
        CHECK(r.stream.events[j].t == doctest::Approx(expected.events[j].t).epsilon(1e-12));
        CHECK(r.stream.events[j].kind == expected.events[j].kind);
        CHECK(r.stream.events[j].delta == expected.events[j].delta);
        CHECK(r.stream.events[j].state_after == expected.events[j].state_after);
    }
    CHECK(r.report.relocation_groups == 1);
    CHECK(r.report.forced_splits == 1);
    CHECK(r.report.random_splits == 1);
    CHECK(r.report.dropped() == 1);
    CHECK(r.report.session_excluded == 3);
    CHECK(f.date == "2018-01-02");
}

TEST_CASE("session windows and durations") {
    const auto w = SessionWindow::parse("10:00-15:30");
    CHECK(w.length_seconds() == 19800.0);
    CHECK_THROWS_AS((void)SessionWindow::parse("15:30-10:00"), std::invalid_argument);
    CHECK(parse_duration("3m") == 180.0);
    CHECK(parse_duration("90s") == 90.0);
    CHECK(parse_duration("1h") == 3600.0);
    CHECK(parse_duration("45") == 45.0);
    CHECK_THROWS_AS((void)parse_duration("-3m"), std::invalid_argument);
}

TEST_CASE("intraday windows") {
    SimConfig cfg;
    cfg.params = table1_truth(1);
    cfg.horizon = 19800.0;
    const auto st = simulate(cfg).stream;
    const auto w = windows(st, WindowMode::intraday(180.0, 60.0));
    CHECK(w.size() == 328);
    CHECK(w.front().session_start == 0.0);
    CHECK(w.back().session_end == doctest::Approx(19800.0));
    for (const auto& x : w) {
        CHECK_NOTHROW(validate(x));
        CHECK(x.initial_state == st.state_at(x.session_start));
    }
    const auto daily = windows(st, WindowMode::daily());
    REQUIRE(daily.size() == 1);
    CHECK(daily[0] == st);

    const auto tiles = windows(st, WindowMode::intraday(600.0, 600.0));
    CHECK(tiles.size() == 33);
    std::size_t total = 0;
    for (std::size_t k = 0; k < tiles.size(); ++k) {
        total += tiles[k].events.size();
        if (k > 0) CHECK(tiles[k].session_start == tiles[k - 1].session_end);
    }
    CHECK(total == st.events.size());
}
