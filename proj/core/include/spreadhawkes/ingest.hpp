#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spreadhawkes/market.hpp"

namespace spreadhawkes {

/// One row of a best-quote file. Either side may be absent (unchanged).
struct RawQuote {
    std::int64_t ns_since_midnight{0};
    std::optional<double> bid;
    std::optional<double> ask;
    std::string exchange;
    std::size_t line{0};

    [[nodiscard]] double seconds_since_midnight() const { return static_cast<double>(ns_since_midnight) * 1e-9; }
};

struct MalformedRow {
    std::size_t line{0};
    std::string text;
    std::string reason;
};

struct QuoteFile {
    std::vector<RawQuote> quotes;
    std::vector<MalformedRow> malformed;
    std::size_t rows{0};
    int fraction_digits{0};         // 3, 6 or 9 for ms/us/ns stamps
    std::int64_t resolution_ns{1};  // 10^(9 - fraction_digits)
    std::optional<std::string> date;
};

struct QuoteFormat {
    std::string time_column{"time"};
    std::string bid_column{"bid"};
    std::string ask_column{"ask"};
    std::string exchange_column{"exchange"};
    std::string date_column{"date"};
    double max_malformed_fraction{0.05};
};

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "HH:MM:SS[.fraction]" to nanoseconds since midnight; fraction digits are
/// written to *digits when given. Throws std::invalid_argument.
[[nodiscard]] std::int64_t parse_clock(std::string_view text, int* digits = nullptr);

/// CSV with a header naming at least time, bid and ask. Lines starting with
/// '#' are comments; `# date: YYYY-MM-DD` sets the date. Malformed rows are
/// collected; more than max_malformed_fraction of them is an IngestError.
[[nodiscard]] QuoteFile parse_quotes(std::istream& in, const QuoteFormat& format = {});
[[nodiscard]] QuoteFile parse_quotes(const std::filesystem::path& path, const QuoteFormat& format = {});

struct SessionWindow {
    std::int64_t start_ns{10LL * 3600 * 1'000'000'000};
    std::int64_t end_ns{(15LL * 3600 + 30 * 60) * 1'000'000'000};

    /// "HH:MM-HH:MM" (seconds optional).
    [[nodiscard]] static SessionWindow parse(std::string_view text);
    [[nodiscard]] double length_seconds() const { return static_cast<double>(end_ns - start_ns) * 1e-9; }
};

struct PreprocessConfig {
    SessionWindow session{};
    double tick{0.01};
    std::uint64_t seed{1};
};

struct PreprocessReport {
    std::size_t input_rows{0};
    std::size_t relocation_groups{0};
    std::size_t relocated_rows{0};
    std::size_t forced_splits{0};
    std::size_t random_splits{0};
    std::size_t locked_dropped{0};
    std::size_t crossed_dropped{0};
    std::size_t session_excluded{0};
    std::size_t unchanged_rows{0};
    std::size_t incomplete_rows{0};  // before both sides were known
    std::size_t rounding_warnings{0};
    std::size_t events{0};
    bool empty_stream{false};

    [[nodiscard]] std::size_t dropped() const { return locked_dropped + crossed_dropped; }
    [[nodiscard]] double drop_percentage() const {
        return input_rows == 0 ? 0.0 : 100.0 * static_cast<double>(dropped()) / static_cast<double>(input_rows);
    }
    [[nodiscard]] bool clean() const;
};

struct PreprocessResult {
    EventStream stream;
    PreprocessReport report;
};

/// Turns quote rows into a valid event stream with times in seconds from the
/// session start:
///  - rows sharing a timestamp are spread to offsets k * unit / (n + 1), k = 0..n-1;
///  - locked/crossed books are dropped; the raw sides still carry forward;
///  - two-sided changes become two events, the second half a slot later;
///  - only events inside (start, end] are kept; earlier rows set the initial book.
[[nodiscard]] PreprocessResult preprocess(const QuoteFile& quotes, const PreprocessConfig& config);

struct WindowMode {
    enum class Kind { Daily, Intraday } kind{Kind::Daily};
    double length{180.0};  // seconds
    double step{60.0};

    [[nodiscard]] static WindowMode daily() { return {}; }
    [[nodiscard]] static WindowMode intraday(double length, double step) { return {Kind::Intraday, length, step}; }
};

/// "3m", "90s", "1h" or plain seconds.
[[nodiscard]] double parse_duration(std::string_view text);

/// Sub-streams with the book snapshotted at each window start.
[[nodiscard]] std::vector<EventStream> windows(const EventStream& stream, const WindowMode& mode);

}  // namespace spreadhawkes
