#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/ingest.hpp"

namespace spreadhawkes {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that reads back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Exact decimal price for an integer tick count, e.g. 15933 x 0.01 -> "159.33".
[[nodiscard]] std::string format_price(std::int64_t ticks, double tick);

/// Event CSV:
///   # spreadhawkes events v1
///   # session_start=<s>
///   # session_end=<s>
///   # tick=<price>
///   # initial_bid=<price>
///   # initial_ask=<price>
///   t,kind,delta,bid,ask
/// t in seconds, kind one of ask_up/ask_down/bid_up/bid_down, delta in ticks,
/// bid/ask the book after the event as decimal strings.
void write_events(std::ostream& out, const EventStream& stream);
void write_events(const std::filesystem::path& path, const EventStream& stream);

struct LoadedEvents {
    EventStream stream;
    PreprocessReport report;  // counts rows and rounding warnings; clean() on a faithful file
};

/// Reads and validates an event CSV. Throws IngestError.
[[nodiscard]] LoadedEvents read_events(std::istream& in);
[[nodiscard]] LoadedEvents read_events(const std::filesystem::path& path);

/// The book after every event as quote rows (`time,bid,ask`), stamped at ns
/// resolution from a session start given as nanoseconds since midnight.
void write_quotes(std::ostream& out, const EventStream& stream, std::int64_t session_start_ns);

[[nodiscard]] std::string to_json(const PreprocessReport& report);
[[nodiscard]] std::string to_json(const FitReport& report);

/// Variant and parameters from a fit JSON (or a bare {"variant", "parameters"} object).
struct StoredParams {
    ModelVariant variant{ModelVariant::Proposed};
    ParamSet params;
};
[[nodiscard]] StoredParams params_from_json(std::string_view text);
[[nodiscard]] StoredParams read_params(const std::filesystem::path& path);

/// One CSV row per window; the header depends on the variant's parameter names.
void write_fit_header(std::ostream& out, ModelVariant variant);
void write_fit_row(std::ostream& out, const FitReport& report);

struct FitRow {
    double window_start{0.0};
    double window_end{0.0};
    ModelVariant variant{ModelVariant::Proposed};
    ParamSet params;
    double log_likelihood{0.0};
    bool converged{false};
    bool reliable{true};
};
[[nodiscard]] std::vector<FitRow> read_fit_rows(std::istream& in);
[[nodiscard]] std::vector<FitRow> read_fit_rows(const std::filesystem::path& path);

/// Splits a CSV line on commas (no quoting) and trims each field.
[[nodiscard]] std::vector<std::string> split_csv(std::string_view line);

}  // namespace spreadhawkes
