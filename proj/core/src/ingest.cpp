#include "spreadhawkes/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace spreadhawkes {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

double parse_price(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad price '" + std::string(text) + "'");
    }
    if (!std::isfinite(value) || value < 0.0) throw std::invalid_argument("negative or non-finite price");
    return value;
}

std::int64_t to_ticks(double price, double tick, std::size_t& warnings) {
    const double scaled = price / tick;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6) ++warnings;
    return static_cast<std::int64_t>(rounded);
}

}  // namespace

std::int64_t parse_clock(std::string_view text, int* digits) {
    text = trim(text);
    const auto first = text.find(':');
    if (first == std::string_view::npos) throw std::invalid_argument("bad time '" + std::string(text) + "'");
    const auto second = text.find(':', first + 1);
    const auto hours = parse_int(text.substr(0, first), "hour");
    std::int64_t minutes = 0;
    std::int64_t seconds = 0;
    std::int64_t frac_ns = 0;
    int frac_digits = 0;
    if (second == std::string_view::npos) {
        minutes = parse_int(text.substr(first + 1), "minute");
    } else {
        minutes = parse_int(text.substr(first + 1, second - first - 1), "minute");
        auto rest = text.substr(second + 1);
        const auto dot = rest.find('.');
        seconds = parse_int(rest.substr(0, dot), "second");
        if (dot != std::string_view::npos) {
            const auto frac = rest.substr(dot + 1);
            if (frac.empty() || frac.size() > 9) throw std::invalid_argument("bad fractional seconds");
            frac_digits = static_cast<int>(frac.size());
            frac_ns = parse_int(frac, "fraction");
            for (int k = frac_digits; k < 9; ++k) frac_ns *= 10;
        }
    }
    if (hours < 0 || hours > 23 || minutes < 0 || minutes > 59 || seconds < 0 || seconds > 60) {
        throw std::invalid_argument("time out of range '" + std::string(text) + "'");
    }
    if (digits != nullptr) *digits = frac_digits;
    return ((hours * 60 + minutes) * 60 + seconds) * 1'000'000'000 + frac_ns;
}

QuoteFile parse_quotes(std::istream& in, const QuoteFormat& format) {
    QuoteFile file;
    std::string line;
    std::size_t line_no = 0;
    std::unordered_map<std::string, std::size_t> columns;
    bool have_header = false;
    std::int64_t last_ns = std::numeric_limits<std::int64_t>::min();

    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        if (auto it = columns.find(name); it != columns.end()) return it->second;
        return std::nullopt;
    };

    std::optional<std::size_t> time_col, bid_col, ask_col, exchange_col, date_col;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            auto body = trim(text.substr(1));
            for (std::string_view key : {"date:", "date="}) {
                if (body.substr(0, key.size()) == key) file.date = std::string(trim(body.substr(key.size())));
            }
            continue;
        }
        if (!have_header) {
            const auto names = split_fields(text);
            for (std::size_t i = 0; i < names.size(); ++i) columns[std::string(names[i])] = i;
            time_col = column(format.time_column);
            bid_col = column(format.bid_column);
            ask_col = column(format.ask_column);
            exchange_col = column(format.exchange_column);
            date_col = column(format.date_column);
            if (!time_col || !bid_col || !ask_col) {
                throw IngestError("quote header must name the columns " + format.time_column + ", " +
                                  format.bid_column + " and " + format.ask_column);
            }
            have_header = true;
            continue;
        }
        ++file.rows;
        const auto fields = split_fields(text);
        auto field = [&](std::optional<std::size_t> idx) -> std::string_view {
            return idx && *idx < fields.size() ? fields[*idx] : std::string_view{};
        };
        try {
            RawQuote q;
            q.line = line_no;
            int digits = 0;
            q.ns_since_midnight = parse_clock(field(time_col), &digits);
            if (!field(bid_col).empty()) q.bid = parse_price(field(bid_col));
            if (!field(ask_col).empty()) q.ask = parse_price(field(ask_col));
            if (!q.bid && !q.ask) throw std::invalid_argument("row has neither bid nor ask");
            if (q.ns_since_midnight < last_ns) throw std::invalid_argument("timestamp goes backwards");
            q.exchange = std::string(field(exchange_col));
            if (date_col && !file.date && !field(date_col).empty()) file.date = std::string(field(date_col));
            last_ns = q.ns_since_midnight;
            file.fraction_digits = std::max(file.fraction_digits, digits);
            file.quotes.push_back(std::move(q));
        } catch (const std::invalid_argument& e) {
            file.malformed.push_back({line_no, std::string(text), e.what()});
        }
    }
    if (!have_header) throw IngestError("quote file has no header row");
    std::int64_t resolution = 1;
    for (int k = file.fraction_digits; k < 9; ++k) resolution *= 10;
    file.resolution_ns = resolution;
    if (file.rows > 0 &&
        static_cast<double>(file.malformed.size()) > format.max_malformed_fraction * static_cast<double>(file.rows)) {
        std::ostringstream os;
        os << file.malformed.size() << " of " << file.rows << " rows are malformed (first at line "
           << file.malformed.front().line << ": " << file.malformed.front().reason << ")";
        throw IngestError(os.str());
    }
    return file;
}

QuoteFile parse_quotes(const std::filesystem::path& path, const QuoteFormat& format) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open quote file " + path.string());
    return parse_quotes(in, format);
}

SessionWindow SessionWindow::parse(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) throw std::invalid_argument("session must look like HH:MM-HH:MM");
    SessionWindow w;
    w.start_ns = parse_clock(text.substr(0, dash));
    w.end_ns = parse_clock(text.substr(dash + 1));
    if (w.end_ns <= w.start_ns) throw std::invalid_argument("session must end after it starts");
    return w;
}

bool PreprocessReport::clean() const {
    return relocation_groups == 0 && forced_splits == 0 && random_splits == 0 && dropped() == 0 &&
           session_excluded == 0 && unchanged_rows == 0 && incomplete_rows == 0 && rounding_warnings == 0;
}

PreprocessResult preprocess(const QuoteFile& quotes, const PreprocessConfig& config) {
    if (!(config.tick > 0.0)) throw std::invalid_argument("tick size must be positive");
    const double unit = static_cast<double>(quotes.resolution_ns) * 1e-9;
    const double length = config.session.length_seconds();
    const auto& rows = quotes.quotes;

    PreprocessResult result;
    auto& report = result.report;
    auto& stream = result.stream;
    report.input_rows = rows.size();
    stream.session_start = 0.0;
    stream.session_end = length;
    stream.tick = config.tick;

    // Relocated times and slot widths.
    std::vector<double> times(rows.size());
    std::vector<double> slot(rows.size());
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].ns_since_midnight == rows[i].ns_since_midnight) ++j;
        const std::size_t n = j - i;
        if (n > 1) {
            ++report.relocation_groups;
            report.relocated_rows += n - 1;
        }
        const double base = static_cast<double>(rows[i].ns_since_midnight - config.session.start_ns) * 1e-9;
        const double width = unit / static_cast<double>(n + 1);
        for (std::size_t k = 0; k < n; ++k) {
            times[i + k] = base + static_cast<double>(k) * width;
            slot[i + k] = n > 1 ? width : 0.5 * unit;
        }
        i = j;
    }

    Rng rng(config.seed);
    std::optional<std::int64_t> bid;
    std::optional<std::int64_t> ask;
    std::optional<MarketState> last_valid;
    bool initial_fixed = false;

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double t = times[r];
        if (t > length) {
            ++report.session_excluded;
            continue;
        }
        if (rows[r].bid) bid = to_ticks(*rows[r].bid, config.tick, report.rounding_warnings);
        if (rows[r].ask) ask = to_ticks(*rows[r].ask, config.tick, report.rounding_warnings);
        const bool in_window = t > 0.0;
        if (!in_window) {
            ++report.session_excluded;
            if (bid && ask && *bid < *ask && *bid + *ask > 0) last_valid = MarketState(*bid, *ask, config.tick);
            continue;
        }
        if (!bid || !ask) {
            ++report.incomplete_rows;
            continue;
        }
        if (*bid == *ask) {
            ++report.locked_dropped;
            continue;
        }
        if (*bid > *ask || *bid + *ask <= 0) {
            ++report.crossed_dropped;
            continue;
        }
        const MarketState next(*bid, *ask, config.tick);
        if (!initial_fixed) {
            initial_fixed = true;
            if (!last_valid) {
                stream.initial_state = next;
                last_valid = next;
                continue;
            }
            stream.initial_state = *last_valid;
        }
        if (next == *last_valid) {
            ++report.unchanged_rows;
            continue;
        }
        const auto transition = classify_transition(*last_valid, next, rng);
        if (transition.order == SplitOrder::Forced) ++report.forced_splits;
        if (transition.order == SplitOrder::Random) ++report.random_splits;
        MarketState state = *last_valid;
        for (std::size_t s = 0; s < transition.steps.size(); ++s) {
            const double when = t + static_cast<double>(s) * 0.5 * slot[r];
            if (when > length) break;
            state = apply_event(state, transition.steps[s].kind, transition.steps[s].delta);
            stream.events.push_back({when, transition.steps[s].kind, transition.steps[s].delta, state});
        }
        last_valid = next;
    }
    if (!initial_fixed && last_valid) stream.initial_state = *last_valid;
    if (!initial_fixed && !last_valid) stream.initial_state = MarketState(1, 2, config.tick);
    report.events = stream.events.size();
    report.empty_stream = stream.events.empty();
    validate(stream);
    return result;
}

double parse_duration(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw std::invalid_argument("empty duration");
    double scale = 1.0;
    switch (text.back()) {
        case 's': text.remove_suffix(1); break;
        case 'm': scale = 60.0; text.remove_suffix(1); break;
        case 'h': scale = 3600.0; text.remove_suffix(1); break;
        default: break;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(value > 0.0)) {
        throw std::invalid_argument("bad duration '" + std::string(text) + "'");
    }
    return value * scale;
}

std::vector<EventStream> windows(const EventStream& stream, const WindowMode& mode) {
    if (mode.kind == WindowMode::Kind::Daily) return {stream};
    if (!(mode.length > 0.0) || !(mode.step > 0.0)) throw std::invalid_argument("window length and step must be positive");
    const double span = stream.duration();
    std::vector<EventStream> out;
    if (span + 1e-9 < mode.length) return out;
    const auto count = static_cast<std::size_t>(std::floor((span - mode.length) / mode.step + 1e-9)) + 1;
    out.reserve(count);
    auto first = stream.events.begin();
    for (std::size_t k = 0; k < count; ++k) {
        EventStream w;
        w.tick = stream.tick;
        w.session_start = stream.session_start + static_cast<double>(k) * mode.step;
        w.session_end = w.session_start + mode.length;
        w.initial_state = stream.state_at(w.session_start);
        first = std::upper_bound(stream.events.begin(), stream.events.end(), w.session_start,
                                 [](double value, const EventRecord& e) { return value < e.t; });
        for (auto it = first; it != stream.events.end() && it->t <= w.session_end; ++it) w.events.push_back(*it);
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace spreadhawkes
