#include "spreadhawkes/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace spreadhawkes {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw IngestError("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_integer(std::string_view text, std::string_view what) {
    text = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw IngestError("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

int tick_decimals(double tick) {
    double scaled = tick;
    for (int d = 0; d <= 9; ++d) {
        if (std::abs(scaled - std::round(scaled)) < 1e-9 * std::max(1.0, scaled)) return d;
        scaled *= 10.0;
    }
    throw std::invalid_argument("tick size needs more than 9 decimals");
}

std::int64_t price_to_ticks(std::string_view text, double tick, std::size_t& warnings) {
    const double scaled = parse_number(text, "price") / tick;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6) ++warnings;
    return static_cast<std::int64_t>(rounded);
}

std::string clock_string(std::int64_t ns) {
    const std::int64_t seconds = ns / 1'000'000'000;
    const std::int64_t frac = ns % 1'000'000'000;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%09lld", static_cast<long long>(seconds / 3600),
                  static_cast<long long>((seconds / 60) % 60), static_cast<long long>(seconds % 60),
                  static_cast<long long>(frac));
    return buf;
}

ordered_json optional_number(const std::optional<double>& value) {
    if (value && std::isfinite(*value)) return *value;
    return nullptr;
}

ordered_json finite_or_null(double value) {
    if (std::isfinite(value)) return value;
    return nullptr;
}

std::string bool_field(bool value) { return value ? "1" : "0"; }

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return {buf, ptr};
}

std::string format_price(std::int64_t ticks, double tick) {
    const int decimals = tick_decimals(tick);
    std::int64_t scale = 1;
    for (int d = 0; d < decimals; ++d) scale *= 10;
    const auto units = static_cast<std::int64_t>(std::llround(tick * static_cast<double>(scale)));
    const std::int64_t value = ticks * units;
    const std::int64_t magnitude = value < 0 ? -value : value;
    std::string out = value < 0 ? "-" : "";
    out += std::to_string(magnitude / scale);
    if (decimals > 0) {
        std::string frac = std::to_string(magnitude % scale);
        out += '.';
        out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
        out += frac;
    }
    return out;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        const auto field = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.emplace_back(trim(field));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

void write_events(std::ostream& out, const EventStream& stream) {
    const double tick = stream.tick;
    out << "# spreadhawkes events v" << kSchemaVersion << '\n'
        << "# session_start=" << format_double(stream.session_start) << '\n'
        << "# session_end=" << format_double(stream.session_end) << '\n'
        << "# tick=" << format_double(tick) << '\n'
        << "# initial_bid=" << format_price(stream.initial_state.bid_ticks(), tick) << '\n'
        << "# initial_ask=" << format_price(stream.initial_state.ask_ticks(), tick) << '\n'
        << "t,kind,delta,bid,ask\n";
    for (const auto& e : stream.events) {
        out << format_double(e.t) << ',' << to_string(e.kind) << ',' << e.delta << ','
            << format_price(e.state_after.bid_ticks(), tick) << ',' << format_price(e.state_after.ask_ticks(), tick)
            << '\n';
    }
}

void write_events(const std::filesystem::path& path, const EventStream& stream) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path.string());
    write_events(out, stream);
    if (!out) throw IngestError("write failed for " + path.string());
}

LoadedEvents read_events(std::istream& in) {
    std::map<std::string, std::string, std::less<>> meta;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    LoadedEvents loaded;
    auto& stream = loaded.stream;
    auto& report = loaded.report;
    std::optional<MarketState> state;

    auto require = [&](std::string_view key) -> const std::string& {
        const auto it = meta.find(key);
        if (it == meta.end()) throw IngestError("event file lacks '# " + std::string(key) + "='");
        return it->second;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const auto body = trim(text.substr(1));
            if (const auto eq = body.find('='); eq != std::string_view::npos) {
                meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
            }
            continue;
        }
        if (!header) {
            if (split_csv(text) != std::vector<std::string>{"t", "kind", "delta", "bid", "ask"}) {
                throw IngestError("event file header must be t,kind,delta,bid,ask");
            }
            stream.session_start = parse_number(require("session_start"), "session_start");
            stream.session_end = parse_number(require("session_end"), "session_end");
            stream.tick = parse_number(require("tick"), "tick");
            if (!(stream.tick > 0.0)) throw IngestError("tick must be positive");
            try {
                stream.initial_state = MarketState(price_to_ticks(require("initial_bid"), stream.tick, report.rounding_warnings),
                                                   price_to_ticks(require("initial_ask"), stream.tick, report.rounding_warnings),
                                                   stream.tick);
            } catch (const BookError& e) {
                throw IngestError(std::string("initial book: ") + e.what());
            }
            state = stream.initial_state;
            header = true;
            continue;
        }
        ++report.input_rows;
        const auto fields = split_csv(text);
        const std::string where = " at line " + std::to_string(line_no);
        if (fields.size() != 5) throw IngestError("expected 5 fields" + where);
        try {
            EventRecord e;
            e.t = parse_number(fields[0], "time");
            e.kind = parse_event_kind(fields[1]);
            e.delta = parse_integer(fields[2], "delta");
            e.state_after = apply_event(*state, e.kind, e.delta);
            const auto bid = price_to_ticks(fields[3], stream.tick, report.rounding_warnings);
            const auto ask = price_to_ticks(fields[4], stream.tick, report.rounding_warnings);
            if (bid != e.state_after.bid_ticks() || ask != e.state_after.ask_ticks()) {
                throw IngestError("book columns disagree with the event");
            }
            state = e.state_after;
            stream.events.push_back(e);
        } catch (const IngestError& e) {
            throw IngestError(e.what() + where);
        } catch (const std::exception& e) {
            throw IngestError(e.what() + where);
        }
    }
    if (!header) throw IngestError("event file has no header row");
    try {
        validate(stream);
    } catch (const std::invalid_argument& e) {
        throw IngestError(e.what());
    }
    report.events = stream.events.size();
    report.empty_stream = stream.events.empty();
    return loaded;
}

LoadedEvents read_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open event file " + path.string());
    return read_events(in);
}

void write_quotes(std::ostream& out, const EventStream& stream, std::int64_t session_start_ns) {
    const double tick = stream.tick;
    auto row = [&](double t, const MarketState& s) {
        const auto ns = session_start_ns + static_cast<std::int64_t>(std::llround((t - stream.session_start) * 1e9));
        out << clock_string(ns) << ',' << format_price(s.bid_ticks(), tick) << ',' << format_price(s.ask_ticks(), tick)
            << '\n';
    };
    out << "time,bid,ask\n";
    row(stream.session_start, stream.initial_state);
    for (const auto& e : stream.events) row(e.t, e.state_after);
}

std::string to_json(const PreprocessReport& report) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["input_rows"] = report.input_rows;
    j["relocation_groups"] = report.relocation_groups;
    j["relocated_rows"] = report.relocated_rows;
    j["forced_splits"] = report.forced_splits;
    j["random_splits"] = report.random_splits;
    j["locked_dropped"] = report.locked_dropped;
    j["crossed_dropped"] = report.crossed_dropped;
    j["dropped"] = report.dropped();
    j["drop_percentage"] = report.drop_percentage();
    j["session_excluded"] = report.session_excluded;
    j["unchanged_rows"] = report.unchanged_rows;
    j["incomplete_rows"] = report.incomplete_rows;
    j["rounding_warnings"] = report.rounding_warnings;
    j["events"] = report.events;
    j["empty_stream"] = report.empty_stream;
    return j.dump(2);
}

std::string to_json(const FitReport& report) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["variant"] = std::string(to_string(report.variant));
    ordered_json params = ordered_json::object();
    ordered_json errors = ordered_json::object();
    ordered_json fixed = ordered_json::array();
    for (std::size_t i = 0; i < report.names.size(); ++i) {
        params[report.names[i]] = report.values[i];
        errors[report.names[i]] = optional_number(report.standard_errors[i]);
        if (!report.free[i]) fixed.push_back(report.names[i]);
    }
    j["parameters"] = params;
    j["standard_errors"] = errors;
    j["fixed"] = fixed;
    j["standard_error_note"] = report.standard_error_note;
    j["hessian_min_eigenvalue"] = optional_number(report.hessian_min_eigenvalue);
    j["log_likelihood"] = finite_or_null(report.log_likelihood);
    j["initial_log_likelihood"] = finite_or_null(report.initial_log_likelihood);
    j["aic"] = finite_or_null(report.aic);
    j["bic"] = finite_or_null(report.bic);
    j["k"] = report.k;
    j["n_events"] = report.n_events;
    j["counts"] = report.counts;
    j["converged"] = report.converged;
    j["iterations"] = report.iterations;
    j["evaluations"] = report.evaluations;
    j["best_start"] = report.best_start;
    j["wall_seconds"] = report.wall_seconds;
    j["stability_condition"] = report.stability_condition;
    j["reliable"] = report.reliable;
    j["xi_at_zero"] = report.xi_at_zero;
    j["window"] = {{"start", report.window_start}, {"end", report.window_end}};
    return j.dump(2);
}

StoredParams params_from_json(std::string_view text) {
    StoredParams out;
    try {
        const auto j = nlohmann::json::parse(text);
        out.variant = parse_variant(j.at("variant").get<std::string>());
        for (const auto& [name, value] : j.at("parameters").items()) {
            if (value.is_null()) throw std::invalid_argument("parameter " + name + " is null");
            set_parameter(out.params, name, value.get<double>());
        }
        if (out.variant != ModelVariant::SpreadOnly) validate(out.params, out.variant);
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(std::string("bad parameter JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IngestError(std::string("bad parameter JSON: ") + e.what());
    }
    return out;
}

StoredParams read_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open parameter file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

void write_fit_header(std::ostream& out, ModelVariant variant) {
    out << "# spreadhawkes fits v" << kSchemaVersion << '\n'
        << "window_start,window_end,variant,n_events,log_likelihood,aic,bic,converged,reliable,stable,xi_at_zero";
    const auto names = parameter_names(variant);
    for (const auto& n : names) out << ',' << n;
    for (const auto& n : names) out << ",se_" << n;
    out << '\n';
}

void write_fit_row(std::ostream& out, const FitReport& r) {
    out << format_double(r.window_start) << ',' << format_double(r.window_end) << ',' << to_string(r.variant) << ','
        << r.n_events << ',' << format_double(r.log_likelihood) << ',' << format_double(r.aic) << ','
        << format_double(r.bic) << ',' << bool_field(r.converged) << ',' << bool_field(r.reliable) << ','
        << bool_field(r.stability_condition) << ',' << bool_field(r.xi_at_zero);
    for (double v : r.values) out << ',' << format_double(v);
    for (const auto& se : r.standard_errors) {
        out << ',';
        if (se) out << format_double(*se);
    }
    out << '\n';
}

std::vector<FitRow> read_fit_rows(std::istream& in) {
    std::string line;
    std::vector<std::string> header;
    std::vector<FitRow> rows;
    std::map<std::string, std::size_t, std::less<>> column;
    auto field = [&](const std::vector<std::string>& fields, std::string_view name) -> const std::string& {
        const auto it = column.find(name);
        if (it == column.end() || it->second >= fields.size()) {
            throw IngestError("fit table lacks column " + std::string(name));
        }
        return fields[it->second];
    };
    while (std::getline(in, line)) {
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (header.empty()) {
            header = split_csv(text);
            for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
            continue;
        }
        const auto fields = split_csv(text);
        FitRow row;
        row.window_start = parse_number(field(fields, "window_start"), "window_start");
        row.window_end = parse_number(field(fields, "window_end"), "window_end");
        try {
            row.variant = parse_variant(field(fields, "variant"));
        } catch (const std::invalid_argument& e) {
            throw IngestError(e.what());
        }
        row.log_likelihood = parse_number(field(fields, "log_likelihood"), "log_likelihood");
        row.converged = field(fields, "converged") == "1";
        row.reliable = field(fields, "reliable") == "1";
        for (const auto& name : parameter_names(row.variant)) {
            set_parameter(row.params, name, parse_number(field(fields, name), name));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FitRow> read_fit_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open fit table " + path.string());
    return read_fit_rows(in);
}

}  // namespace spreadhawkes
