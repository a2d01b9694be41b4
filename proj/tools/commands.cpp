#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>

#include "spreadhawkes/diagnostics.hpp"
#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/ingest.hpp"
#include "spreadhawkes/io.hpp"
#include "spreadhawkes/parallel.hpp"
#include "spreadhawkes/simulator.hpp"

namespace spreadhawkes::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_output(const std::string& path, Manifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write " + path);
    manifest.outputs.push_back(path);
    return out;
}

std::string csv_number(double value) { return std::isfinite(value) ? format_double(value) : ""; }

StartMode parse_start(const std::string& text) {
    if (text == "heuristic") return StartMode::Heuristic;
    if (text == "random") return StartMode::UniformRandom;
    throw UsageError("--start must be heuristic or random");
}

OptimizerOptions parse_optimizer(const std::string& text) {
    if (text == "simplex") return {};
    if (text == "bfgs") {
        OptimizerOptions o;
        o.method = OptimizerMethod::QuasiNewton;
        return o;
    }
    if (text == "classic") return OptimizerOptions::classic();
    throw UsageError("--optimizer must be simplex, bfgs or classic");
}

ModelVariant variant_arg(const std::string& text) {
    try {
        return parse_variant(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

FitConfig fit_config(const FitArgs& args) {
    FitConfig config;
    config.variant = variant_arg(args.variant);
    config.beta0 = args.beta0;
    config.restarts = args.restarts;
    config.seed = args.seed;
    config.start = parse_start(args.start);
    config.optimizer = parse_optimizer(args.optimizer);
    config.compute_standard_errors = !args.no_standard_errors;
    config.jobs = args.jobs;
    for (const auto& item : args.fixed) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--fix expects name=value, got '" + item + "'");
        try {
            config.fixed[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::logic_error&) {
            throw UsageError("--fix value is not a number in '" + item + "'");
        }
    }
    return config;
}

ordered_json describe(const FitConfig& c) {
    ordered_json j;
    j["variant"] = std::string(to_string(c.variant));
    j["beta0"] = c.beta0;
    j["restarts"] = c.restarts;
    j["seed"] = c.seed;
    j["start"] = c.start == StartMode::Heuristic ? "heuristic" : "random";
    j["standard_errors"] = c.compute_standard_errors;
    j["fixed"] = c.fixed;
    j["jobs"] = c.jobs;
    return j;
}

std::vector<std::string> table1_names() { return parameter_names(ModelVariant::Proposed); }

}  // namespace

void Manifest::write(const std::string& path) const {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "spreadhawkes";
    j["version"] = SPREADHAWKES_VERSION;
    j["command"] = command;
    j["argv"] = argv;
    j["config"] = config;
    j["outputs"] = outputs;
    j["failures"] = failures;
    j["status"] = status;
    std::ofstream out(path);
    if (out) out << j.dump(2) << '\n';
}

std::vector<std::string> expand_variants(const std::string& list) {
    std::vector<std::string> out;
    for (const auto& item : split_csv(list)) {
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(item);
            continue;
        }
        const auto first = item.substr(0, dots);
        const auto last = item.substr(dots + 2);
        if (first.size() != 4 || last.size() != 4 || first.substr(0, 3) != "ext" || last.substr(0, 3) != "ext") {
            throw UsageError("variant ranges look like ext1..ext5, got '" + item + "'");
        }
        for (char c = first[3]; c <= last[3]; ++c) out.push_back(std::string("ext") + c);
    }
    for (const auto& name : out) (void)variant_arg(name);
    return out;
}

int run_preprocess(const PreprocessArgs& args, Manifest& manifest) {
    QuoteFormat format;
    format.time_column = args.time_column;
    format.bid_column = args.bid_column;
    format.ask_column = args.ask_column;
    PreprocessConfig config;
    try {
        config.session = SessionWindow::parse(args.session);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--session: ") + e.what());
    }
    config.tick = args.tick;
    config.seed = args.seed;
    manifest.config = {{"in", args.in}, {"tick", args.tick}, {"session", args.session}, {"seed", args.seed}};

    const auto quotes = parse_quotes(std::filesystem::path(args.in), format);
    const std::string errors = args.errors.empty() ? args.out + ".errors.csv" : args.errors;
    if (!quotes.malformed.empty()) {
        auto out = open_output(errors, manifest);
        out << "# spreadhawkes malformed v" << kSchemaVersion << "\nline,reason\n";
        for (const auto& m : quotes.malformed) out << m.line << ',' << m.reason << '\n';
    }
    const auto result = preprocess(quotes, config);
    {
        auto out = open_output(args.out, manifest);
        write_events(out, result.stream);
    }
    if (!args.report.empty()) {
        auto out = open_output(args.report, manifest);
        out << to_json(result.report) << '\n';
    }
    if (result.report.empty_stream) {
        manifest.status = "empty_stream";
        std::cerr << "warning: preprocessing produced no events\n";
    }
    std::cout << result.report.events << " events, " << result.report.dropped() << " rows dropped ("
              << result.report.drop_percentage() << "%)\n";
    return kOk;
}

int run_fit(const FitArgs& args, Manifest& manifest) {
    const auto config = fit_config(args);
    manifest.config = describe(config);
    manifest.config["events"] = args.events;
    const auto stream = read_events(std::filesystem::path(args.events)).stream;
    const auto report = fit(stream, config);
    auto out = open_output(args.out, manifest);
    out << to_json(report) << '\n';
    if (!report.reliable) std::cerr << "warning: fewer than " << config.min_events_per_process
                                    << " events in some process; estimates flagged unreliable\n";
    std::cout << "log-likelihood " << report.log_likelihood << ", AIC " << report.aic << ", BIC " << report.bic
              << '\n';
    return kOk;
}

int run_fit_rolling(const RollingArgs& args, Manifest& manifest) {
    auto config = fit_config(args.fit);
    manifest.config = describe(config);
    manifest.config["events"] = args.fit.events;
    WindowMode mode;
    if (!args.daily) {
        try {
            mode = WindowMode::intraday(parse_duration(args.window), parse_duration(args.step));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    manifest.config["window"] = args.daily ? "daily" : args.window;
    manifest.config["step"] = args.daily ? "" : args.step;

    const auto stream = read_events(std::filesystem::path(args.fit.events)).stream;
    const auto parts = windows(stream, mode);
    const std::size_t jobs = config.jobs;
    config.jobs = 1;
    std::vector<std::optional<FitReport>> fits(parts.size());
    std::vector<std::string> errors(parts.size());
    parallel_for(parts.size(), jobs, [&](std::size_t w) {
        try {
            FitConfig c = config;
            c.seed = derive_seed(config.seed, w);
            fits[w] = fit(parts[w], c);
        } catch (const std::exception& e) {
            errors[w] = e.what();
        }
    });

    auto out = open_output(args.fit.out, manifest);
    write_fit_header(out, config.variant);
    std::size_t failed = 0;
    for (std::size_t w = 0; w < parts.size(); ++w) {
        if (fits[w]) {
            write_fit_row(out, *fits[w]);
        } else {
            ++failed;
            manifest.failures.push_back(
                {{"window", w}, {"start", parts[w].session_start}, {"end", parts[w].session_end}, {"error", errors[w]}});
        }
    }
    std::cout << parts.size() - failed << " of " << parts.size() << " windows fitted\n";
    if (failed > 0) {
        manifest.status = "partial";
        return kDataError;
    }
    return kOk;
}

int run_simulate(const SimulateArgs& args, Manifest& manifest) {
    if (args.horizon.has_value() == args.n_events.has_value()) {
        throw UsageError("give exactly one of --horizon and --n-events");
    }
    SimConfig config;
    if (!args.params.empty() == !args.preset.empty()) throw UsageError("give exactly one of --params and --preset");
    if (!args.params.empty()) {
        const auto stored = read_params(args.params);
        config.params = stored.params;
        config.variant = stored.variant;
    } else if (args.preset == "table1-row1" || args.preset == "table1-row2") {
        config.params = table1_truth(args.preset.back() - '0');
    } else {
        throw UsageError("--preset must be table1-row1 or table1-row2");
    }
    if (config.variant == ModelVariant::SpreadOnly) throw UsageError("the spread-only model has no book to simulate");
    config.horizon = args.horizon;
    config.n_events = args.n_events;
    config.seed = args.seed;
    try {
        config.initial_state = MarketState::from_prices(args.initial_bid, args.initial_ask, args.tick);
    } catch (const BookError& e) {
        throw UsageError(std::string("initial book: ") + e.what());
    }
    if (args.jumps == "one") {
        config.jumps = JumpSource::constant_one();
    } else if (args.jumps == "sample") {
        config.jumps = JumpSource::sample_table();
    } else {
        config.jumps = JumpSource::load(args.jumps);
    }
    manifest.config = {{"params", args.params},
                       {"preset", args.preset},
                       {"variant", std::string(to_string(config.variant))},
                       {"seed", args.seed},
                       {"jumps", args.jumps}};
    if (args.horizon) manifest.config["horizon"] = *args.horizon;
    if (args.n_events) manifest.config["n_events"] = *args.n_events;

    const auto result = simulate(config);
    auto out = open_output(args.out, manifest);
    write_events(out, result.stream);
    manifest.config["clamped_jumps"] = result.clamped_jumps;
    std::cout << result.stream.events.size() << " events over " << result.stream.duration() << " s\n";
    return kOk;
}

int run_select(const SelectArgs& args, Manifest& manifest) {
    const auto names = expand_variants(args.variants);
    manifest.config = {{"events", args.events}, {"variants", names}, {"beta0", args.beta0},
                       {"restarts", args.restarts}, {"seed", args.seed}};
    const auto stream = read_events(std::filesystem::path(args.events)).stream;
    std::vector<std::optional<FitReport>> fits(names.size());
    std::vector<std::string> errors(names.size());
    parallel_for(names.size(), args.jobs, [&](std::size_t v) {
        FitConfig c;
        c.variant = parse_variant(names[v]);
        c.beta0 = args.beta0;
        c.restarts = args.restarts;
        c.seed = args.seed;
        c.compute_standard_errors = false;
        try {
            fits[v] = fit(stream, c);
        } catch (const std::exception& e) {
            errors[v] = e.what();
        }
    });
    double best_aic = INFINITY;
    double best_bic = INFINITY;
    for (const auto& f : fits) {
        if (!f) continue;
        best_aic = std::min(best_aic, f->aic);
        best_bic = std::min(best_bic, f->bic);
    }
    auto out = open_output(args.out, manifest);
    out << "# spreadhawkes selection v" << kSchemaVersion << '\n'
        << "variant,k,n_events,log_likelihood,aic,bic,delta_aic,delta_bic,converged\n";
    int status = kOk;
    for (std::size_t v = 0; v < names.size(); ++v) {
        if (!fits[v]) {
            manifest.failures.push_back({{"variant", names[v]}, {"error", errors[v]}});
            status = kDataError;
            continue;
        }
        const auto& f = *fits[v];
        out << names[v] << ',' << f.k << ',' << f.n_events << ',' << csv_number(f.log_likelihood) << ','
            << csv_number(f.aic) << ',' << csv_number(f.bic) << ',' << csv_number(f.aic - best_aic) << ','
            << csv_number(f.bic - best_bic) << ',' << (f.converged ? 1 : 0) << '\n';
    }
    if (status != kOk) manifest.status = "partial";
    return status;
}

int run_diagnose(const DiagnoseArgs& args, Manifest& manifest) {
    manifest.config = {{"events", args.events}, {"params", args.params}};
    const auto stream = read_events(std::filesystem::path(args.events)).stream;
    const auto stored = read_params(args.params);
    const auto res = residuals(stream, stored.params, stored.variant);

    auto out = open_output(args.out, manifest);
    out << "# spreadhawkes qq v" << kSchemaVersion << "\nprocess,theoretical,empirical\n";
    ordered_json summary;
    summary["schema_version"] = kSchemaVersion;
    auto emit = [&](const std::string& label, const std::vector<double>& r) {
        if (r.empty()) {
            summary[label] = nullptr;
            return;
        }
        for (const auto& p : qq_points(r)) {
            out << label << ',' << format_double(p.theoretical) << ',' << format_double(p.empirical) << '\n';
        }
        const double ks = ks_statistic(r);
        const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
        summary[label] = {{"n", r.size()},
                          {"mean", mean},
                          {"ks", ks},
                          {"ks_critical_5pct", ks_critical_5pct(r.size())},
                          {"ks_critical_1pct", ks_critical_1pct(r.size())}};
    };
    for (std::size_t i = 0; i < 4; ++i) emit(std::string(to_string(kind_at(i))), res.per_process[i]);
    emit("pooled", res.pooled());

    if (!args.residuals.empty()) {
        auto r = open_output(args.residuals, manifest);
        r << "# spreadhawkes residuals v" << kSchemaVersion << "\nprocess,index,residual\n";
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < res.per_process[i].size(); ++j) {
                r << to_string(kind_at(i)) << ',' << j << ',' << format_double(res.per_process[i][j]) << '\n';
            }
        }
    }
    if (!args.summary.empty()) {
        auto s = open_output(args.summary, manifest);
        s << summary.dump(2) << '\n';
    }
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

int run_table1(const Table1Args& args, Manifest& manifest) {
    if (args.row != 1 && args.row != 2) throw UsageError("--row must be 1 or 2");
    if (args.paths == 0) throw UsageError("--paths must be positive");
    const ParamSet truth = table1_truth(args.row);
    manifest.config = {{"row", args.row}, {"paths", args.paths}, {"n_events", args.n_events},
                       {"beta0", args.beta0}, {"restarts", args.restarts}, {"seed", args.seed}};
    const auto names = table1_names();
    std::vector<std::optional<std::vector<double>>> estimates(args.paths);
    std::vector<std::string> errors(args.paths);
    parallel_for(args.paths, args.jobs, [&](std::size_t p) {
        try {
            SimConfig sim;
            sim.params = truth;
            sim.n_events = args.n_events;
            sim.seed = derive_seed(args.seed, p);
            const auto path = simulate(sim).stream;
            FitConfig fc;
            fc.beta0 = args.beta0;
            fc.restarts = args.restarts;
            fc.seed = derive_seed(args.seed, p, 1);
            fc.compute_standard_errors = false;
            estimates[p] = fit(path, fc).values;
        } catch (const std::exception& e) {
            errors[p] = e.what();
        }
    });

    auto out = open_output(args.out, manifest);
    out << "# spreadhawkes table1 v" << kSchemaVersion << '\n' << "label";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    std::vector<std::vector<double>> ok;
    for (std::size_t p = 0; p < args.paths; ++p) {
        if (!estimates[p]) {
            manifest.failures.push_back({{"path", p}, {"error", errors[p]}});
            continue;
        }
        ok.push_back(*estimates[p]);
        out << "path_" << p;
        for (double v : *estimates[p]) out << ',' << format_double(v);
        out << '\n';
    }
    const auto truth_values = pack(truth, ModelVariant::Proposed);
    out << "true";
    for (double v : truth_values) out << ',' << format_double(v);
    out << '\n';
    if (!ok.empty()) {
        std::vector<double> mean(names.size(), 0.0);
        std::vector<double> sd(names.size(), 0.0);
        for (const auto& e : ok) {
            for (std::size_t i = 0; i < names.size(); ++i) mean[i] += e[i] / static_cast<double>(ok.size());
        }
        for (const auto& e : ok) {
            for (std::size_t i = 0; i < names.size(); ++i) sd[i] += (e[i] - mean[i]) * (e[i] - mean[i]);
        }
        for (auto& s : sd) s = ok.size() > 1 ? std::sqrt(s / static_cast<double>(ok.size() - 1)) : 0.0;
        out << "mean";
        for (double v : mean) out << ',' << format_double(v);
        out << "\nstd";
        for (double v : sd) out << ',' << format_double(v);
        out << '\n';
    }
    if (ok.size() != args.paths) {
        manifest.status = "partial";
        return kDataError;
    }
    return kOk;
}

int run_convergence(const ConvergenceArgs& args, Manifest& manifest) {
    ConvergenceConfig config;
    config.truth = convergence_truth(args.beta);
    config.n_events = args.n_events;
    config.beta0_grid = args.grid;
    config.replications = args.replications;
    config.success_threshold = args.threshold;
    config.start = parse_start(args.start);
    config.optimizer = parse_optimizer(args.optimizer);
    config.seed = args.seed;
    config.jobs = args.jobs;
    manifest.config = {{"beta", args.beta},       {"n_events", args.n_events},   {"grid", args.grid},
                       {"replications", args.replications}, {"threshold", args.threshold}, {"start", args.start},
                       {"optimizer", args.optimizer}, {"seed", args.seed}};
    const auto rows = convergence_experiment(config);
    auto out = open_output(args.out, manifest);
    out << "# spreadhawkes convergence v" << kSchemaVersion << '\n'
        << "beta,beta0,n_events,replications,successes,success_rate,median_rmse\n";
    for (const auto& r : rows) {
        auto sorted = r.rmse;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.empty() ? NAN : sorted[sorted.size() / 2];
        out << format_double(args.beta) << ',' << format_double(r.beta0) << ',' << args.n_events << ','
            << r.replications << ',' << r.successes << ',' << format_double(r.success_rate()) << ','
            << csv_number(median) << '\n';
    }
    if (!args.details.empty()) {
        auto d = open_output(args.details, manifest);
        d << "# spreadhawkes convergence-detail v" << kSchemaVersion << "\nbeta0,replication,rmse\n";
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < r.rmse.size(); ++k) {
                d << format_double(r.beta0) << ',' << k << ',' << csv_number(r.rmse[k]) << '\n';
            }
        }
    }
    return kOk;
}

int run_analytics(const AnalyticsArgs& args, Manifest& manifest) {
    manifest.config = {{"fits", args.fits}, {"window", args.window}};
    const auto rows = read_fit_rows(std::filesystem::path(args.fits));
    std::vector<double> abar;
    std::vector<double> ratio;
    for (const auto& r : rows) {
        if (r.variant != ModelVariant::Proposed) throw IngestError("analytics needs fits of the proposed model");
        abar.push_back(alpha_bar(r.params));
        ratio.push_back(liquidity_ratio(r.params).ratio.value_or(NAN));
    }
    const auto abar_ma = moving_average(abar, args.window);
    const auto ratio_ma = moving_average(ratio, args.window);
    auto out = open_output(args.out, manifest);
    out << "# spreadhawkes analytics v" << kSchemaVersion << '\n'
        << "window_start,window_end,alpha_bar,alpha_bar_ma,provision_mean,depletion_mean,liquidity_ratio,"
           "liquidity_ratio_ma,trace,determinant,stable,steady_state_level,steady_state_rate\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = rows[i].params;
        const auto lr = liquidity_ratio(p);
        out << format_double(rows[i].window_start) << ',' << format_double(rows[i].window_end) << ','
            << format_double(abar[i]) << ',' << format_double(abar_ma[i]) << ',' << format_double(lr.provision_mean)
            << ',' << format_double(lr.depletion_mean) << ',' << csv_number(ratio[i]) << ',' << csv_number(ratio_ma[i]);
        if (p.eta > 0.0) {
            const auto s = stability_report(p);
            out << ',' << format_double(s.trace) << ',' << format_double(s.determinant) << ',' << (s.stable ? 1 : 0)
                << ',' << csv_number(s.steady_state_level.value_or(NAN)) << ','
                << csv_number(s.steady_state_rate.value_or(NAN));
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
    return kOk;
}

}  // namespace spreadhawkes::cli
