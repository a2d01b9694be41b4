#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/ingest.hpp"
#include "spreadhawkes/parallel.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes::cli;

namespace {

void report_error(std::string_view kind, std::string_view message) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

void add_fit_options(CLI::App& cmd, FitArgs& args) {
    cmd.add_option("--events", args.events, "Event CSV")->required()->check(CLI::ExistingFile);
    cmd.add_option("--variant", args.variant, "proposed, basic, ext1..ext5 or constant")->capture_default_str();
    cmd.add_option("--beta0", args.beta0, "Initial decay rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--restarts", args.restarts, "Optimizer starts")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--seed", args.seed, "Seed for randomized starts")->capture_default_str();
    cmd.add_option("--start", args.start, "heuristic or random")->capture_default_str();
    cmd.add_option("--optimizer", args.optimizer, "simplex, bfgs or classic")->capture_default_str();
    cmd.add_flag("--no-se", args.no_standard_errors, "Skip standard errors");
    cmd.add_option("--fix", args.fixed, "Hold a parameter fixed: name=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spread-dependent Hawkes models of best bid/ask dynamics"};
    app.set_version_flag("--version", std::string(SPREADHAWKES_VERSION));
    app.require_subcommand(1);

    std::size_t jobs = spreadhawkes::default_jobs();
    std::string manifest_path;
    app.add_option("--jobs", jobs, "Worker threads (default: SPREADHAWKES_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--manifest", manifest_path, "Run manifest path (default: <out>.manifest.json)");

    PreprocessArgs pre;
    auto* c_pre = app.add_subcommand("preprocess", "Turn a quote file into an event stream");
    c_pre->add_option("--in", pre.in, "Quote CSV")->required()->check(CLI::ExistingFile);
    c_pre->add_option("--out", pre.out, "Event CSV")->required();
    c_pre->add_option("--report", pre.report, "Preprocessing report JSON");
    c_pre->add_option("--errors", pre.errors, "Malformed-row sidecar (default: <out>.errors.csv)");
    c_pre->add_option("--tick", pre.tick, "Tick size")->capture_default_str()->check(CLI::PositiveNumber);
    c_pre->add_option("--session", pre.session, "Session window HH:MM-HH:MM")->capture_default_str();
    c_pre->add_option("--seed", pre.seed, "Seed for random split order")->capture_default_str();
    c_pre->add_option("--time-column", pre.time_column)->capture_default_str();
    c_pre->add_option("--bid-column", pre.bid_column)->capture_default_str();
    c_pre->add_option("--ask-column", pre.ask_column)->capture_default_str();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Maximum-likelihood fit of one stream");
    add_fit_options(*c_fit, fit);
    c_fit->add_option("--out", fit.out, "Fit JSON")->required();

    RollingArgs rolling;
    auto* c_roll = app.add_subcommand("fit-rolling", "Fits over sliding windows");
    add_fit_options(*c_roll, rolling.fit);
    c_roll->add_option("--out", rolling.fit.out, "Fit table CSV")->required();
    c_roll->add_option("--window", rolling.window, "Window length (e.g. 3m)")->capture_default_str();
    c_roll->add_option("--step", rolling.step, "Window step (e.g. 1m)")->capture_default_str();
    c_roll->add_flag("--daily", rolling.daily, "One window covering the session");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate an event stream");
    c_sim->add_option("--params", sim.params, "Fit JSON with variant and parameters")->check(CLI::ExistingFile);
    c_sim->add_option("--preset", sim.preset, "table1-row1 or table1-row2");
    c_sim->add_option("--horizon", sim.horizon, "Seconds to simulate")->check(CLI::PositiveNumber);
    c_sim->add_option("--n-events", sim.n_events, "Number of events")->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", sim.seed)->capture_default_str();
    c_sim->add_option("--jumps", sim.jumps, "one, sample, or a kind,size,probability CSV")->capture_default_str();
    c_sim->add_option("--tick", sim.tick)->capture_default_str()->check(CLI::PositiveNumber);
    c_sim->add_option("--initial-bid", sim.initial_bid)->capture_default_str();
    c_sim->add_option("--initial-ask", sim.initial_ask)->capture_default_str();
    c_sim->add_option("--out", sim.out, "Event CSV")->required();

    SelectArgs sel;
    auto* c_sel = app.add_subcommand("select", "AIC/BIC table across model variants");
    c_sel->add_option("--events", sel.events)->required()->check(CLI::ExistingFile);
    c_sel->add_option("--variants", sel.variants)->capture_default_str();
    c_sel->add_option("--beta0", sel.beta0)->capture_default_str()->check(CLI::PositiveNumber);
    c_sel->add_option("--restarts", sel.restarts)->capture_default_str()->check(CLI::PositiveNumber);
    c_sel->add_option("--seed", sel.seed)->capture_default_str();
    c_sel->add_option("--out", sel.out)->required();

    DiagnoseArgs diag;
    auto* c_diag = app.add_subcommand("diagnose", "Time-change residuals, Q-Q points and KS distances");
    c_diag->add_option("--events", diag.events)->required()->check(CLI::ExistingFile);
    c_diag->add_option("--params", diag.params)->required()->check(CLI::ExistingFile);
    c_diag->add_option("--out", diag.out, "Q-Q CSV")->required();
    c_diag->add_option("--residuals", diag.residuals, "Residual CSV");
    c_diag->add_option("--summary", diag.summary, "KS summary JSON");

    auto* c_exp = app.add_subcommand("experiment", "Simulation studies");
    c_exp->require_subcommand(1);
    Table1Args t1;
    auto* c_t1 = c_exp->add_subcommand("table1", "Parameter recovery on simulated paths");
    c_t1->add_option("--row", t1.row, "1 (beta = 50) or 2 (beta = 1200)")->capture_default_str();
    c_t1->add_option("--paths", t1.paths)->capture_default_str()->check(CLI::PositiveNumber);
    c_t1->add_option("--n-events", t1.n_events)->capture_default_str()->check(CLI::PositiveNumber);
    c_t1->add_option("--beta0", t1.beta0)->capture_default_str()->check(CLI::PositiveNumber);
    c_t1->add_option("--restarts", t1.restarts)->capture_default_str()->check(CLI::PositiveNumber);
    c_t1->add_option("--seed", t1.seed)->capture_default_str();
    c_t1->add_option("--out", t1.out)->required();
    ConvergenceArgs conv;
    auto* c_conv = c_exp->add_subcommand("convergence", "Success rate of fits against the initial beta");
    c_conv->add_option("--beta", conv.beta)->capture_default_str()->check(CLI::PositiveNumber);
    c_conv->add_option("--n-events", conv.n_events)->capture_default_str()->check(CLI::PositiveNumber);
    c_conv->add_option("--grid", conv.grid, "Initial beta values")->delimiter(',')->capture_default_str();
    c_conv->add_option("--replications", conv.replications)->capture_default_str()->check(CLI::PositiveNumber);
    c_conv->add_option("--threshold", conv.threshold, "Relative RMSE counted as success")->capture_default_str();
    c_conv->add_option("--start", conv.start, "random or heuristic")->capture_default_str();
    c_conv->add_option("--optimizer", conv.optimizer, "simplex, bfgs or classic")->capture_default_str();
    c_conv->add_option("--seed", conv.seed)->capture_default_str();
    c_conv->add_option("--out", conv.out)->required();
    c_conv->add_option("--details", conv.details, "Per-replication RMSE CSV");

    AnalyticsArgs an;
    auto* c_an = app.add_subcommand("analytics", "Excitement averages, liquidity ratio and stability per fit");
    c_an->add_option("--fits", an.fits, "Fit table from fit-rolling")->required()->check(CLI::ExistingFile);
    c_an->add_option("--window", an.window, "Moving-average length")->capture_default_str()->check(
        CLI::PositiveNumber);
    c_an->add_option("--out", an.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    Manifest manifest;
    manifest.argv.assign(argv, argv + argc);
    std::string out;
    auto run = [&]() -> int {
        fit.jobs = rolling.fit.jobs = jobs;
        sel.jobs = t1.jobs = conv.jobs = jobs;
        if (c_pre->parsed()) {
            manifest.command = "preprocess";
            out = pre.out;
            return run_preprocess(pre, manifest);
        }
        if (c_fit->parsed()) {
            manifest.command = "fit";
            out = fit.out;
            return run_fit(fit, manifest);
        }
        if (c_roll->parsed()) {
            manifest.command = "fit-rolling";
            out = rolling.fit.out;
            return run_fit_rolling(rolling, manifest);
        }
        if (c_sim->parsed()) {
            manifest.command = "simulate";
            out = sim.out;
            return run_simulate(sim, manifest);
        }
        if (c_sel->parsed()) {
            manifest.command = "select";
            out = sel.out;
            return run_select(sel, manifest);
        }
        if (c_diag->parsed()) {
            manifest.command = "diagnose";
            out = diag.out;
            return run_diagnose(diag, manifest);
        }
        if (c_t1->parsed()) {
            manifest.command = "experiment table1";
            out = t1.out;
            return run_table1(t1, manifest);
        }
        if (c_conv->parsed()) {
            manifest.command = "experiment convergence";
            out = conv.out;
            return run_convergence(conv, manifest);
        }
        manifest.command = "analytics";
        out = an.out;
        return run_analytics(an, manifest);
    };

    int code = kOk;
    try {
        code = run();
    } catch (const UsageError& e) {
        report_error("usage", e.what());
        code = kUsageError;
    } catch (const std::invalid_argument& e) {
        report_error("invalid_argument", e.what());
        code = kUsageError;
    } catch (const spreadhawkes::IngestError& e) {
        report_error("ingest", e.what());
        code = kDataError;
    } catch (const spreadhawkes::FitError& e) {
        report_error("fit", e.what());
        code = kDataError;
    } catch (const spreadhawkes::SimulationError& e) {
        report_error("simulation", e.what());
        code = kDataError;
    } catch (const std::exception& e) {
        report_error("runtime", e.what());
        code = kDataError;
    }
    if (code != kOk && manifest.status == "ok") manifest.status = "failed";
    if (!out.empty() || !manifest_path.empty()) {
        manifest.write(manifest_path.empty() ? out + ".manifest.json" : manifest_path);
    }
    return code;
}
