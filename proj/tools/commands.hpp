#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace spreadhawkes::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Collects what a run did; written next to its outputs.
struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> outputs;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    std::string status{"ok"};

    void write(const std::string& path) const;
};

struct PreprocessArgs {
    std::string in;
    std::string out;
    std::string report;
    std::string errors;
    double tick{0.01};
    std::string session{"10:00-15:30"};
    std::uint64_t seed{1};
    std::string time_column{"time"};
    std::string bid_column{"bid"};
    std::string ask_column{"ask"};
};

struct FitArgs {
    std::string events;
    std::string out;
    std::string variant{"proposed"};
    double beta0{100.0};
    std::size_t restarts{3};
    std::uint64_t seed{1};
    std::string start{"heuristic"};
    std::string optimizer{"simplex"};
    bool no_standard_errors{false};
    std::vector<std::string> fixed;
    std::size_t jobs{1};
};

struct RollingArgs {
    FitArgs fit;
    std::string window{"3m"};
    std::string step{"1m"};
    bool daily{false};
};

struct SimulateArgs {
    std::string params;
    std::string preset;
    std::optional<double> horizon;
    std::optional<std::size_t> n_events;
    std::uint64_t seed{1};
    std::string jumps{"one"};
    double tick{0.01};
    double initial_bid{100.00};
    double initial_ask{100.01};
    std::string out;
};

struct SelectArgs {
    std::string events;
    std::string variants{"proposed,basic,ext1..ext5"};
    double beta0{100.0};
    std::size_t restarts{3};
    std::uint64_t seed{1};
    std::size_t jobs{1};
    std::string out;
};

struct DiagnoseArgs {
    std::string events;
    std::string params;
    std::string out;
    std::string residuals;
    std::string summary;
};

struct Table1Args {
    int row{1};
    std::size_t paths{50};
    std::size_t n_events{10000};
    double beta0{100.0};
    std::size_t restarts{1};
    std::uint64_t seed{1};
    std::size_t jobs{1};
    std::string out;
};

struct ConvergenceArgs {
    double beta{400.0};
    std::size_t n_events{5000};
    std::vector<double> grid{10.0, 50.0, 100.0, 400.0};
    std::size_t replications{50};
    double threshold{0.2};
    std::string start{"random"};
    std::string optimizer{"simplex"};
    std::uint64_t seed{1};
    std::size_t jobs{1};
    std::string out;
    std::string details;
};

struct AnalyticsArgs {
    std::string fits;
    std::size_t window{20};
    std::string out;
};

int run_preprocess(const PreprocessArgs& args, Manifest& manifest);
int run_fit(const FitArgs& args, Manifest& manifest);
int run_fit_rolling(const RollingArgs& args, Manifest& manifest);
int run_simulate(const SimulateArgs& args, Manifest& manifest);
int run_select(const SelectArgs& args, Manifest& manifest);
int run_diagnose(const DiagnoseArgs& args, Manifest& manifest);
int run_table1(const Table1Args& args, Manifest& manifest);
int run_convergence(const ConvergenceArgs& args, Manifest& manifest);
int run_analytics(const AnalyticsArgs& args, Manifest& manifest);

/// "proposed,basic,ext1..ext5" -> names; ranges expand over ext1..ext5.
[[nodiscard]] std::vector<std::string> expand_variants(const std::string& list);

}  // namespace spreadhawkes::cli
