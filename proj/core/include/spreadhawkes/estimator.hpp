#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadhawkes/likelihood.hpp"
#include "spreadhawkes/optimizer.hpp"

namespace spreadhawkes {

/// How the first optimizer start is chosen.
enum class StartMode {
    Heuristic,    // mu0/eta0 from event rates, alpha0 = beta0/4, xi0 = beta0/10
    UniformRandom,  // mu0, eta0 ~ U(0, 10); alphas, xi ~ U(0, beta0)
};

/// Coordinates the optimizer works in.
enum class Parameterization {
    Log,      // log(theta), clamped to [1e-12, 1e9]
    Natural,  // theta itself; negative values are infeasible
};

struct FitConfig {
    ModelVariant variant{ModelVariant::Proposed};
    double beta0{100.0};
    std::optional<double> alpha0;  // default beta0 / 4
    std::optional<double> xi0;     // default beta0 / 10
    std::optional<double> mu0;     // default: half the widening event rate
    std::optional<double> eta0;    // default: half the narrowing rate over mean(ell)
    StartMode start{StartMode::Heuristic};
    std::size_t restarts{3};
    std::uint64_t seed{1};
    OptimizerOptions optimizer{};
    Parameterization parameterization{Parameterization::Log};
    std::size_t min_events_per_process{50};
    bool compute_standard_errors{true};
    /// Parameters held at a given value instead of estimated.
    std::map<std::string, double> fixed;
    std::size_t jobs{1};
};

struct StandardErrors {
    std::vector<std::optional<double>> values;  // one per free parameter; empty when unavailable
    std::optional<double> min_eigenvalue;       // of the negative Hessian
    std::string note;
};

struct FitReport {
    ModelVariant variant{ModelVariant::Proposed};
    ParamSet estimates;
    std::vector<std::string> names;                      // every parameter of the variant
    std::vector<double> values;                          // aligned with names
    std::vector<std::optional<double>> standard_errors;  // aligned with names; fixed params empty
    std::vector<bool> free;
    std::optional<double> hessian_min_eigenvalue;
    std::string standard_error_note;
    double log_likelihood{0.0};
    double initial_log_likelihood{0.0};
    double aic{0.0};
    double bic{0.0};
    std::size_t n_events{0};
    std::array<std::size_t, 4> counts{};
    std::size_t k{0};
    bool converged{false};
    std::size_t iterations{0};
    std::size_t evaluations{0};
    std::size_t best_start{0};
    double wall_seconds{0.0};
    bool stability_condition{false};
    bool reliable{true};
    bool xi_at_zero{false};
    double window_start{0.0};
    double window_end{0.0};
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time-average relative level over the session.
[[nodiscard]] double mean_relative_level(const EventStream& stream);

/// The optimizer start for the given restart index (0 = configured start mode).
[[nodiscard]] ParamSet initial_parameters(const EventStream& stream, const FitConfig& config, std::size_t restart);

/// Maximum likelihood over log-transformed parameters; best of config.restarts starts.
[[nodiscard]] FitReport fit(const EventStream& stream, const FitConfig& config);

/// Square roots of the diagonal of the inverse negative Hessian of the
/// log-likelihood (central differences in the natural parameters).
[[nodiscard]] StandardErrors standard_errors(const EventStream& stream, const ParamSet& params, ModelVariant variant,
                                             const std::vector<std::string>& free_names);
[[nodiscard]] StandardErrors standard_errors(const EventStream& stream, const ParamSet& params, ModelVariant variant);

/// Central-difference Hessian of the log-likelihood in the named parameters.
[[nodiscard]] std::vector<std::vector<double>> log_likelihood_hessian(const EventStream& stream, const ParamSet& params,
                                                                      ModelVariant variant,
                                                                      const std::vector<std::string>& names);

/// Root-mean-squared relative error; components with zero truth use absolute error.
[[nodiscard]] double relative_rmse(const ParamSet& estimate, const ParamSet& truth, ModelVariant variant);

struct ConvergenceConfig {
    ParamSet truth;
    ModelVariant variant{ModelVariant::Proposed};
    std::size_t n_events{5000};
    std::vector<double> beta0_grid{10.0, 50.0, 100.0, 400.0};
    std::size_t replications{50};
    double success_threshold{0.2};
    StartMode start{StartMode::UniformRandom};
    OptimizerOptions optimizer{};
    Parameterization parameterization{Parameterization::Log};
    std::uint64_t seed{1};
    std::size_t jobs{1};
};

struct ConvergenceRow {
    double beta0{0.0};
    std::size_t replications{0};
    std::size_t successes{0};
    std::vector<double> rmse;
    [[nodiscard]] double success_rate() const {
        return replications == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(replications);
    }
};

/// The truth used by the initial-value study: mu = 0.1, eta = 0, xi = beta/10, all alphas beta/4.
[[nodiscard]] ParamSet convergence_truth(double beta);

/// Paired design: replication r uses the same simulated path for every beta0.
[[nodiscard]] std::vector<ConvergenceRow> convergence_experiment(const ConvergenceConfig& config);

/// Deterministic per-task seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace spreadhawkes
