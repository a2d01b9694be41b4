#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spreadhawkes {

enum class OptimizerMethod {
    NelderMead,     // adaptive simplex with restarts
    QuasiNewton,    // BFGS, central-difference gradients
    ClassicSimplex, // single fixed-coefficient simplex, evaluation budget
};

struct OptimizerOptions {
    OptimizerMethod method{OptimizerMethod::NelderMead};
    std::size_t max_iterations{20000};
    /// Stop when the objective stalls within this fraction of |f|.
    double relative_tolerance{1e-6};
    /// Simplex edge (Nelder-Mead) in the optimizer's coordinates.
    double initial_step{0.25};
    /// Simplex rebuilds around the incumbent after a stall.
    std::size_t max_restarts{6};

    /// Fixed-coefficient simplex started with edge 0.1 * max|x0|, stopped
    /// after 500 evaluations or when the simplex values agree to ~1.5e-8.
    [[nodiscard]] static OptimizerOptions classic() {
        return {OptimizerMethod::ClassicSimplex, 500, 1.490116119384765625e-8, 0.0, 0};
    }
};

struct OptimizationResult {
    std::vector<double> x;
    double value{0.0};
    double initial_value{0.0};
    std::size_t iterations{0};
    std::size_t evaluations{0};
    bool converged{false};
};

/// Objective to minimize; may return +inf for infeasible points.
using Objective = std::function<double(std::span<const double>)>;

[[nodiscard]] OptimizationResult minimize(const Objective& f, std::vector<double> x0, const OptimizerOptions& options);

/// Adaptive Nelder-Mead simplex with restarts.
[[nodiscard]] OptimizationResult nelder_mead(const Objective& f, std::vector<double> x0, const OptimizerOptions& options);

/// Simplex with reflection 1, expansion 2, contraction 0.5 and shrink 0.5.
/// max_iterations caps function evaluations; non-finite values count as 1e35.
[[nodiscard]] OptimizationResult classic_simplex(const Objective& f, std::vector<double> x0,
                                                 const OptimizerOptions& options);

/// BFGS with central-difference gradients and a backtracking line search.
[[nodiscard]] OptimizationResult quasi_newton(const Objective& f, std::vector<double> x0, const OptimizerOptions& options);

/// Central-difference gradient with per-coordinate step max(rel * |x_i|, abs_min).
[[nodiscard]] std::vector<double> numerical_gradient(const Objective& f, std::span<const double> x, double rel = 1e-5,
                                                     double abs_min = 1e-7);

}  // namespace spreadhawkes
