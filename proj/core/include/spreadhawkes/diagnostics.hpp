#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "spreadhawkes/intensity.hpp"

namespace spreadhawkes {

/// Time-changed inter-event gaps. per_process[i] holds the compensator
/// increments between consecutive events of process i, the first one measured
/// from the session start. The censored stretch after the last event of each
/// process is kept in tail, so sum(residuals) + sum(tail) equals the total compensator.
struct Residuals {
    std::array<std::vector<double>, 4> per_process;
    Rates tail{};

    [[nodiscard]] std::vector<double> pooled() const;
};

[[nodiscard]] Residuals residuals(const EventStream& stream, const ParamSet& params, ModelVariant variant);

struct QQPoint {
    double theoretical;
    double empirical;
};

/// Sorted residuals against Exp(1) quantiles at plotting positions (j - 0.5) / n.
[[nodiscard]] std::vector<QQPoint> qq_points(std::span<const double> residuals);

/// sup |F_n - F_Exp(1)|.
[[nodiscard]] double ks_statistic(std::span<const double> residuals);

/// Asymptotic Kolmogorov critical values.
[[nodiscard]] inline double ks_critical_5pct(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }
[[nodiscard]] inline double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

/// Mean of the five excitement parameters.
[[nodiscard]] double alpha_bar(const ParamSet& params);

struct LiquidityRatio {
    double provision_mean{0.0};  // (alpha_w1 + alpha_w2) / 2
    double depletion_mean{0.0};  // (alpha_s1 + alpha_s2 + alpha_m) / 3
    std::optional<double> ratio; // depletion / provision
};

[[nodiscard]] LiquidityRatio liquidity_ratio(const ParamSet& params);

/// Trailing mean; the first window-1 points average what is available.
[[nodiscard]] std::vector<double> moving_average(std::span<const double> series, std::size_t window = 20);

struct StabilityReport {
    double trace{0.0};
    double determinant{0.0};
    bool stable{false};
    std::optional<double> steady_state_level;  // E[L]
    std::optional<double> steady_state_rate;   // E[lambda_s^u] = E[lambda_s^d]
};

/// Mean-stability of the absolute-level spread system.
[[nodiscard]] StabilityReport stability_report(const ParamSet& params);

}  // namespace spreadhawkes
