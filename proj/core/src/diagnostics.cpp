#include "spreadhawkes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spreadhawkes {

std::vector<double> Residuals::pooled() const {
    std::vector<double> all;
    for (const auto& r : per_process) all.insert(all.end(), r.begin(), r.end());
    return all;
}

Residuals residuals(const EventStream& stream, const ParamSet& params, ModelVariant variant) {
    const Kernel kernel = Kernel::compile(params, variant);
    Residuals out;
    Rates running{};
    sweep(
        stream, kernel,
        [&](std::size_t j, double, const Rates&, const Rates& comp) {
            for (std::size_t i = 0; i < 4; ++i) running[i] += comp[i];
            const std::size_t own = index_of(stream.events[j].kind);
            out.per_process[own].push_back(running[own]);
            running[own] = 0.0;
        },
        [&](const Rates& comp) {
            for (std::size_t i = 0; i < 4; ++i) out.tail[i] = running[i] + comp[i];
        });
    return out;
}

std::vector<QQPoint> qq_points(std::span<const double> residuals) {
    if (residuals.empty()) throw std::invalid_argument("Q-Q plot needs at least one residual");
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<QQPoint> points;
    points.reserve(sorted.size());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        const double position = (static_cast<double>(j) + 0.5) / n;
        points.push_back({-std::log1p(-position), sorted[j]});
    }
    return points;
}

double ks_statistic(std::span<const double> residuals) {
    if (residuals.empty()) throw std::invalid_argument("KS statistic needs at least one residual");
    std::vector<double> sorted(residuals.begin(), residuals.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        const double cdf = -std::expm1(-std::max(sorted[j], 0.0));
        d = std::max({d, (static_cast<double>(j) + 1.0) / n - cdf, cdf - static_cast<double>(j) / n});
    }
    return d;
}

double alpha_bar(const ParamSet& p) {
    return (p.alpha_s1 + p.alpha_s2 + p.alpha_m + p.alpha_w1 + p.alpha_w2) / 5.0;
}

LiquidityRatio liquidity_ratio(const ParamSet& p) {
    LiquidityRatio out;
    out.provision_mean = (p.alpha_w1 + p.alpha_w2) / 2.0;
    out.depletion_mean = (p.alpha_s1 + p.alpha_s2 + p.alpha_m) / 3.0;
    if (out.provision_mean != 0.0) out.ratio = out.depletion_mean / out.provision_mean;
    return out;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw std::invalid_argument("moving-average window must be at least 1");
    std::vector<double> out(series.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= window) sum -= series[i - window];
        const std::size_t count = std::min(i + 1, window);
        out[i] = sum / static_cast<double>(count);
    }
    return out;
}

StabilityReport stability_report(const ParamSet& p) {
    if (!(p.eta > 0.0)) throw std::invalid_argument("stability analysis needs eta > 0");
    StabilityReport out;
    const double depletion = p.alpha_s1 + p.alpha_s2 + p.alpha_m;
    out.trace = p.alpha_s1 - p.beta - 2.0 * p.eta;
    out.determinant = 2.0 * p.eta * (p.beta - depletion);
    out.stable = out.trace < 0.0 && out.determinant > 0.0;
    if (out.stable) {
        out.steady_state_rate = 2.0 * p.beta * p.mu / (p.beta - depletion);
        out.steady_state_level = p.beta * p.mu / (p.eta * (p.beta - depletion));
    }
    return out;
}

}  // namespace spreadhawkes
