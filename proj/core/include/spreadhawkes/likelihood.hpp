#pragma once

#include <cstddef>
#include <optional>

#include "spreadhawkes/intensity.hpp"

namespace spreadhawkes {

/// Log-likelihood with its per-process decomposition. When an event lands
/// where its own intensity is zero the value is -inf and valid is false;
/// callers must not feed such a value into an optimizer step.
struct LogLikelihood {
    double value{0.0};
    bool valid{true};
    std::optional<std::size_t> zero_intensity_event;
    Rates per_process{};  // sum log lambda_i(t_j) - Lambda_i(0, T)
    std::size_t n_events{0};
};

[[nodiscard]] LogLikelihood log_likelihood(const EventStream& stream, const Kernel& kernel);
[[nodiscard]] LogLikelihood log_likelihood(const EventStream& stream, const ParamSet& params, ModelVariant variant);

[[nodiscard]] inline double aic(double log_l, std::size_t k) { return 2.0 * static_cast<double>(k) - 2.0 * log_l; }

[[nodiscard]] inline double bic(double log_l, std::size_t k, double n) {
    return static_cast<double>(k) * std::log(n) - 2.0 * log_l;
}

}  // namespace spreadhawkes
