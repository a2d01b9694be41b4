#include "spreadhawkes/likelihood.hpp"

#include <limits>

namespace spreadhawkes {

LogLikelihood log_likelihood(const EventStream& stream, const Kernel& kernel) {
    LogLikelihood out;
    out.n_events = stream.events.size();
    Rates sums{};
    sweep(
        stream, kernel,
        [&](std::size_t j, double own, const Rates&, const Rates& comp) {
            const std::size_t i = index_of(stream.events[j].kind);
            if (!(own > 0.0) && out.valid) {
                out.valid = false;
                out.zero_intensity_event = j;
            }
            if (out.valid) sums[i] += std::log(own);
            for (std::size_t k = 0; k < 4; ++k) sums[k] -= comp[k];
        },
        [&](const Rates& comp) {
            for (std::size_t k = 0; k < 4; ++k) sums[k] -= comp[k];
        });
    out.per_process = sums;
    if (!out.valid) {
        out.value = -std::numeric_limits<double>::infinity();
        out.per_process[index_of(stream.events[*out.zero_intensity_event].kind)] = out.value;
        return out;
    }
    out.value = sums[0] + sums[1] + sums[2] + sums[3];
    return out;
}

LogLikelihood log_likelihood(const EventStream& stream, const ParamSet& params, ModelVariant variant) {
    return log_likelihood(stream, Kernel::compile(params, variant));
}

}  // namespace spreadhawkes
