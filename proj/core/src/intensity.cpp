#include "spreadhawkes/intensity.hpp"

#include <string>

namespace spreadhawkes {

namespace {

constexpr std::size_t kAskUp = 0;
constexpr std::size_t kAskDown = 1;
constexpr std::size_t kBidUp = 2;
constexpr std::size_t kBidDown = 3;

Matrix4 structured_alpha(const ParamSet& p) {
    // Rows are targets, columns sources; the narrowing block is handled by the reset rule.
    return {{{p.alpha_s1, p.alpha_m, p.alpha_s2, 0.0},
             {p.alpha_w1, 0.0, 0.0, p.alpha_w2},
             {p.alpha_w2, 0.0, 0.0, p.alpha_w1},
             {0.0, p.alpha_s2, p.alpha_m, p.alpha_s1}}};
}

void set_shared_xi(Matrix4& xi, double value) {
    for (auto target : {kAskDown, kBidUp}) {
        for (auto source : {kAskDown, kBidUp}) xi[target][source] = value;
    }
}

// (1 - e^{-r dt}) / r
double decay_integral(double rate, double dt) { return -std::expm1(-rate * dt) / rate; }

}  // namespace

Kernel Kernel::compile(const ParamSet& params, ModelVariant variant) {
    if (variant == ModelVariant::SpreadOnly) {
        throw std::invalid_argument("the spread-only model has two processes; use simulate_spread_only");
    }
    validate(params, variant);

    Kernel k;
    k.variant = variant;
    k.base_const = {params.mu, 0.0, 0.0, params.mu};
    k.base_slope = {0.0, params.eta, params.eta, 0.0};
    k.alpha = structured_alpha(params);
    set_shared_xi(k.xi, params.xi);
    k.narrowing = NarrowingRule::ResetLinear;
    for (auto& row : k.group_rate) row.fill(params.beta);

    switch (variant) {
        case ModelVariant::Proposed:
        case ModelVariant::SpreadOnly:
            break;
        case ModelVariant::ConstantBase:
            k.indicator_base = true;
            k.narrowing = NarrowingRule::ResetAtMinimumOnly;
            break;
        case ModelVariant::BasicHawkes:
            k.base_const.fill(params.mu);
            k.base_slope.fill(0.0);
            k.alpha = params.alpha;
            k.xi = {};
            k.narrowing = NarrowingRule::Additive;
            break;
        case ModelVariant::ExtendedI:
            k.alpha[kAskUp][kBidDown] = params.alpha_14;
            k.alpha[kBidDown][kAskUp] = params.alpha_41;
            break;
        case ModelVariant::ExtendedII:
            k.base_const = {params.mu_1, 0.0, 0.0, params.mu_4};
            k.base_slope = params.eta_k;
            break;
        case ModelVariant::ExtendedIII:
            k.xi[kAskDown][kAskDown] = params.xi_k[0];
            k.xi[kAskDown][kBidUp] = params.xi_k[1];
            k.xi[kBidUp][kAskDown] = params.xi_k[2];
            k.xi[kBidUp][kBidUp] = params.xi_k[3];
            break;
        case ModelVariant::ExtendedIV:
            // Column-wise decay: one accumulator per source.
            k.groups = 4;
            for (std::size_t i = 0; i < 4; ++i) {
                for (std::size_t j = 0; j < 4; ++j) {
                    k.group_of[i][j] = static_cast<std::uint8_t>(j);
                    k.group_rate[i][j] = params.beta_k[j];
                }
            }
            k.single_rate = false;
            break;
        case ModelVariant::ExtendedV:
            for (std::size_t i = 0; i < 4; ++i) k.group_rate[i].fill(params.beta_k[i]);
            k.single_rate = false;
            break;
    }
    return k;
}

IntensityState::IntensityState(const Kernel& kernel, const MarketState& state, double t0)
    : kernel_(kernel), market_(state), t_(t0) {}

double IntensityState::excitement(std::size_t target) const {
    double sum = 0.0;
    for (std::size_t g = 0; g < kernel_.groups; ++g) sum += acc_[target][g];
    return sum;
}

Rates IntensityState::excitements() const {
    Rates e{};
    for (std::size_t i = 0; i < 4; ++i) e[i] = excitement(i);
    return e;
}

Rates IntensityState::intensity_at(double t) const {
    const double dt = t - t_;
    const double ell = market_.relative_level();
    Rates lambda{};
    const double shared = kernel_.single_rate ? std::exp(-kernel_.group_rate[0][0] * dt) : 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double value = kernel_.base(i, ell);
        for (std::size_t g = 0; g < kernel_.groups; ++g) {
            const double decay = kernel_.single_rate ? shared : std::exp(-kernel_.group_rate[i][g] * dt);
            value += acc_[i][g] * decay;
        }
        lambda[i] = value;
    }
    return lambda;
}

Rates IntensityState::compensator(double t0, double t1) const {
    IntensityState copy = *this;
    copy.advance(t0);
    return copy.integrate_to(t1);
}

void IntensityState::advance(double t) {
    const double dt = t - t_;
    if (dt < 0.0) throw std::invalid_argument("intensity state cannot move backwards in time");
    if (dt == 0.0) return;
    if (kernel_.single_rate) {
        const double decay = std::exp(-kernel_.group_rate[0][0] * dt);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t g = 0; g < kernel_.groups; ++g) acc_[i][g] *= decay;
        }
    } else {
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t g = 0; g < kernel_.groups; ++g) acc_[i][g] *= std::exp(-kernel_.group_rate[i][g] * dt);
        }
    }
    t_ = t;
}

Rates IntensityState::integrate_to(double t) {
    const double dt = t - t_;
    if (dt < 0.0) throw std::invalid_argument("intensity state cannot move backwards in time");
    const double ell = market_.relative_level();
    Rates comp{};
    if (dt == 0.0) return comp;
    if (kernel_.single_rate) {
        const double rate = kernel_.group_rate[0][0];
        const double decay = std::exp(-rate * dt);
        const double weight = decay_integral(rate, dt);
        for (std::size_t i = 0; i < 4; ++i) {
            double value = kernel_.base(i, ell) * dt;
            for (std::size_t g = 0; g < kernel_.groups; ++g) {
                value += acc_[i][g] * weight;
                acc_[i][g] *= decay;
            }
            comp[i] = value;
        }
    } else {
        for (std::size_t i = 0; i < 4; ++i) {
            double value = kernel_.base(i, ell) * dt;
            for (std::size_t g = 0; g < kernel_.groups; ++g) {
                const double rate = kernel_.group_rate[i][g];
                value += acc_[i][g] * decay_integral(rate, dt);
                acc_[i][g] *= std::exp(-rate * dt);
            }
            comp[i] = value;
        }
    }
    t_ = t;
    return comp;
}

Rates IntensityState::intensity_now() const {
    const double ell = market_.relative_level();
    Rates lambda{};
    for (std::size_t i = 0; i < 4; ++i) lambda[i] = kernel_.base(i, ell) + excitement(i);
    return lambda;
}

void IntensityState::on_event(double t, EventKind kind, std::int64_t delta) {
    advance(t);
    market_ = apply_event(market_, kind, delta);
    apply_kernel(kind);
}

void IntensityState::on_event(double t, EventKind kind, const MarketState& after) {
    advance(t);
    market_ = after;
    apply_kernel(kind);
}

void IntensityState::apply_kernel(EventKind kind) {
    const std::size_t source = index_of(kind);
    const bool reset = is_narrowing(kind) && kernel_.narrowing != NarrowingRule::Additive;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t g = kernel_.group_of[i][source];
        const bool narrowing_target = (i == kAskDown || i == kBidUp);
        if (reset && narrowing_target) {
            if (kernel_.narrowing == NarrowingRule::ResetLinear) {
                // Cancels all prior excitement of the narrowing intensities.
                acc_[i].fill(0.0);
                acc_[i][g] = kernel_.xi[i][source] * market_.relative_level();
            } else if (market_.level() == 0) {
                acc_[i].fill(0.0);
            } else {
                acc_[i][g] += kernel_.xi[i][source];
            }
        } else {
            acc_[i][g] += kernel_.alpha[i][source];
        }
    }
}

ReplayResult replay(const EventStream& stream, const ParamSet& params, ModelVariant variant) {
    const Kernel kernel = Kernel::compile(params, variant);
    ReplayResult out;
    out.own_intensity.reserve(stream.events.size());
    out.interval_compensator.reserve(stream.events.size());
    sweep(
        stream, kernel,
        [&](std::size_t j, double own, const Rates& lambda, const Rates& comp) {
            for (double v : lambda) {
                if (v < 0.0) throw NegativeIntensityError("negative intensity at event " + std::to_string(j));
            }
            out.own_intensity.push_back(own);
            out.interval_compensator.push_back(comp);
        },
        [&](const Rates& comp) { out.tail_compensator = comp; });
    return out;
}

}  // namespace spreadhawkes
