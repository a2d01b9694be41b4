#include "spreadhawkes/estimator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "spreadhawkes/parallel.hpp"
#include "spreadhawkes/simulator.hpp"

namespace spreadhawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinParameter = 1e-12;
constexpr double kMaxParameter = 1e9;

double to_natural(double z) {
    return std::exp(std::clamp(z, std::log(kMinParameter), std::log(kMaxParameter)));
}

double to_unconstrained(double theta) { return std::log(std::max(theta, kMinParameter)); }

double negative_log_likelihood(const EventStream& stream, const ParamSet& params, ModelVariant variant) {
    try {
        const auto ll = log_likelihood(stream, params, variant);
        return ll.valid && std::isfinite(ll.value) ? -ll.value : kInf;
    } catch (const std::invalid_argument&) {
        return kInf;
    }
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

double mean_relative_level(const EventStream& stream) {
    const double duration = stream.duration();
    if (!(duration > 0.0)) return stream.initial_state.relative_level();
    double area = 0.0;
    double last = stream.session_start;
    double ell = stream.initial_state.relative_level();
    for (const auto& e : stream.events) {
        area += ell * (e.t - last);
        last = e.t;
        ell = e.state_after.relative_level();
    }
    area += ell * (stream.session_end - last);
    return area / duration;
}

ParamSet initial_parameters(const EventStream& stream, const FitConfig& config, std::size_t restart) {
    const double duration = stream.duration();
    if (!(duration > 0.0)) throw FitError("stream has an empty session window");
    const auto n = stream.counts();
    const double total = static_cast<double>(n[0] + n[1] + n[2] + n[3]);
    const double mean_ell = mean_relative_level(stream);
    const double beta0 = config.beta0;
    if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");

    double mu = std::max(0.5 * static_cast<double>(n[0] + n[3]) / (2.0 * duration), 1e-6);
    double eta = mean_ell > 0.0 ? std::max(0.5 * static_cast<double>(n[1] + n[2]) / (2.0 * duration) / mean_ell, 1e-6)
                                : 1.0;
    mu = config.mu0.value_or(mu);
    eta = config.eta0.value_or(eta);

    const bool random = restart > 0 || config.start == StartMode::UniformRandom;
    Rng rng(derive_seed(config.seed, restart, 0x5eed));
    std::uniform_real_distribution<double> below_beta(0.0, beta0);
    std::uniform_real_distribution<double> below_ten(0.0, 10.0);
    if (config.start == StartMode::UniformRandom) {
        mu = below_ten(rng);
        eta = below_ten(rng);
    }
    const double alpha0 = config.alpha0.value_or(beta0 / 4.0);
    const double xi0 = config.xi0.value_or(beta0 / 10.0);
    auto alpha = [&] { return random ? below_beta(rng) : alpha0; };
    auto xi = [&] { return random ? below_beta(rng) : xi0; };

    ParamSet p;
    p.mu = mu;
    p.eta = eta;
    p.alpha_s1 = alpha();
    p.alpha_s2 = alpha();
    p.alpha_m = alpha();
    p.alpha_w1 = alpha();
    p.alpha_w2 = alpha();
    p.beta = beta0;
    p.xi = xi();
    p.alpha_14 = alpha() / 4.0;
    p.alpha_41 = alpha() / 4.0;
    p.mu_1 = mu;
    p.mu_4 = mu;
    p.eta_k = {eta / 10.0, eta, eta, eta / 10.0};
    for (auto& v : p.xi_k) v = xi();
    p.beta_k.fill(beta0);
    if (config.variant == ModelVariant::BasicHawkes) {
        p.mu = std::max(0.5 * total / (4.0 * duration), 1e-6);
        if (config.mu0) p.mu = *config.mu0;
        for (auto& row : p.alpha) {
            for (auto& v : row) v = alpha() / 4.0;
        }
    }
    for (const auto& [name, value] : config.fixed) set_parameter(p, name, value);
    return p;
}

FitReport fit(const EventStream& stream, const FitConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    const auto names = parameter_names(config.variant);
    for (const auto& [name, value] : config.fixed) {
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw std::invalid_argument("fixed parameter '" + name + "' is not part of variant " +
                                        std::string(to_string(config.variant)));
        }
    }
    if (config.restarts == 0) throw std::invalid_argument("at least one optimizer start is required");

    std::vector<std::string> free_names;
    for (const auto& name : names) {
        if (!config.fixed.contains(name)) free_names.push_back(name);
    }

    struct Start {
        OptimizationResult result;
        ParamSet base;
    };
    std::vector<Start> starts(config.restarts);
    parallel_for(config.restarts, config.jobs, [&](std::size_t s) {
        const ParamSet base = initial_parameters(stream, config, s);
        const bool natural = config.parameterization == Parameterization::Natural;
        auto to_params = [&](std::span<const double> z) {
            ParamSet p = base;
            for (std::size_t i = 0; i < free_names.size(); ++i) {
                set_parameter(p, free_names[i], natural ? z[i] : to_natural(z[i]));
            }
            return p;
        };
        const Objective objective = [&](std::span<const double> z) {
            return negative_log_likelihood(stream, to_params(z), config.variant);
        };
        std::vector<double> z0;
        for (const auto& name : free_names) {
            const double theta = get_parameter(base, name);
            z0.push_back(natural ? theta : to_unconstrained(theta));
        }
        starts[s].result = minimize(objective, z0, config.optimizer);
        starts[s].base = to_params(starts[s].result.x);
    });

    std::size_t best = 0;
    for (std::size_t s = 1; s < starts.size(); ++s) {
        if (starts[s].result.value < starts[best].result.value) best = s;
    }
    const auto& winner = starts[best];
    if (!std::isfinite(winner.result.value)) {
        throw FitError(
            "log-likelihood is -inf at every start: some event occurs where its own intensity is zero "
            "(e.g. a narrowing move recorded at the minimum spread); clean the data before fitting");
    }

    FitReport report;
    report.variant = config.variant;
    report.estimates = winner.base;
    report.names = names;
    report.values = pack(winner.base, config.variant);
    report.free.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) report.free[i] = !config.fixed.contains(names[i]);
    report.log_likelihood = -winner.result.value;
    report.initial_log_likelihood = -winner.result.initial_value;
    report.k = free_names.size();
    report.n_events = stream.events.size();
    report.counts = stream.counts();
    report.aic = aic(report.log_likelihood, report.k);
    report.bic = bic(report.log_likelihood, report.k, static_cast<double>(std::max<std::size_t>(report.n_events, 1)));
    report.converged = winner.result.converged;
    report.iterations = winner.result.iterations;
    for (const auto& s : starts) report.evaluations += s.result.evaluations;
    report.best_start = best;
    report.stability_condition = stability_condition(winner.base);
    report.reliable = std::all_of(report.counts.begin(), report.counts.end(),
                                  [&](std::size_t c) { return c >= config.min_events_per_process; });
    const bool has_xi = std::find(names.begin(), names.end(), "xi") != names.end();
    report.xi_at_zero = has_xi && winner.base.xi < 1e-8;
    report.window_start = stream.session_start;
    report.window_end = stream.session_end;

    report.standard_errors.assign(names.size(), std::nullopt);
    if (config.compute_standard_errors && !free_names.empty()) {
        const auto se = standard_errors(stream, winner.base, config.variant, free_names);
        for (std::size_t i = 0, f = 0; i < names.size(); ++i) {
            if (report.free[i]) report.standard_errors[i] = se.values.empty() ? std::nullopt : se.values[f++];
        }
        report.hessian_min_eigenvalue = se.min_eigenvalue;
        report.standard_error_note = se.note;
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::vector<std::vector<double>> log_likelihood_hessian(const EventStream& stream, const ParamSet& params,
                                                       ModelVariant variant, const std::vector<std::string>& names) {
    const std::size_t m = names.size();
    std::vector<double> theta(m), step(m);
    for (std::size_t i = 0; i < m; ++i) {
        theta[i] = get_parameter(params, names[i]);
        double h = std::max(1e-5 * std::abs(theta[i]), 1e-7);
        if (theta[i] > 0.0 && theta[i] - h <= 0.0) h = 0.5 * theta[i];
        step[i] = h;
    }
    auto eval = [&](std::size_t i, double di, std::size_t j, double dj) {
        ParamSet p = params;
        set_parameter(p, names[i], theta[i] + di);
        if (j != i) set_parameter(p, names[j], theta[j] + dj);
        else set_parameter(p, names[i], theta[i] + di + dj);
        return -negative_log_likelihood(stream, p, variant);
    };
    const double center = -negative_log_likelihood(stream, params, variant);
    std::vector<std::vector<double>> h(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        const double hi = step[i];
        h[i][i] = (eval(i, hi, i, 0.0) - 2.0 * center + eval(i, -hi, i, 0.0)) / (hi * hi);
        for (std::size_t j = 0; j < i; ++j) {
            const double hj = step[j];
            const double value = (eval(i, hi, j, hj) - eval(i, hi, j, -hj) - eval(i, -hi, j, hj) + eval(i, -hi, j, -hj)) /
                                 (4.0 * hi * hj);
            h[i][j] = value;
            h[j][i] = value;
        }
    }
    return h;
}

StandardErrors standard_errors(const EventStream& stream, const ParamSet& params, ModelVariant variant,
                               const std::vector<std::string>& free_names) {
    StandardErrors out;
    const std::size_t m = free_names.size();
    for (const auto& name : free_names) {
        if (!(get_parameter(params, name) > 0.0)) {
            out.note = "parameter " + name + " is on the boundary; Hessian unavailable";
            return out;
        }
    }
    const auto h = log_likelihood_hessian(stream, params, variant, free_names);
    Eigen::MatrixXd info(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            info(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -h[i][j];
        }
    }
    if (!info.allFinite()) {
        out.note = "Hessian has non-finite entries";
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
    const double min_eig = eig.eigenvalues().minCoeff();
    out.min_eigenvalue = min_eig;
    if (!(min_eig > 0.0)) {
        std::ostringstream os;
        os << "negative Hessian is not positive definite (smallest eigenvalue " << min_eig << ")";
        out.note = os.str();
        return out;
    }
    const Eigen::MatrixXd cov = info.inverse();
    for (std::size_t i = 0; i < m; ++i) {
        const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        out.values.push_back(v > 0.0 ? std::optional<double>(std::sqrt(v)) : std::nullopt);
    }
    return out;
}

StandardErrors standard_errors(const EventStream& stream, const ParamSet& params, ModelVariant variant) {
    return standard_errors(stream, params, variant, parameter_names(variant));
}

double relative_rmse(const ParamSet& estimate, const ParamSet& truth, ModelVariant variant) {
    const auto names = parameter_names(variant);
    double sum = 0.0;
    for (const auto& name : names) {
        const double t = get_parameter(truth, name);
        const double e = get_parameter(estimate, name);
        const double err = t != 0.0 ? (e - t) / t : e - t;
        sum += err * err;
    }
    return std::sqrt(sum / static_cast<double>(names.size()));
}

ParamSet convergence_truth(double beta) {
    ParamSet p;
    p.mu = 0.1;
    p.eta = 0.0;
    p.beta = beta;
    p.xi = beta / 10.0;
    p.alpha_s1 = p.alpha_s2 = p.alpha_m = p.alpha_w1 = p.alpha_w2 = beta / 4.0;
    return p;
}

std::vector<ConvergenceRow> convergence_experiment(const ConvergenceConfig& config) {
    if (config.replications == 0) throw std::invalid_argument("replications must be at least 1");
    const std::size_t grid = config.beta0_grid.size();
    std::vector<std::vector<double>> rmse(config.replications, std::vector<double>(grid, kInf));
    parallel_for(config.replications, config.jobs, [&](std::size_t r) {
        SimConfig sim;
        sim.params = config.truth;
        sim.variant = config.variant;
        sim.n_events = config.n_events;
        sim.seed = derive_seed(config.seed, r);
        const auto path = simulate(sim).stream;
        for (std::size_t g = 0; g < grid; ++g) {
            FitConfig fc;
            fc.variant = config.variant;
            fc.beta0 = config.beta0_grid[g];
            fc.start = config.start;
            fc.restarts = 1;
            fc.seed = derive_seed(config.seed, r, g + 1);
            fc.optimizer = config.optimizer;
            fc.parameterization = config.parameterization;
            fc.compute_standard_errors = false;
            fc.min_events_per_process = 0;
            try {
                rmse[r][g] = relative_rmse(fit(path, fc).estimates, config.truth, config.variant);
            } catch (const FitError&) {
                rmse[r][g] = kInf;
            }
        }
    });
    std::vector<ConvergenceRow> rows(grid);
    for (std::size_t g = 0; g < grid; ++g) {
        rows[g].beta0 = config.beta0_grid[g];
        rows[g].replications = config.replications;
        for (std::size_t r = 0; r < config.replications; ++r) {
            rows[g].rmse.push_back(rmse[r][g]);
            if (rmse[r][g] < config.success_threshold) ++rows[g].successes;
        }
    }
    return rows;
}

}  // namespace spreadhawkes
