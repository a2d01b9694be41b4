#include "spreadhawkes/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spreadhawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Counted {
public:
    explicit Counted(const Objective& f) : f_(f) {}
    double operator()(std::span<const double> x) {
        ++count_;
        const double v = f_(x);
        return std::isnan(v) ? kInf : v;
    }
    [[nodiscard]] std::size_t count() const { return count_; }

private:
    const Objective& f_;
    std::size_t count_{0};
};

bool stalled(double previous, double current, double tol) {
    return std::isfinite(current) && previous - current <= tol * std::max(std::abs(current), 1.0);
}

}  // namespace

std::vector<double> numerical_gradient(const Objective& f, std::span<const double> x, double rel, double abs_min) {
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = std::max(rel * std::abs(x[i]), abs_min);
        point[i] = x[i] + h;
        const double up = f(point);
        point[i] = x[i] - h;
        const double down = f(point);
        point[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

OptimizationResult nelder_mead(const Objective& objective, std::vector<double> x0, const OptimizerOptions& options) {
    Counted f(objective);
    const std::size_t n = x0.size();
    OptimizationResult result;
    result.x = x0;
    result.value = f(x0);
    result.initial_value = result.value;
    if (n == 0) {
        result.converged = true;
        result.evaluations = f.count();
        return result;
    }

    const double dim = static_cast<double>(n);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / dim;
    const double contract = 0.75 - 0.5 / dim;
    const double shrink = 1.0 - 1.0 / dim;
    const double tol = options.relative_tolerance;

    std::vector<std::vector<double>> v(n + 1, std::vector<double>(n));
    std::vector<double> fv(n + 1);
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    auto combine = [&](std::vector<double>& out, const std::vector<double>& from, const std::vector<double>& to,
                       double scale) {
        for (std::size_t i = 0; i < n; ++i) out[i] = from[i] + scale * (to[i] - from[i]);
    };

    for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
        const double before = result.value;
        v[0] = result.x;
        fv[0] = result.value;
        for (std::size_t k = 1; k <= n; ++k) {
            v[k] = result.x;
            v[k][k - 1] += options.initial_step;
            fv[k] = f(v[k]);
        }

        bool local_done = false;
        while (result.iterations < options.max_iterations) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            const std::size_t best = order[0];
            const std::size_t worst = order[n];
            const std::size_t second = order[n - 1];

            if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= tol * std::max(std::abs(fv[best]), 1.0)) {
                local_done = true;
                break;
            }
            double diameter = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(v[k][i] - v[best][i]));
            }
            if (diameter < 1e-12) {
                local_done = true;
                break;
            }
            ++result.iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t i = 0; i < n; ++i) centroid[i] += v[order[k]][i] / dim;
            }

            combine(xr, centroid, v[worst], -reflect);
            const double fr = f(xr);
            if (fr < fv[best]) {
                combine(xe, centroid, xr, expand);
                const double fe = f(xe);
                if (fe < fr) {
                    v[worst] = xe;
                    fv[worst] = fe;
                } else {
                    v[worst] = xr;
                    fv[worst] = fr;
                }
                continue;
            }
            if (fr < fv[second]) {
                v[worst] = xr;
                fv[worst] = fr;
                continue;
            }
            bool accepted = false;
            if (fr < fv[worst]) {
                combine(xc, centroid, xr, contract);
                const double fc = f(xc);
                if (fc <= fr) {
                    v[worst] = xc;
                    fv[worst] = fc;
                    accepted = true;
                }
            } else {
                combine(xc, centroid, v[worst], contract);
                const double fc = f(xc);
                if (fc < fv[worst]) {
                    v[worst] = xc;
                    fv[worst] = fc;
                    accepted = true;
                }
            }
            if (!accepted) {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    combine(v[k], v[best], v[k], shrink);
                    fv[k] = f(v[k]);
                }
            }
        }

        const auto best_it = std::min_element(fv.begin(), fv.end());
        if (*best_it < result.value) {
            result.value = *best_it;
            result.x = v[static_cast<std::size_t>(best_it - fv.begin())];
        }
        if (!local_done) break;  // iteration budget exhausted
        if (restart > 0 && stalled(before, result.value, tol)) {
            result.converged = true;
            break;
        }
    }
    result.evaluations = f.count();
    return result;
}

OptimizationResult quasi_newton(const Objective& objective, std::vector<double> x0, const OptimizerOptions& options) {
    Counted f(objective);
    const std::size_t n = x0.size();
    OptimizationResult result;
    result.x = std::move(x0);
    result.value = f(result.x);
    result.initial_value = result.value;
    if (!std::isfinite(result.value)) {
        result.evaluations = f.count();
        return result;
    }
    const Objective counted = [&](std::span<const double> x) { return f(x); };

    auto grad = numerical_gradient(counted, result.x);
    // First step moves the largest coordinate by initial_step.
    double g_max = 0.0;
    for (double g : grad) g_max = std::max(g_max, std::abs(g));
    const double h0 = g_max > 0.0 ? options.initial_step / g_max : 1.0;
    std::vector<double> h(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = h0;
    std::vector<double> p(n), trial(n), s(n), y(n), hy(n);
    int quiet = 0;
    bool first_update = true;

    while (result.iterations < options.max_iterations) {
        ++result.iterations;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 0.0;
            for (std::size_t j = 0; j < n; ++j) p[i] -= h[i * n + j] * grad[j];
        }
        double slope = std::inner_product(p.begin(), p.end(), grad.begin(), 0.0);
        if (slope >= 0.0) {
            // Lost descent: fall back to steepest descent.
            std::fill(h.begin(), h.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                h[i * n + i] = h0;
                p[i] = -h0 * grad[i];
            }
            slope = -h0 * std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
            if (slope == 0.0) {
                result.converged = true;
                break;
            }
        }
        double step = 1.0;
        double f_trial = kInf;
        for (int k = 0; k < 60; ++k) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = result.x[i] + step * p[i];
            f_trial = f(trial);
            if (std::isfinite(f_trial) && f_trial <= result.value + 1e-4 * step * slope) break;
            step *= 0.5;
        }
        if (!std::isfinite(f_trial) || f_trial > result.value) {
            result.converged = true;  // no further descent available at this resolution
            break;
        }
        const double previous = result.value;
        auto new_grad = numerical_gradient(counted, trial);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = trial[i] - result.x[i];
            y[i] = new_grad[i] - grad[i];
        }
        result.x = trial;
        result.value = f_trial;
        grad = std::move(new_grad);

        const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
        if (sy > 1e-12) {
            if (first_update) {
                const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
                std::fill(h.begin(), h.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) h[i * n + i] = sy / yy;
                first_update = false;
            }
            for (std::size_t i = 0; i < n; ++i) {
                hy[i] = 0.0;
                for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
            }
            const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    h[i * n + j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        quiet = stalled(previous, result.value, options.relative_tolerance * 1e-2) ? quiet + 1 : 0;
        if (quiet >= 2) {
            result.converged = true;
            break;
        }
    }
    result.evaluations = f.count();
    return result;
}

OptimizationResult classic_simplex(const Objective& objective, std::vector<double> x0,
                                   const OptimizerOptions& options) {
    constexpr double big = 1e35;
    Counted counted(objective);
    auto f = [&](std::span<const double> x) {
        const double v = counted(x);
        return std::isfinite(v) ? v : big;
    };
    const std::size_t n = x0.size();
    OptimizationResult result;
    result.x = x0;
    result.value = f(x0);
    result.initial_value = result.value;
    if (n == 0 || result.value >= big) {
        result.converged = n == 0;
        result.evaluations = counted.count();
        if (result.value >= big) result.value = kInf;
        return result;
    }

    std::vector<std::vector<double>> v(n + 1);
    std::vector<double> fv(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    const std::size_t budget = options.max_iterations;

    for (std::size_t restart = 0; restart <= options.max_restarts; ++restart) {
        const double before = result.value;
        const double stop = options.relative_tolerance * (std::abs(result.value) + options.relative_tolerance);
        double size = 0.0;
        for (double x : result.x) size = std::max(size, 0.1 * std::abs(x));
        if (size == 0.0) size = 0.1;
        v.assign(n + 1, result.x);
        fv[0] = result.value;
        for (std::size_t k = 1; k <= n; ++k) {
            v[k][k - 1] += size;
            fv[k] = f(v[k]);
        }
        double old_size = size * static_cast<double>(n);
        const std::size_t limit = counted.count() + budget;
        bool settled = false;

        while (true) {
            std::size_t lo = 0;
            std::size_t hi = 0;
            for (std::size_t k = 1; k <= n; ++k) {
                if (fv[k] < fv[lo]) lo = k;
                if (fv[k] > fv[hi]) hi = k;
            }
            if (fv[hi] <= fv[lo] + stop) {
                settled = true;
                break;
            }
            if (counted.count() > limit) break;
            ++result.iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k <= n; ++k) {
                if (k == hi) continue;
                for (std::size_t i = 0; i < n; ++i) centroid[i] += v[k][i] / static_cast<double>(n);
            }
            for (std::size_t i = 0; i < n; ++i) xr[i] = 2.0 * centroid[i] - v[hi][i];
            const double fr = f(xr);
            if (fr < fv[lo]) {
                for (std::size_t i = 0; i < n; ++i) xe[i] = 2.0 * xr[i] - centroid[i];
                const double fe = f(xe);
                if (fe < fr) {
                    v[hi] = xe;
                    fv[hi] = fe;
                } else {
                    v[hi] = xr;
                    fv[hi] = fr;
                }
                continue;
            }
            const double f_high = fv[hi];
            if (fr < f_high) {
                v[hi] = xr;
                fv[hi] = fr;
            }
            for (std::size_t i = 0; i < n; ++i) xc[i] = 0.5 * v[hi][i] + 0.5 * centroid[i];
            const double fc = f(xc);
            if (fc < fv[hi]) {
                v[hi] = xc;
                fv[hi] = fc;
            } else if (fr >= f_high) {
                double shrunk = 0.0;
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == lo) continue;
                    for (std::size_t i = 0; i < n; ++i) {
                        v[k][i] = 0.5 * (v[k][i] - v[lo][i]) + v[lo][i];
                        shrunk += std::abs(v[k][i] - v[lo][i]);
                    }
                    fv[k] = f(v[k]);
                }
                if (!(shrunk < old_size)) {
                    settled = true;
                    break;
                }
                old_size = shrunk;
            }
        }
        const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
        if (fv[best] < result.value) {
            result.value = fv[best];
            result.x = v[best];
        }
        if (!settled) break;
        if (restart == options.max_restarts || stalled(before, result.value, options.relative_tolerance)) {
            result.converged = true;
            break;
        }
    }
    if (result.value >= big) result.value = kInf;
    result.evaluations = counted.count();
    return result;
}

OptimizationResult minimize(const Objective& f, std::vector<double> x0, const OptimizerOptions& options) {
    if (options.method == OptimizerMethod::QuasiNewton) return quasi_newton(f, std::move(x0), options);
    if (options.method == OptimizerMethod::ClassicSimplex) return classic_simplex(f, std::move(x0), options);
    return nelder_mead(f, std::move(x0), options);
}

}  // namespace spreadhawkes
