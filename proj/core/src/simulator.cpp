#include "spreadhawkes/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace spreadhawkes {

namespace {

double unit_exponential(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return -std::log1p(-u(rng));
}

double uniform(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng);
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
}

}  // namespace

JumpDistribution::JumpDistribution(std::vector<std::int64_t> sizes, std::vector<double> probabilities)
    : sizes_(std::move(sizes)), probs_(std::move(probabilities)) {
    if (sizes_.empty() || sizes_.size() != probs_.size()) {
        throw std::invalid_argument("jump table needs matching, nonempty size and probability lists");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (sizes_[i] <= 0) throw std::invalid_argument("jump sizes must be positive tick counts");
        if (!(probs_[i] >= 0.0)) throw std::invalid_argument("jump probabilities must be nonnegative");
        total += probs_[i];
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("jump probabilities must sum to 1");
}

std::int64_t JumpDistribution::sample(Rng& rng) const {
    if (sizes_.size() == 1) return sizes_.front();
    const double u = uniform(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), sizes_.size() - 1);
    return sizes_[idx];
}

double JumpDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) m += static_cast<double>(sizes_[i]) * probs_[i];
    return m;
}

JumpSource JumpSource::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open jump table " + path.string());
    std::array<std::vector<std::int64_t>, 4> sizes;
    std::array<std::vector<double>, 4> probs;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            if (line.rfind("kind", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string kind, size, prob;
        if (!std::getline(ss, kind, ',') || !std::getline(ss, size, ',') || !std::getline(ss, prob, ',')) {
            throw std::invalid_argument("jump table line " + std::to_string(line_no) + ": expected kind,size,probability");
        }
        kind = trim(kind);
        const auto s = std::stoll(trim(size));
        const auto p = std::stod(trim(prob));
        for (std::size_t k = 0; k < 4; ++k) {
            if (kind == "all" || kind == to_string(kind_at(k))) {
                sizes[k].push_back(s);
                probs[k].push_back(p);
            }
        }
    }
    JumpSource source;
    for (std::size_t k = 0; k < 4; ++k) {
        if (!sizes[k].empty()) source.per_kind[k] = JumpDistribution(sizes[k], probs[k]);
    }
    return source;
}

JumpSource JumpSource::sample_table() {
    return same_for_all(JumpDistribution({1, 2, 3, 5}, {0.80, 0.12, 0.05, 0.03}));
}

SimulationResult simulate(const SimConfig& config) {
    if (config.horizon.has_value() == config.n_events.has_value()) {
        throw std::invalid_argument("set exactly one of horizon and n_events");
    }
    if (config.horizon && !(*config.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (config.n_events && *config.n_events == 0) throw std::invalid_argument("event target must be positive");

    const Kernel kernel = Kernel::compile(config.params, config.variant);
    Rng rng(config.seed);

    SimulationResult out;
    auto& stream = out.stream;
    stream.session_start = config.session_start;
    stream.tick = config.initial_state.tick();
    stream.initial_state = config.initial_state;
    const double end = config.horizon ? config.session_start + *config.horizon
                                      : std::numeric_limits<double>::infinity();
    const std::size_t target = config.n_events.value_or(std::numeric_limits<std::size_t>::max());

    IntensityState state(kernel, config.initial_state, config.session_start);
    double t = config.session_start;
    while (stream.events.size() < target) {
        const Rates upper = state.intensity_at(t);
        const double bound = upper[0] + upper[1] + upper[2] + upper[3];
        if (!(bound > 0.0)) {
            if (!config.horizon) throw SimulationError("all intensities vanished before the event target was reached");
            break;
        }
        t += unit_exponential(rng) / bound;
        if (t > end) break;
        ++out.candidates;
        const Rates lambda = state.intensity_at(t);
        const double total = lambda[0] + lambda[1] + lambda[2] + lambda[3];
        if (uniform(rng) * bound >= total) {
            state.advance(t);
            continue;
        }
        double pick = uniform(rng) * total;
        std::size_t i = 0;
        while (i < 3 && pick >= lambda[i]) {
            pick -= lambda[i];
            ++i;
        }
        const EventKind kind = kind_at(i);
        std::int64_t delta = config.jumps.per_kind[i].sample(rng);
        if (is_narrowing(kind)) {
            const std::int64_t level = state.market().level();
            if (level == 0) {
                ++out.suppressed_at_minimum;
                state.advance(t);
                continue;
            }
            if (delta > level) {
                delta = level;
                ++out.clamped_jumps;
            }
        }
        state.on_event(t, kind, delta);
        stream.events.push_back({t, kind, delta, state.market()});
        if (stream.events.size() > config.max_events) {
            std::ostringstream os;
            os << "event cap " << config.max_events << " exceeded at t=" << t << " with spread level "
               << state.market().level() << "; stability condition "
               << (stability_condition(config.params) ? "holds" : "is violated");
            throw SimulationError(os.str());
        }
    }
    stream.session_end = config.horizon ? end : (stream.events.empty() ? t : stream.events.back().t);
    return out;
}

double SpreadPath::time_average_level() const {
    if (!(horizon > 0.0)) return static_cast<double>(initial_level);
    double area = 0.0;
    double last = 0.0;
    std::int64_t level = initial_level;
    for (std::size_t i = 0; i < times.size(); ++i) {
        area += static_cast<double>(level) * (times[i] - last);
        last = times[i];
        level = level_after[i];
    }
    area += static_cast<double>(level) * (horizon - last);
    return area / horizon;
}

double SpreadPath::up_rate() const {
    return static_cast<double>(std::count(direction.begin(), direction.end(), std::int8_t{1})) / horizon;
}

double SpreadPath::down_rate() const {
    return static_cast<double>(std::count(direction.begin(), direction.end(), std::int8_t{-1})) / horizon;
}

SpreadPath simulate_spread_only(const SpreadConfig& config) {
    const auto& p = config.params;
    validate(p, ModelVariant::SpreadOnly);
    if (config.initial_level < 0) throw std::invalid_argument("spread level must be nonnegative");
    if (!(config.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    Rng rng(config.seed);
    SpreadPath path;
    path.initial_level = config.initial_level;
    path.horizon = config.horizon;

    std::int64_t level = config.initial_level;
    double up_excitement = 0.0;
    double down_excitement = 0.0;
    double t = 0.0;
    auto decay_to = [&](double to) {
        const double factor = std::exp(-p.beta * (to - t));
        up_excitement *= factor;
        down_excitement *= factor;
        t = to;
    };
    while (true) {
        const double up = 2.0 * p.mu + up_excitement;
        const double down = 2.0 * p.eta * static_cast<double>(level) + down_excitement;
        const double bound = up + down;
        const double candidate = t + unit_exponential(rng) / bound;
        if (candidate > config.horizon) break;
        decay_to(candidate);
        const double up_now = 2.0 * p.mu + up_excitement;
        const double down_now = 2.0 * p.eta * static_cast<double>(level) + down_excitement;
        const double u = uniform(rng) * bound;
        if (u >= up_now + down_now) continue;
        if (u < up_now) {
            ++level;
            up_excitement += p.alpha_s1;
            if (config.narrowing_excitement) down_excitement += p.alpha_w1 + p.alpha_w2;
            path.direction.push_back(1);
        } else {
            --level;
            up_excitement += p.alpha_s2 + p.alpha_m;
            if (config.narrowing_excitement) down_excitement = p.xi * static_cast<double>(level);
            path.direction.push_back(-1);
        }
        path.times.push_back(t);
        path.level_after.push_back(level);
        if (path.times.size() > config.max_events) throw SimulationError("spread simulation exceeded its event cap");
    }
    return path;
}

}  // namespace spreadhawkes
