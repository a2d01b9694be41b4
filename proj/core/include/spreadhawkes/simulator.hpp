#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spreadhawkes/intensity.hpp"

namespace spreadhawkes {

/// Discrete distribution of jump sizes (ticks) for one event kind.
class JumpDistribution {
public:
    JumpDistribution() : JumpDistribution({1}, {1.0}) {}
    JumpDistribution(std::vector<std::int64_t> sizes, std::vector<double> probabilities);

    [[nodiscard]] std::int64_t sample(Rng& rng) const;
    [[nodiscard]] const std::vector<std::int64_t>& sizes() const { return sizes_; }
    [[nodiscard]] const std::vector<double>& probabilities() const { return probs_; }
    [[nodiscard]] double mean() const;

private:
    std::vector<std::int64_t> sizes_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

/// Jump-size source, one distribution per event kind.
struct JumpSource {
    std::array<JumpDistribution, 4> per_kind{};

    [[nodiscard]] static JumpSource constant_one() { return {}; }
    [[nodiscard]] static JumpSource same_for_all(const JumpDistribution& d) { return {{d, d, d, d}}; }
    /// CSV with header `kind,size,probability`; kind may be `all`.
    [[nodiscard]] static JumpSource load(const std::filesystem::path& path);
    /// Small documented table with most mass at one tick.
    [[nodiscard]] static JumpSource sample_table();
};

struct SimConfig {
    ParamSet params;
    ModelVariant variant{ModelVariant::Proposed};
    MarketState initial_state{10000, 10001, 0.01};
    double session_start{0.0};
    std::optional<double> horizon;         // seconds
    std::optional<std::size_t> n_events;   // alternative stopping rule
    JumpSource jumps{};
    std::uint64_t seed{1};
    std::size_t max_events{10'000'000};
};

struct SimulationResult {
    EventStream stream;
    std::size_t candidates{0};
    std::size_t clamped_jumps{0};          // narrowing jumps truncated to the current level
    std::size_t suppressed_at_minimum{0};  // narrowing draws at L = 0 (only possible in the basic model)
};

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ogata thinning. The dominating rate is the total intensity at the latest
/// accepted or rejected candidate, valid because intensities only decay between events.
[[nodiscard]] SimulationResult simulate(const SimConfig& config);

struct SpreadConfig {
    ParamSet params;
    bool narrowing_excitement{false};
    std::int64_t initial_level{0};
    double horizon{1000.0};
    std::uint64_t seed{1};
    std::size_t max_events{10'000'000};
};

/// Unit-jump spread process: up/down counting processes and the level path.
struct SpreadPath {
    std::vector<double> times;
    std::vector<std::int8_t> direction;  // +1 widening, -1 narrowing
    std::vector<std::int64_t> level_after;
    std::int64_t initial_level{0};
    double horizon{0.0};

    [[nodiscard]] double time_average_level() const;
    [[nodiscard]] double up_rate() const;
    [[nodiscard]] double down_rate() const;
};

[[nodiscard]] SpreadPath simulate_spread_only(const SpreadConfig& config);

}  // namespace spreadhawkes
