#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spreadhawkes {

using Matrix4 = std::array<std::array<double, 4>, 4>;

enum class ModelVariant : std::uint8_t {
    Proposed,
    BasicHawkes,
    ExtendedI,
    ExtendedII,
    ExtendedIII,
    ExtendedIV,
    ExtendedV,
    ConstantBase,
    SpreadOnly,
};

/// Short CLI/file name: proposed, basic, ext1..ext5, constant, spread.
[[nodiscard]] std::string_view to_string(ModelVariant variant);
[[nodiscard]] ModelVariant parse_variant(std::string_view text);

/// Model parameters. Rates are per second; eta and xi are per unit of
/// relative spread level. Fields beyond the first nine are only read by the
/// variants that declare them.
struct ParamSet {
    double mu{0.0};
    double eta{0.0};
    double alpha_s1{0.0};
    double alpha_s2{0.0};
    double alpha_m{0.0};
    double alpha_w1{0.0};
    double alpha_w2{0.0};
    double beta{1.0};
    double xi{0.0};

    Matrix4 alpha{};  // BasicHawkes: alpha[target][source]
    double alpha_14{0.0};
    double alpha_41{0.0};
    double mu_1{0.0};
    double mu_4{0.0};
    std::array<double, 4> eta_k{};
    std::array<double, 4> xi_k{};
    std::array<double, 4> beta_k{1.0, 1.0, 1.0, 1.0};

    friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// Truth rows of the recovery study (row 1: beta = 50, row 2: beta = 1200).
[[nodiscard]] ParamSet table1_truth(int row);

/// Number of free parameters (k in AIC/BIC).
[[nodiscard]] std::size_t parameter_count(ModelVariant variant);

/// Parameter names in packing order.
[[nodiscard]] std::vector<std::string> parameter_names(ModelVariant variant);

[[nodiscard]] std::vector<double> pack(const ParamSet& params, ModelVariant variant);
/// Writes values into a copy of base in packing order.
[[nodiscard]] ParamSet unpack(std::span<const double> values, ModelVariant variant, const ParamSet& base = {});

[[nodiscard]] double get_parameter(const ParamSet& params, std::string_view name);
void set_parameter(ParamSet& params, std::string_view name, double value);

/// Rejects negative or non-finite values and non-positive decay rates.
void validate(const ParamSet& params, ModelVariant variant);

/// Lifts proposed-model parameters onto a richer variant so that the
/// richer model reproduces the proposed one exactly (corners zero,
/// shared eta/xi/beta copied into the per-index fields).
[[nodiscard]] ParamSet embed_proposed(const ParamSet& proposed, ModelVariant variant);

/// alpha_s1 + alpha_s2 + alpha_m < beta.
[[nodiscard]] bool stability_condition(const ParamSet& params);

}  // namespace spreadhawkes
