#include "spreadhawkes/params.hpp"

#include <cmath>
#include <stdexcept>

namespace spreadhawkes {

namespace {

struct VariantName {
    ModelVariant variant;
    std::string_view name;
};

constexpr std::array<VariantName, 9> kVariantNames{{
    {ModelVariant::Proposed, "proposed"},
    {ModelVariant::BasicHawkes, "basic"},
    {ModelVariant::ExtendedI, "ext1"},
    {ModelVariant::ExtendedII, "ext2"},
    {ModelVariant::ExtendedIII, "ext3"},
    {ModelVariant::ExtendedIV, "ext4"},
    {ModelVariant::ExtendedV, "ext5"},
    {ModelVariant::ConstantBase, "constant"},
    {ModelVariant::SpreadOnly, "spread"},
}};

const std::vector<std::string> kAlphaNames{"alpha_s1", "alpha_s2", "alpha_m", "alpha_w1", "alpha_w2"};

void append(std::vector<std::string>& out, const std::vector<std::string>& more) {
    out.insert(out.end(), more.begin(), more.end());
}

double* field(ParamSet& p, std::string_view name) {
    if (name == "mu") return &p.mu;
    if (name == "eta") return &p.eta;
    if (name == "alpha_s1") return &p.alpha_s1;
    if (name == "alpha_s2") return &p.alpha_s2;
    if (name == "alpha_m") return &p.alpha_m;
    if (name == "alpha_w1") return &p.alpha_w1;
    if (name == "alpha_w2") return &p.alpha_w2;
    if (name == "beta") return &p.beta;
    if (name == "xi") return &p.xi;
    if (name == "alpha_14") return &p.alpha_14;
    if (name == "alpha_41") return &p.alpha_41;
    if (name == "mu_1") return &p.mu_1;
    if (name == "mu_4") return &p.mu_4;
    auto indexed = [&](std::string_view prefix) -> int {
        if (name.size() != prefix.size() + 1 || name.substr(0, prefix.size()) != prefix) return -1;
        const char c = name.back();
        return (c >= '1' && c <= '4') ? c - '1' : -1;
    };
    if (int k = indexed("eta_"); k >= 0) return &p.eta_k[static_cast<std::size_t>(k)];
    if (int k = indexed("xi_"); k >= 0) return &p.xi_k[static_cast<std::size_t>(k)];
    if (int k = indexed("beta_"); k >= 0) return &p.beta_k[static_cast<std::size_t>(k)];
    // alpha_ij for the full matrix
    if (name.size() == 8 && name.substr(0, 6) == "alpha_") {
        const char r = name[6];
        const char c = name[7];
        if (r >= '1' && r <= '4' && c >= '1' && c <= '4') {
            return &p.alpha[static_cast<std::size_t>(r - '1')][static_cast<std::size_t>(c - '1')];
        }
    }
    return nullptr;
}

}  // namespace

std::string_view to_string(ModelVariant variant) {
    for (const auto& v : kVariantNames) {
        if (v.variant == variant) return v.name;
    }
    return "unknown";
}

ModelVariant parse_variant(std::string_view text) {
    for (const auto& v : kVariantNames) {
        if (v.name == text) return v.variant;
    }
    throw std::invalid_argument("unknown model variant '" + std::string(text) + "'");
}

ParamSet table1_truth(int row) {
    ParamSet p;
    if (row == 1) {
        p.mu = 0.080;
        p.eta = 0.100;
        p.alpha_s1 = 4.0;
        p.alpha_s2 = 26.0;
        p.alpha_m = 5.0;
        p.alpha_w1 = 11.0;
        p.alpha_w2 = 7.0;
        p.beta = 50.0;
        p.xi = 2.7;
    } else if (row == 2) {
        p.mu = 0.170;
        p.eta = 0.140;
        p.alpha_s1 = 200.0;
        p.alpha_s2 = 250.0;
        p.alpha_m = 150.0;
        p.alpha_w1 = 300.0;
        p.alpha_w2 = 330.0;
        p.beta = 1200.0;
        p.xi = 50.0;
    } else {
        throw std::invalid_argument("the recovery study has rows 1 and 2");
    }
    return p;
}

std::vector<std::string> parameter_names(ModelVariant variant) {
    std::vector<std::string> names;
    switch (variant) {
        case ModelVariant::Proposed:
        case ModelVariant::ConstantBase:
        case ModelVariant::SpreadOnly:
            names = {"mu", "eta"};
            append(names, kAlphaNames);
            append(names, {"beta", "xi"});
            break;
        case ModelVariant::BasicHawkes:
            names = {"mu"};
            for (int r = 1; r <= 4; ++r) {
                for (int c = 1; c <= 4; ++c) names.push_back("alpha_" + std::to_string(r) + std::to_string(c));
            }
            names.emplace_back("beta");
            break;
        case ModelVariant::ExtendedI:
            names = {"mu", "eta"};
            append(names, kAlphaNames);
            append(names, {"alpha_14", "alpha_41", "beta", "xi"});
            break;
        case ModelVariant::ExtendedII:
            names = {"mu_1", "mu_4", "eta_1", "eta_2", "eta_3", "eta_4"};
            append(names, kAlphaNames);
            append(names, {"beta", "xi"});
            break;
        case ModelVariant::ExtendedIII:
            names = {"mu", "eta"};
            append(names, kAlphaNames);
            append(names, {"beta", "xi_1", "xi_2", "xi_3", "xi_4"});
            break;
        case ModelVariant::ExtendedIV:
        case ModelVariant::ExtendedV:
            names = {"mu", "eta"};
            append(names, kAlphaNames);
            append(names, {"beta_1", "beta_2", "beta_3", "beta_4", "xi"});
            break;
    }
    return names;
}

std::size_t parameter_count(ModelVariant variant) { return parameter_names(variant).size(); }

double get_parameter(const ParamSet& params, std::string_view name) {
    auto copy = params;
    const double* f = field(copy, name);
    if (f == nullptr) throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
    return *f;
}

void set_parameter(ParamSet& params, std::string_view name, double value) {
    double* f = field(params, name);
    if (f == nullptr) throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
    *f = value;
}

std::vector<double> pack(const ParamSet& params, ModelVariant variant) {
    std::vector<double> values;
    for (const auto& name : parameter_names(variant)) values.push_back(get_parameter(params, name));
    return values;
}

ParamSet unpack(std::span<const double> values, ModelVariant variant, const ParamSet& base) {
    const auto names = parameter_names(variant);
    if (values.size() != names.size()) throw std::invalid_argument("parameter vector has the wrong length");
    ParamSet p = base;
    for (std::size_t i = 0; i < names.size(); ++i) set_parameter(p, names[i], values[i]);
    return p;
}

void validate(const ParamSet& params, ModelVariant variant) {
    for (const auto& name : parameter_names(variant)) {
        const double v = get_parameter(params, name);
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("parameter " + name + " must be finite and nonnegative");
        }
        if (name.starts_with("beta") && v <= 0.0) {
            throw std::invalid_argument("decay rate " + name + " must be positive");
        }
    }
}

ParamSet embed_proposed(const ParamSet& proposed, ModelVariant variant) {
    ParamSet p = proposed;
    p.alpha_14 = 0.0;
    p.alpha_41 = 0.0;
    p.mu_1 = proposed.mu;
    p.mu_4 = proposed.mu;
    p.eta_k = {0.0, proposed.eta, proposed.eta, 0.0};
    p.xi_k.fill(proposed.xi);
    p.beta_k.fill(proposed.beta);
    if (variant == ModelVariant::BasicHawkes) {
        // Narrowing-on-narrowing entries have no constant counterpart.
        p.alpha = {{{proposed.alpha_s1, proposed.alpha_m, proposed.alpha_s2, 0.0},
                    {proposed.alpha_w1, 0.0, 0.0, proposed.alpha_w2},
                    {proposed.alpha_w2, 0.0, 0.0, proposed.alpha_w1},
                    {0.0, proposed.alpha_s2, proposed.alpha_m, proposed.alpha_s1}}};
    }
    return p;
}

bool stability_condition(const ParamSet& params) {
    return params.alpha_s1 + params.alpha_s2 + params.alpha_m < params.beta;
}

}  // namespace spreadhawkes
