#include "wmamp/optics.hpp"

#include <cmath>
#include <numbers>

#include "wmamp/stage.hpp"

namespace wmamp::optics {

namespace {

constexpr double kForbiddenRelative = 1e-14;

} // namespace

BeamSplitter BeamSplitter::from_r(double r) {
    if (!std::isfinite(r) || std::abs(r) > 1) throw ConfigError("reflection coefficient must lie in [-1, 1]", "r");
    return BeamSplitter{r, std::sqrt((1 - r) * (1 + r))};
}

BeamSplitter BeamSplitter::balanced() { return BeamSplitter{1 / std::numbers::sqrt2, 1 / std::numbers::sqrt2}; }

void BeamSplitter::validate(const std::string& name) const {
    if (!std::isfinite(r)) throw ConfigError(name + ": r must be finite", "r" + name.substr(2));
    if (!std::isfinite(t)) throw ConfigError(name + ": t must be finite", "t" + name.substr(2));
    if (std::abs(r * r + t * t - 1) > kNormTolerance) {
        throw ConfigError(name + ": r^2 + t^2 must equal 1", "t" + name.substr(2));
    }
}

void OpticsConfig::validate() const {
    bs1.validate("bs1");
    bs2.validate("bs2");
    bs3.validate("bs3");
    bs4.validate("bs4");
    if (!std::isfinite(theta)) throw ConfigError("theta must be finite", "theta");
    if (!std::isfinite(intensity_i0) || intensity_i0 < 0) {
        throw ConfigError("intensity must be finite and non-negative", "i0");
    }
}

double OpticsConfig::kappa() const { return bs1.t * bs3.t + bs1.r * bs2.r * bs3.r; }

CompositeState<double> prepare_initial(const BeamSplitter& bs1, const BeamSplitter& bs2) {
    bs1.validate("bs1");
    bs2.validate("bs2");
    const auto paths = SystemKet<double>::from_real({bs1.t, bs1.r * bs2.r, bs1.r * bs2.t});
    return tensor(paths, PointerState<double>::plus());
}

CompositeState<double> pmi_apply(const CompositeState<double>& state, double theta) {
    return apply_control_phase(state, kUp, theta);
}

FirstPostSelection bs3_postselect(const CompositeState<double>& state, const BeamSplitter& bs3) {
    if (state.dim() != 3) throw DimensionError("BS3 expects the three-path (up, middle, down) state");
    bs3.validate("bs3");

    const double up_term = bs3.t * state(kUp, kH).real();
    const double mid_term = bs3.r * state(kMiddle, kH).real();
    const double merged = up_term + mid_term;
    if (std::abs(merged) <= kForbiddenRelative * (std::abs(up_term) + std::abs(mid_term))) {
        throw ForbiddenDeltaError("BS3: kappa = t1 t3 + r1 r2 r3 = 0 (forbidden point)", 1);
    }

    // theta as carried by the up arm; an empty up arm carries no signal.
    const auto up = state.branch(kUp);
    const double theta = up.squared_norm() > 0 ? extract_phase(up) : 0.0;

    auto merged_state = merge_branches(state, kUp, kMiddle, Mixing<double>{bs3.t, bs3.r});
    double gamma = 0;
    try {
        gamma = extract_phase(merged_state.branch(0));
    } catch (const PhaseLostError& e) {
        throw PhaseLostError(std::string("BS3: ") + e.what());
    }
    return FirstPostSelection{.state = std::move(merged_state),
                              .kappa = std::numbers::sqrt2 * merged,
                              .gamma_exact = gamma,
                              .gamma_first_order = gamma_first_order_ratio(theta, mid_term, up_term)};
}

SecondPostSelection bs4_postselect(const CompositeState<double>& state, const BeamSplitter& bs4,
                                   std::optional<double> input_phase) {
    if (state.dim() != 2) throw DimensionError("BS4 expects the two-path (mu, down) state");
    bs4.validate("bs4");

    const double mu_term = bs4.t * state(0, kH).real();
    const double down_term = bs4.r * state(1, kH).real();
    if (std::abs(mu_term + down_term) <= kForbiddenRelative * (std::abs(mu_term) + std::abs(down_term))) {
        throw ForbiddenDeltaError("BS4: r1 t2 r4 + kappa t4 = 0 (forbidden point)", 2);
    }

    const double gamma = input_phase ? *input_phase : extract_phase(state.branch(0));
    auto [pointer, prob] = post_select_full(state, SystemKet<double>::from_real({bs4.t, bs4.r}));
    double phi = 0;
    try {
        phi = extract_phase(pointer);
    } catch (const PhaseLostError& e) {
        throw PhaseLostError(std::string("BS4: ") + e.what());
    }
    return SecondPostSelection{.pointer = std::move(pointer),
                               .probability = prob,
                               .phi_exact = phi,
                               .phi_first_order = gamma_first_order_ratio(gamma, down_term, mu_term)};
}

double pa_measure(const PointerState<double>& pointer, double intensity_i0) {
    if (!std::isfinite(intensity_i0) || intensity_i0 < 0) {
        throw DomainError("intensity must be finite and non-negative");
    }
    return intensity_i0 * sigma_r_expectation(pointer);
}

OpticsResult run_full(const OpticsConfig& config) {
    config.validate();
    const auto prepared = pmi_apply(prepare_initial(config.bs1, config.bs2), config.theta);
    auto first = bs3_postselect(prepared, config.bs3);
    auto second = bs4_postselect(first.state, config.bs4, first.gamma_first_order);

    const double h1 = stage_factor(first.gamma_exact, config.theta);
    const double h2 = stage_factor(second.phi_exact, first.gamma_exact);
    const double delta_i = pa_measure(second.pointer, config.intensity_i0);
    return OpticsResult{.gamma = first.gamma_exact,
                        .phi = second.phi_exact,
                        .gamma_first_order = first.gamma_first_order,
                        .phi_first_order = second.phi_first_order,
                        .h1 = h1,
                        .h2 = h2,
                        .h_total = h1 * h2,
                        .delta_i = delta_i,
                        .success_prob = second.probability,
                        .pointer = std::move(second.pointer)};
}

CascadeSpec map_to_abstract(const OpticsConfig& config) {
    config.validate();
    CascadeSpec spec;
    spec.theta = config.theta;
    spec.initial_coeffs = {config.bs1.r * config.bs2.t, config.bs1.r * config.bs2.r, config.bs1.t};
    spec.stage_mixings = {{config.bs3.r, config.bs3.t}, {config.bs4.r, config.bs4.t}};
    return spec;
}

} // namespace wmamp::optics
