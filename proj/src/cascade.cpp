#include "wmamp/cascade.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wmamp/stage.hpp"

namespace wmamp {

namespace {

// Merged no-signal amplitude below this fraction of its two contributions is
// treated as an exact cancellation.
constexpr double kForbiddenRelative = 1e-14;

std::string stage_label(std::size_t k) { return "stage " + std::to_string(k + 1); }

} // namespace

void CascadeSpec::validate() const {
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (initial_coeffs.size() < 2) throw DimensionError("cascade needs at least two path coefficients");
    if (stage_mixings.size() + 1 != initial_coeffs.size()) {
        throw DimensionError("cascade needs exactly one mixing per reference branch (d - 1 stages)");
    }
    CompensatedSum<double> n2;
    for (double c : initial_coeffs) {
        if (!std::isfinite(c)) throw DomainError("initial coefficients must be finite");
        n2 += c * c;
    }
    if (std::abs(n2.value() - 1) > kNormTolerance) {
        throw NormalizationError("initial coefficients must have unit norm");
    }
    for (std::size_t k = 0; k < stage_mixings.size(); ++k) {
        const auto& m = stage_mixings[k];
        if (!std::isfinite(m.first) || !std::isfinite(m.second) ||
            std::abs(m.first * m.first + m.second * m.second - 1) > kNormTolerance) {
            throw NormalizationError(stage_label(k) + " mixing must be unit norm");
        }
    }
}

CascadeSpec cascade_from_ratios(double theta, const std::vector<double>& ratios) {
    if (ratios.empty()) throw DimensionError("cascade needs at least one stage ratio");
    const std::size_t d = ratios.size() + 1;
    CascadeSpec spec;
    spec.theta = theta;
    spec.initial_coeffs.assign(d, 1 / std::sqrt(static_cast<double>(d)));
    double signal = spec.initial_coeffs.back();
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        if (!std::isfinite(ratios[k])) throw DomainError(stage_label(k) + " ratio must be finite");
        const double reference = spec.initial_coeffs[d - 2 - k];
        // (ref * first) / (signal * second) = ratio
        const double first = ratios[k] * signal;
        const double second = reference;
        const double n = std::hypot(first, second);
        spec.stage_mixings.push_back({first / n, second / n});
        signal = reference * (first / n) + signal * (second / n);
    }
    return spec;
}

CascadeResult run_cascade(const CascadeSpec& spec) {
    spec.validate();
    const auto& coeffs = spec.initial_coeffs;
    const Eigen::Index d = static_cast<Eigen::Index>(coeffs.size());

    auto state = apply_control_phase(tensor(SystemKet<double>::from_real(coeffs), PointerState<double>::plus()),
                                     d - 1, spec.theta);

    CascadeResult result{.per_stage = {},
                         .phi_final = 0,
                         .phi_first_order = 0,
                         .h_total = 1,
                         .success_prob = 1,
                         .pointer = PointerState<double>::plus()};
    result.per_stage.reserve(spec.stages());

    double signal = coeffs.back();
    double phase_exact = spec.theta;
    double phase_fo = spec.theta;
    std::vector<double> factors;
    for (std::size_t k = 0; k < spec.stages(); ++k) {
        const Eigen::Index ref = state.dim() - 2;
        const Eigen::Index sig = state.dim() - 1;
        const auto& mix = spec.stage_mixings[k];
        const double ref_term = coeffs[static_cast<std::size_t>(ref)] * mix.first;
        const double sig_term = signal * mix.second;
        const double merged = ref_term + sig_term;
        if (std::abs(merged) <= kForbiddenRelative * (std::abs(ref_term) + std::abs(sig_term))) {
            throw ForbiddenDeltaError(stage_label(k) + ": merged no-signal amplitude vanishes (forbidden point)",
                                      static_cast<std::ptrdiff_t>(k + 1));
        }

        state = merge_branches(state, ref, sig, mix);
        double gamma = 0;
        try {
            gamma = extract_phase(state.branch(state.dim() - 1));
        } catch (const PhaseLostError& e) {
            throw PhaseLostError(stage_label(k) + ": " + e.what());
        }
        const double gamma_fo = gamma_first_order_ratio(phase_fo, ref_term, sig_term);

        StageRecord rec{.gamma_exact = gamma,
                        .gamma_first_order = gamma_fo,
                        .h_exact = stage_factor(gamma, phase_exact),
                        .h_first_order = stage_factor(gamma_fo, phase_fo),
                        .ratio = sig_term == 0 ? std::numeric_limits<double>::infinity() : ref_term / sig_term,
                        .success_prob_cumulative = state.squared_norm()};
        factors.push_back(rec.h_exact);
        result.per_stage.push_back(rec);

        signal = merged;
        phase_exact = gamma;
        phase_fo = gamma_fo;
    }

    result.phi_final = phase_exact;
    result.phi_first_order = phase_fo;
    result.h_total = total_amp(factors);
    result.success_prob = state.squared_norm();
    result.pointer = state.branch(0);
    return result;
}

double total_amp(const std::vector<double>& h_list) {
    if (h_list.empty()) throw DimensionError("total_amp needs at least one factor");
    double product = 1;
    for (double h : h_list) {
        if (!std::isfinite(h)) throw DomainError("amplification factors must be finite");
        product *= h;
    }
    return product;
}

double error_after_n(double theta, double h_bar, int n) {
    if (!(h_bar > 1) || !std::isfinite(h_bar)) throw DomainError("h_bar must be > 1");
    if (n < 1) throw DomainError("n must be >= 1");
    return std::pow(h_bar, 2 * n - 1) * (theta * theta * theta) / 4;
}

ErrorModel parse_error_model(std::string_view name) {
    if (name == "constant") return ErrorModel::Constant;
    if (name == "geometric_sum") return ErrorModel::GeometricSum;
    throw ConfigError("unknown error model '" + std::string(name) + "'", "model");
}

std::string_view to_string(ErrorModel model) {
    switch (model) {
    case ErrorModel::Constant: return "constant";
    case ErrorModel::GeometricSum: return "geometric_sum";
    }
    throw ConfigError("unknown error model", "model");
}

double recursion_exact(double theta, double h_bar, int n, ErrorModel model) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (!(h_bar > 0) || !std::isfinite(h_bar)) throw DomainError("h_bar must be positive");
    const double per_stage = h_bar * (theta * theta * theta) / 4;
    double multiplier = 0;
    switch (model) {
    case ErrorModel::Constant: multiplier = h_bar; break;
    // f(N) = h_bar^2 f(N-1) + 1 reproduces the geometric sum
    case ErrorModel::GeometricSum: multiplier = h_bar * h_bar; break;
    default: throw ConfigError("unknown error model", "model");
    }
    double err = per_stage;
    for (int k = 2; k <= n; ++k) err = multiplier * err + per_stage;
    return err;
}

CascadePlan plan_stages(double theta, double h_bar, double eps_precision) {
    if (!(eps_precision > 0 && eps_precision < 1)) throw DomainError("eps_precision must lie in (0, 1)");
    if (!(h_bar > 1) || !std::isfinite(h_bar)) throw DomainError("h_bar must be > 1");
    const double t = std::abs(theta);
    if (!(t > 0 && t < 1)) throw DomainError("|theta| must lie in (0, 1)");

    const double budget = eps_precision * t;
    const double arg = 4 * eps_precision / (t * t);
    const double n_real = (std::log(arg) / std::log(h_bar) + 1) / 2;
    if (n_real > 1e6) throw DomainError("planned stage count out of range (h_bar too close to 1)");

    int n = n_real > 0 ? static_cast<int>(std::floor(n_real)) : 0;
    // Settle ulp-level disagreements between the log form and the error model.
    while (n > 0 && error_after_n(t, h_bar, n) > budget) --n;
    while (error_after_n(t, h_bar, n + 1) <= budget) ++n;

    return CascadePlan{.theta = theta,
                       .h_bar = h_bar,
                       .eps_precision = eps_precision,
                       .n_real = n_real,
                       .n_stages = n,
                       .predicted_error = n > 0 ? error_after_n(t, h_bar, n) : 0.0,
                       .degenerate_budget = arg <= 1};
}

bool is_admissible(const CascadePlan& plan) {
    return plan.predicted_error <= plan.eps_precision * std::abs(plan.theta);
}

} // namespace wmamp
