#include "wmamp/stage.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wmamp {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

// 1 - cos(x) without cancellation.
double one_minus_cos(double x) {
    const double s = std::sin(x / 2);
    return 2 * s * s;
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw DomainError(std::string(name) + " must be finite");
}

} // namespace

StageSpec StageSpec::from_delta(double theta, double delta) {
    require_finite(theta, "theta");
    require_finite(delta, "delta");
    if (delta == 0) {
        throw ForbiddenDeltaError("delta = 0 is forbidden by the process of amplification");
    }
    if (std::abs(delta) >= kQuarterPi) throw DomainError("|delta| must be below pi/4");
    return StageSpec(theta, chi_from_delta(delta), delta, true);
}

StageSpec StageSpec::from_chi(double theta, double chi) {
    require_finite(theta, "theta");
    require_finite(chi, "chi");
    return StageSpec(theta, chi, -(chi + kQuarterPi), false);
}

double StageSpec::bright_amplitude() const {
    // cos x + sin x = sqrt(2) sin(x + pi/4)
    return delta_form_ ? -std::numbers::sqrt2 * std::sin(delta_)
                       : std::numbers::sqrt2 * std::sin(chi_ + kQuarterPi);
}

double StageSpec::one_plus_cot() const {
    const double s = std::sin(chi_);
    if (s == 0) return std::numeric_limits<double>::infinity();
    return bright_amplitude() / s;
}

double chi_from_delta(double delta) {
    if (delta == 0) {
        throw ForbiddenDeltaError("delta = 0 is forbidden by the process of amplification");
    }
    return -(kQuarterPi + delta);
}

double gamma_first_order(double theta, double ratio) {
    // cos(theta) + ratio = (1 + ratio) - (1 - cos theta); 1 + ratio is exact
    // for ratio in [-2, -1/2].
    const double x = (1 + ratio) - one_minus_cos(theta);
    const double y = std::sin(theta);
    if (x == 0 && y == 0) throw PhaseLostError("gamma undefined: both quadrature components vanish");
    return std::atan2(y, x);
}

double gamma_first_order_ratio(double theta, double num, double den) {
    if (den == 0) {
        if (num == 0) throw PhaseLostError("gamma undefined: 0/0 ratio");
        return 0.0;
    }
    // arg of (num + den e^{i theta}) relative to the no-signal amplitude
    // num + den, which can be negative. Same as gamma_first_order(theta,
    // num/den) whenever 1 + num/den > 0.
    const double bright = num + den;
    const double x = bright - den * one_minus_cos(theta);
    const double y = den * std::sin(theta);
    if (x == 0 && y == 0) throw PhaseLostError("gamma undefined: both quadrature components vanish");
    return bright < 0 ? std::atan2(-y, -x) : std::atan2(y, x);
}

double gamma_small_angle(double theta, double one_plus_cot) {
    if (std::isinf(one_plus_cot)) return 0.0;
    if (one_plus_cot == 0) throw ForbiddenDeltaError("1 + cot(chi) = 0: forbidden post-selection");
    return std::atan(theta / one_plus_cot);
}

double amp_factor_chi(double theta, double chi) {
    if (theta == 0) throw DegenerateSignalError("amplification factor undefined for theta = 0");
    return gamma_first_order(theta, std::cos(chi) / std::sin(chi)) / theta;
}

double amp_factor_delta(double theta, double delta) {
    if (delta == 0) {
        throw ForbiddenDeltaError("delta = 0 is forbidden by the process of amplification");
    }
    if (theta == 0) throw DegenerateSignalError("amplification factor undefined for theta = 0");
    return std::atan(theta / delta) / theta;
}

StageResult run_stage_exact(const StageSpec& spec) {
    if (std::abs(spec.bright_amplitude()) < 1e-15) {
        throw ForbiddenDeltaError("post-selection orthogonal to the no-signal state (delta = 0)");
    }
    const double r = 1 / std::numbers::sqrt2;
    const auto initial = tensor(SystemKet<double>::from_real({r, r}), PointerState<double>::plus());
    const auto evolved = apply_control_phase(initial, 1, spec.theta());
    // <chi| applied as bright * row0 + sin(chi) * (row1 - row0); the path
    // difference only lives in V and is e^{i theta} - 1 times row0.
    const auto& a = evolved.amplitudes();
    const double s = std::sin(spec.chi());
    const double bright = spec.bright_amplitude();
    const std::complex<double> kick(0.0 - one_minus_cos(spec.theta()), std::sin(spec.theta()));
    PointerState<double> pointer(bright * a(0, kH) + s * (a(1, kH) - a(0, kH)), bright * a(0, kV) + s * kick * a(0, kV));
    const double prob = pointer.squared_norm();

    const double gamma = extract_phase(pointer);
    const double gamma_fo = gamma_small_angle(spec.theta(), spec.one_plus_cot());
    const double theta = spec.theta();
    return StageResult{
        .gamma_exact = gamma,
        .gamma_first_order = gamma_fo,
        .h_exact = stage_factor(gamma, theta),
        .h_first_order = stage_factor(gamma_fo, theta),
        .success_prob = prob,
        .pointer = std::move(pointer),
    };
}

double delta_gamma_exact(double theta, double chi, ReadoutForm form) {
    const double bright = std::numbers::sqrt2 * std::sin(chi + kQuarterPi);
    if (std::abs(bright) < 1e-15) {
        throw ForbiddenDeltaError("delta = 0 is forbidden by the process of amplification");
    }
    const double eps_cos = one_minus_cos(theta);
    const double denom = bright * bright - std::sin(2 * chi) * eps_cos;
    // The global sign of the bright amplitude drops out of <sigma_R>.
    const double scale = form == ReadoutForm::SquareRoot ? std::abs(bright) / std::sqrt(denom)
                                                          : std::abs(bright) / denom;
    const double tan_gamma = std::sin(theta) / (bright / std::sin(chi) - eps_cos);
    return (scale - 1) * tan_gamma;
}

double delta_gamma_bound(double theta, double delta) {
    return std::abs(theta * theta * theta) / (4 * delta * delta);
}

double stage_factor(double phase_out, double phase_in) {
    return phase_in == 0 ? 1.0 : phase_out / phase_in;
}

} // namespace wmamp
