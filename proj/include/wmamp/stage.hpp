#pragma once

// One amplification step: control-rotation on path 1 of (|0> + |1>)/sqrt(2),
// post-selection onto cos(chi)|0> + sin(chi)|1>, readout of the relative
// pointer phase gamma.

#include <optional>

#include "wmamp/statevec.hpp"

namespace wmamp {

/// Post-selection parameters of one stage. Built through the factories so the
/// delta / chi forms stay consistent.
class StageSpec {
public:
    /// chi = -(pi/4 + delta). delta = 0 is the forbidden point; |delta| < pi/4.
    static StageSpec from_delta(double theta, double delta);
    static StageSpec from_chi(double theta, double chi);

    double theta() const { return theta_; }
    double chi() const { return chi_; }
    /// Offset from the forbidden angle, -(chi + pi/4). Exact for the delta form.
    double delta() const { return delta_; }
    bool delta_form() const { return delta_form_; }

    /// cos(chi) + sin(chi), without cancellation near chi = -pi/4.
    double bright_amplitude() const;
    /// 1 + cot(chi); infinite when sin(chi) = 0.
    double one_plus_cot() const;

private:
    StageSpec(double theta, double chi, double delta, bool delta_form)
        : theta_(theta), chi_(chi), delta_(delta), delta_form_(delta_form) {}

    double theta_;
    double chi_;
    double delta_;
    bool delta_form_;
};

struct StageResult {
    double gamma_exact;
    double gamma_first_order;
    double h_exact;
    double h_first_order;
    double success_prob;
    PointerState<double> pointer;  // unnormalized post-selected pointer
};

enum class ReadoutForm {
    SquareRoot,  // (cos chi + sin chi)/sqrt(...) as in the <sigma_R> expression
    NoSquareRoot, // same denominator without the square root
};

double chi_from_delta(double delta);

/// atan2(sin theta, cos theta + ratio). The ratio generalizes cot(chi), bd/cf
/// and am/qn.
double gamma_first_order(double theta, double ratio);

/// Phase of num + den e^{i theta} relative to num + den. Equals
/// gamma_first_order(theta, num/den) when 1 + num/den > 0. den = 0 means the
/// signal branch is projected out and the phase is 0.
double gamma_first_order_ratio(double theta, double num, double den);

/// Small-angle form arctan(theta / (1 + cot chi)), i.e. cos(theta) -> 1 and
/// sin(theta) -> theta.
double gamma_small_angle(double theta, double one_plus_cot);

double amp_factor_chi(double theta, double chi);
double amp_factor_delta(double theta, double delta);

StageResult run_stage_exact(const StageSpec& spec);

/// Closed-form estimate of the readout error of gamma from the <sigma_R>
/// measurement, with 1 - cos(theta) evaluated as 2 sin^2(theta/2).
double delta_gamma_exact(double theta, double chi, ReadoutForm form = ReadoutForm::SquareRoot);

/// theta^3 / (4 delta^2), i.e. h_bar^2 theta^3 / 4 with h_bar = 1/|delta|.
double delta_gamma_bound(double theta, double delta);

/// out/in, or 1 when the input phase is zero.
double stage_factor(double phase_out, double phase_in);

} // namespace wmamp
