#pragma once

// Two-stage optical bench: BS1/BS2 prepare a three-path state, the
// polarizing Michelson interferometer imprints theta on the up arm, BS3 and
// BS4 post-select, and the polarization analyser reads out in the {R, L}
// basis.

#include <optional>
#include <string>

#include "wmamp/cascade.hpp"
#include "wmamp/statevec.hpp"

namespace wmamp::optics {

enum Path : Eigen::Index { kUp = 0, kMiddle = 1, kDown = 2 };

/// Lossless beam splitter with real coefficients, r^2 + t^2 = 1. Signs are
/// free; a negative coefficient stands for a pi phase on that port.
struct BeamSplitter {
    double r = 0;
    double t = 1;

    /// t = sqrt(1 - r^2)
    static BeamSplitter from_r(double r);
    static BeamSplitter balanced();
    void validate(const std::string& name) const;
};

struct OpticsConfig {
    BeamSplitter bs1, bs2, bs3, bs4;
    double theta = 0;
    double intensity_i0 = 1;

    void validate() const;
    /// t1 t3 + r1 r2 r3, the no-signal amplitude surviving BS3.
    double kappa() const;
};

struct FirstPostSelection {
    CompositeState<double> state;  // paths (mu, down)
    double kappa;                  // sqrt(2) x merged H amplitude
    double gamma_exact;
    double gamma_first_order;
};

struct SecondPostSelection {
    PointerState<double> pointer;  // unnormalized
    double probability;
    double phi_exact;
    double phi_first_order;
};

struct OpticsResult {
    double gamma;
    double phi;
    double gamma_first_order;
    double phi_first_order;
    double h1;
    double h2;
    double h_total;
    double delta_i;
    double success_prob;
    PointerState<double> pointer;
};

CompositeState<double> prepare_initial(const BeamSplitter& bs1, const BeamSplitter& bs2);
CompositeState<double> pmi_apply(const CompositeState<double>& state, double theta);
FirstPostSelection bs3_postselect(const CompositeState<double>& state, const BeamSplitter& bs3);
/// `input_phase` feeds the first-order estimate; the exact phase of the mu
/// branch is used when it is not given.
SecondPostSelection bs4_postselect(const CompositeState<double>& state, const BeamSplitter& bs4,
                                   std::optional<double> input_phase = std::nullopt);
double pa_measure(const PointerState<double>& pointer, double intensity_i0);
OpticsResult run_full(const OpticsConfig& config);

/// d = 3 cascade with a <-> r1 t2 (down), b <-> r1 r2 (middle), c <-> t1 (up),
/// stage mixings (r3, t3) then (r4, t4).
CascadeSpec map_to_abstract(const OpticsConfig& config);

} // namespace wmamp::optics
