#pragma once

// Multi-stage amplification on a (stages + 1)-dimensional path system, the
// error-propagation model for repeated stages, and the stage-count planner.

#include <string_view>
#include <vector>

#include "wmamp/statevec.hpp"

namespace wmamp {

/// Initial real path coefficients a_0..a_{d-1} (signal branch last) and one
/// unit-norm mixing per stage. Stage k merges the current signal branch with
/// the highest-index unused reference branch: stage 1 uses reference d-2,
/// the last stage uses reference 0. `first` multiplies the reference branch,
/// `second` the signal branch.
struct CascadeSpec {
    double theta = 0;
    std::vector<double> initial_coeffs;
    std::vector<Mixing<double>> stage_mixings;

    std::size_t stages() const { return stage_mixings.size(); }
    void validate() const;
};

/// Uniform initial coefficients with mixings chosen so that stage k has
/// reference/signal ratio `ratios[k]` (e.g. -1 + delta_k).
CascadeSpec cascade_from_ratios(double theta, const std::vector<double>& ratios);

struct StageRecord {
    double gamma_exact;
    double gamma_first_order;  // atan2 chain fed by the previous first-order phase
    double h_exact;
    double h_first_order;
    double ratio;
    double success_prob_cumulative;
};

struct CascadeResult {
    std::vector<StageRecord> per_stage;
    double phi_final;
    double phi_first_order;
    double h_total;
    double success_prob;
    PointerState<double> pointer;  // unnormalized final pointer
};

CascadeResult run_cascade(const CascadeSpec& spec);

double total_amp(const std::vector<double>& h_list);

/// Closed-form accumulated error h_bar^(2n-1) theta^3 / 4.
double error_after_n(double theta, double h_bar, int n);

enum class ErrorModel {
    Constant,  // delta_theta_k = h_bar * delta_theta_{k-1} + h_bar theta^3 / 4
    GeometricSum,  // (h_bar theta^3 / 4) * (h_bar^(2n) - 1) / (h_bar^2 - 1)
};

ErrorModel parse_error_model(std::string_view name);
std::string_view to_string(ErrorModel model);

double recursion_exact(double theta, double h_bar, int n, ErrorModel model);

struct CascadePlan {
    double theta;
    double h_bar;
    double eps_precision;
    double n_real;          // unrounded stage count
    int n_stages;
    double predicted_error; // error_after_n at n_stages, 0 when n_stages = 0
    bool degenerate_budget; // 4 eps / theta^2 <= 1
};

CascadePlan plan_stages(double theta, double h_bar, double eps_precision);

/// predicted_error <= eps * |theta| (0 stages always admissible).
bool is_admissible(const CascadePlan& plan);

} // namespace wmamp
