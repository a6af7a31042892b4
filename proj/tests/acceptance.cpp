// Acceptance runner. One PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes, or, with --known-fail, when
// the failing set is exactly the listed one. Anything else is a regression.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracle.hpp"
#include "properties.hpp"
#include "wmamp/cascade.hpp"
#include "wmamp/cli/commands.hpp"
#include "wmamp/errors.hpp"
#include "wmamp/optics.hpp"
#include "wmamp/stage.hpp"
#include "wmamp/statevec.hpp"

using namespace wmamp;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED " + what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename E, typename F>
bool throws(F&& f) {
    try {
        f();
    } catch (const E&) {
        return true;
    } catch (...) {
        return false;
    }
    return false;
}

int cli_code(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

optics::BeamSplitter with_ratio(double r_over_t) {
    const double n = std::hypot(1.0, r_over_t);
    return optics::BeamSplitter{r_over_t / n, 1 / n};
}

// balanced BS1/BS2, BS3 and BS4 set so the two stage ratios are ratio1, ratio2
optics::OpticsConfig tuned(double theta, double ratio1, double ratio2) {
    optics::OpticsConfig c;
    c.bs1 = c.bs2 = optics::BeamSplitter::balanced();
    c.theta = theta;
    c.bs3 = with_ratio(ratio1 * c.bs1.t / (c.bs1.r * c.bs2.r));
    c.bs4 = with_ratio(ratio2 * c.kappa() / (c.bs1.r * c.bs2.t));
    return c;
}

// ---------------------------------------------------------------------------

Verdict planner_example() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto p = plan_stages(1e-12, 1e2, 1e-6);
    const double ms = ms_since(t0);
    v.require(std::abs(p.n_real - 5.15) <= 0.01, "N_real = " + fmt("%.6f", p.n_real));
    v.require(p.n_stages == 5, "n_stages = " + std::to_string(p.n_stages));
    v.require(ms < 1, "runtime " + fmt("%.3f", ms) + " ms");
    v.note("N_real " + fmt("%.4f", p.n_real) + ", n " + std::to_string(p.n_stages) + ", " + fmt("%.4f", ms) + " ms");
    return v;
}

Verdict stage_fidelity() {
    Verdict v;
    const auto t0 = Clock::now();
    double worst = 0;
    for (double delta : {1e-1, 1e-2}) {
        std::vector<double> thetas, gaps;
        for (double theta : {1e-3, 1e-4, 1e-5}) {
            const auto r = run_stage_exact(StageSpec::from_delta(theta, delta));
            const double gap = std::abs(r.gamma_exact - r.gamma_first_order);
            const double bound = theta * theta * theta / (delta * delta);
            worst = std::max(worst, gap / bound);
            v.require(gap <= bound, "delta " + fmt("%g", delta) + " theta " + fmt("%g", theta) + " gap " +
                                        fmt("%.3e", gap) + " > " + fmt("%.3e", bound));
            thetas.push_back(theta);
            gaps.push_back(gap);
        }
        const double slope = oracle::loglog_slope(thetas, gaps);
        v.require(std::abs(slope - 3) <= 0.3, "slope " + fmt("%.4f", slope) + " at delta " + fmt("%g", delta));
        v.note("slope(delta=" + fmt("%g", delta) + ") " + fmt("%.4f", slope));
    }
    const double ms = ms_since(t0);
    v.require(ms < 1000, "runtime " + fmt("%.1f", ms) + " ms");
    v.note("worst gap/bound " + fmt("%.3f", worst) + ", " + fmt("%.3f", ms) + " ms");
    return v;
}

Verdict forbidden_point() {
    Verdict v;
    v.require(throws<ForbiddenDeltaError>([] { run_stage_exact(StageSpec::from_delta(1e-4, 0.0)); }),
              "stage delta = 0");
    v.require(throws<ForbiddenDeltaError>([] { run_cascade(cascade_from_ratios(1e-6, {-0.99, -1.0})); }),
              "cascade stage 2 ratio = -1");
    // kappa = t1 t3 + r1 r2 r3 = 0 kills the first stage
    optics::OpticsConfig c;
    c.bs1 = c.bs2 = optics::BeamSplitter::balanced();
    c.bs3 = optics::BeamSplitter{-std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0)};
    c.bs4 = optics::BeamSplitter::balanced();
    c.theta = 1e-6;
    v.require(throws<ForbiddenDeltaError>([&] { optics::run_full(c); }), "optics kappa = 0");
    auto bad4 = tuned(1e-6, -0.99, -1.0);
    v.require(throws<ForbiddenDeltaError>([&] { optics::run_full(bad4); }), "optics stage 2 ratio = -1");
    v.require(throws<PhaseLostError>([] { extract_phase(PointerState<double>(1.0, 0.0)); }),
              "single polarization component");

    const int s = cli_code({"stage", "--theta", "1e-4", "--delta", "0"});
    const int k = cli_code({"cascade", "--theta", "1e-6", "--deltas", "1e-2,0"});
    const std::string b = fmt("%.17g", c.bs1.r);
    const int o = cli_code({"optics", "--theta", "1e-6", "--r1", b, "--r2", b, "--r4", b, "--r3", fmt("%.17g", c.bs3.r),
                            "--t3", fmt("%.17g", c.bs3.t)});
    v.require(s == cli::kExitForbidden, "cli stage exit " + std::to_string(s));
    v.require(k == cli::kExitForbidden, "cli cascade exit " + std::to_string(k));
    v.require(o == cli::kExitForbidden, "cli optics exit " + std::to_string(o));
    v.note("cli exits stage/cascade/optics = " + std::to_string(s) + "/" + std::to_string(k) + "/" + std::to_string(o));
    return v;
}

Verdict bench_equivalence() {
    Verdict v;
    props::Rng rng(0xacce0004);
    const auto t0 = Clock::now();
    int done = 0, skipped = 0;
    double worst_phi = 0, worst_p = 0;
    while (done < 100) {
        const auto c = props::random_bench(rng);
        try {
            const auto b = optics::run_full(c);
            const auto a = run_cascade(optics::map_to_abstract(c));
            worst_phi = std::max(worst_phi, std::abs(b.phi - a.phi_final) / std::abs(a.phi_final));
            worst_p = std::max(worst_p, std::abs(b.success_prob - a.success_prob));
            ++done;
        } catch (const PhysicalError&) {
            ++skipped;
        }
    }
    const double ms = ms_since(t0);
    v.require(worst_phi <= 1e-12, "phi rel " + fmt("%.3e", worst_phi));
    v.require(worst_p <= 1e-13, "prob " + fmt("%.3e", worst_p));
    v.require(ms < 1000, "runtime " + fmt("%.1f", ms) + " ms");
    v.note("100 configs (" + std::to_string(skipped) + " forbidden draws skipped), phi rel " + fmt("%.2e", worst_phi) +
           ", prob " + fmt("%.2e", worst_p) + ", " + fmt("%.2f", ms) + " ms");
    return v;
}

Verdict total_factor() {
    Verdict v;
    const auto o = props::cascade_total_factor(0xacce0005, props::kDefaultCases);
    v.require(o.failures == 0, std::to_string(o.failures) + " of " + std::to_string(o.cases) + ": " + o.first_failure);
    // the bench runs go through the same identity
    props::Rng rng(0xacce0105);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        try {
            const auto c = props::random_bench(rng);
            const auto r = run_cascade(optics::map_to_abstract(c));
            worst = std::max(worst, std::abs(r.h_total * c.theta - r.phi_final) / std::abs(r.phi_final));
        } catch (const PhysicalError&) {
        }
    }
    v.require(worst <= 1e-10, "bench-mapped rel " + fmt("%.3e", worst));
    v.note(std::to_string(o.cases) + " random cascades, worst rel " + fmt("%.2e", std::max(o.worst, worst)));
    return v;
}

Verdict readout() {
    Verdict v;
    double worst_exact = 0, worst_fo = 0;
    for (double theta : {1e-9, 1e-8, 1e-7, 1e-6}) {
        for (double offset : {1e-1, 1e-2}) {
            const double ratio = -1 + offset;
            const auto c = tuned(theta, ratio, ratio);
            const auto r = optics::run_full(c);
            const double i0 = c.intensity_i0;
            const double gap_exact = std::abs(r.delta_i - i0 * std::sin(r.phi));
            const double h_t = 1 / ((1 + ratio) * (1 + ratio));
            const double gap_fo = std::abs(r.delta_i - i0 * std::sin(h_t * theta));
            const double bound_fo = std::abs(h_t * h_t * r.phi * theta * theta);
            worst_exact = std::max(worst_exact, gap_exact);
            worst_fo = std::max(worst_fo, gap_fo / bound_fo);
            v.require(gap_exact <= 1e-13, "|dI - I0 sin phi| = " + fmt("%.3e", gap_exact) + " at theta " +
                                              fmt("%g", theta) + ", offset " + fmt("%g", offset));
            v.require(gap_fo <= bound_fo, "first-order gap " + fmt("%.3e", gap_fo) + " > " + fmt("%.3e", bound_fo));
        }
    }
    v.note("worst |dI - I0 sin phi| " + fmt("%.3e", worst_exact) + ", worst first-order gap/bound " +
           fmt("%.3f", worst_fo));
    return v;
}

Verdict error_model() {
    Verdict v;
    const double theta = 1e-3, h_bar = 1e2;
    const double e1 = error_after_n(theta, h_bar, 1);
    v.require(e1 == h_bar * (theta * theta * theta) / 4, "error_after_n(n=1) = " + fmt("%.17g", e1));
    const double delta = 1e-2, hb = 1 / delta;
    const auto r = run_stage_exact(StageSpec::from_delta(theta, delta));
    const double gap = std::abs(r.gamma_exact - r.gamma_first_order);
    const double ref = hb * hb * theta * theta * theta / 4;
    const double q = gap / ref;
    v.require(q >= 0.25 && q <= 4, "measured/predicted = " + fmt("%.4f", q));
    v.note("n=1 error " + fmt("%.6g", e1) + ", measured gap " + fmt("%.4e", gap) + " = " + fmt("%.4f", q) +
           " x h_bar^2 theta^3/4");
    return v;
}

Verdict property_suites() {
    Verdict v;
    const auto t0 = Clock::now();
    int cases = 0;
    for (const auto& s : props::all_suites()) {
        const auto o = s.run(s.seed, props::kDefaultCases);
        cases += o.cases;
        v.require(o.cases >= props::kDefaultCases, std::string(s.label) + " ran " + std::to_string(o.cases) + " cases");
        v.require(o.failures == 0, std::string(s.label) + ": " + std::to_string(o.failures) + " failures, first " + o.first_failure);
    }
    const double sec = ms_since(t0) / 1000;
    v.require(sec < 30, "runtime " + fmt("%.2f", sec) + " s");
    v.note(std::to_string(props::all_suites().size()) + " suites, " + std::to_string(cases) + " cases, " +
           fmt("%.2f", sec) + " s");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria runner"};
    std::vector<int> known;
    app.add_option("--known-fail", known, "criteria expected to fail (comma separated)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"planner worked example", planner_example},
        {"single-stage first-order fidelity", stage_fidelity},
        {"forbidden point", forbidden_point},
        {"bench/abstract equivalence", bench_equivalence},
        {"total-factor identity", total_factor},
        {"readout formula", readout},
        {"error-model consistency", error_model},
        {"property suites", property_suites},
    };

    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        if (!v.pass) failed.insert(id);
        std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), v.detail.c_str());
    }

    const std::set<int> expected(known.begin(), known.end());
    std::printf("%zu/%zu passed", criteria.size() - failed.size(), criteria.size());
    if (!expected.empty()) std::printf(" (known failures:%s)", [&] {
        std::string s;
        for (int k : expected) s += " " + std::to_string(k);
        return s;
    }().c_str());
    std::printf("\n");
    if (failed != expected) {
        for (int k : failed)
            if (!expected.count(k)) std::printf("regression: criterion %d failed\n", k);
        for (int k : expected)
            if (!failed.count(k)) std::printf("unexpected pass: criterion %d\n", k);
        return 1;
    }
    return 0;
}
