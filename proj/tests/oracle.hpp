#pragma once

// Test-only reference arithmetic. Everything here is written out by hand
// from the amplitude expressions (long double, std::complex, no Eigen) and
// must not call into the library.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using real = long double;
using cplx = std::complex<long double>;

struct Pointer {
    cplx h;
    cplx v;
};

inline real rel_phase(const Pointer& p) { return std::arg(p.v / p.h); }
inline real weight(const Pointer& p) { return std::norm(p.h) + std::norm(p.v); }

// Single stage: (|0> + |1>)/sqrt2 (x) |+>, e^{i theta} on V of path 1,
// post-selected onto cos chi |0> + sin chi |1>.
inline Pointer single_stage(real theta, real chi) {
    const cplx e = std::polar(1.0L, theta);
    const real c = std::cos(chi), s = std::sin(chi);
    return {(c + s) / 2.0L, (c + s * e) / 2.0L};
}

// Cascade with real coefficients, signal branch last, each stage merging the
// second-to-last branch (reference, coefficient m.first) with the last
// (signal, coefficient m.second). Tracks the full (H, V) amplitude of every
// branch.
struct Mix {
    real ref;
    real sig;
};

struct CascadeTrace {
    std::vector<Pointer> signal_after_stage;
    std::vector<real> cumulative_weight;
};

inline CascadeTrace cascade(real theta, const std::vector<real>& coeffs, const std::vector<Mix>& mixes) {
    const real r2 = std::sqrt(2.0L);
    std::vector<Pointer> branches;
    for (real c : coeffs) branches.push_back({c / r2, c / r2});
    branches.back().v *= std::polar(1.0L, theta);

    CascadeTrace trace;
    for (const auto& m : mixes) {
        Pointer sig = branches.back();
        branches.pop_back();
        Pointer ref = branches.back();
        branches.pop_back();
        branches.push_back({m.ref * ref.h + m.sig * sig.h, m.ref * ref.v + m.sig * sig.v});
        trace.signal_after_stage.push_back(branches.back());
        real w = 0;
        for (const auto& b : branches) w += weight(b);
        trace.cumulative_weight.push_back(w);
    }
    return trace;
}

// Optical bench: paths (up, middle, down) = (t1, r1 r2, r1 t2), theta on up,
// BS3 keeps t3|up> + r3|middle>, BS4 keeps t4|mu> + r4|down>.
struct Bench {
    real r1, t1, r2, t2, r3, t3, r4, t4;
};

struct BenchTrace {
    Pointer mu;
    Pointer final;
};

inline BenchTrace bench(const Bench& b, real theta) {
    const real r2 = std::sqrt(2.0L);
    const cplx e = std::polar(1.0L, theta);
    const Pointer up{b.t1 / r2, b.t1 * e / r2};
    const Pointer mid{b.r1 * b.r2 / r2, b.r1 * b.r2 / r2};
    const Pointer down{b.r1 * b.t2 / r2, b.r1 * b.t2 / r2};
    const Pointer mu{b.t3 * up.h + b.r3 * mid.h, b.t3 * up.v + b.r3 * mid.v};
    const Pointer fin{b.t4 * mu.h + b.r4 * down.h, b.t4 * mu.v + b.r4 * down.v};
    return {mu, fin};
}

// <sigma_R> of the normalized pointer, from |<R|p>|^2 - |<L|p>|^2.
inline real sigma_r(const Pointer& p) {
    const real r2 = std::sqrt(2.0L);
    const cplx i(0, 1);
    const cplx on_r = (p.h + -i * p.v) / r2;  // <R| = (<H| - i<V|)/sqrt2
    const cplx on_l = (p.h + i * p.v) / r2;
    return (std::norm(on_r) - std::norm(on_l)) / weight(p);
}

// Least-squares slope of log|y| against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracle
