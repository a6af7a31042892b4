#pragma once

// Dense complex state algebra for a small path system tensored with a
// two-level polarization pointer. States are stored as a d x 2 table
// indexed (path, polarization) with polarization order {H, V}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wmamp/compensated_sum.hpp"
#include "wmamp/errors.hpp"

namespace wmamp {

template <typename Scalar>
using Complex = std::complex<Scalar>;

enum Polarization : Eigen::Index { kH = 0, kV = 1 };

// Absolute tolerance on squared norms for "normalized" checks.
inline constexpr double kNormTolerance = 1e-12;
// Relative amplitude below which a polarization component counts as lost.
inline constexpr double kPhaseLossThreshold = 1e-12;

namespace detail {

template <typename Derived>
typename Derived::RealScalar squared_norm(const Eigen::MatrixBase<Derived>& m) {
    CompensatedSum<typename Derived::RealScalar> acc;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            acc += std::norm(m(r, c));
        }
    }
    return acc.value();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) return false;
        }
    }
    return true;
}

template <typename Scalar>
bool near_unit(Scalar squared) {
    return std::abs(squared - Scalar(1)) <= Scalar(kNormTolerance);
}

} // namespace detail

/// Polarization pointer, amplitudes over {H, V}. Unnormalized pointers keep
/// their raw post-selection weight.
template <typename Scalar>
class PointerState {
public:
    using Amplitudes = Eigen::Matrix<Complex<Scalar>, 2, 1>;

    PointerState(Complex<Scalar> h, Complex<Scalar> v, bool normalized = false)
        : amps_(h, v), normalized_(normalized) {
        if (!detail::all_finite(amps_)) throw DomainError("pointer amplitudes must be finite");
        if (normalized_ && !detail::near_unit(squared_norm())) {
            throw NormalizationError("pointer flagged normalized but |h|^2+|v|^2 != 1");
        }
    }

    /// (|H> + |V>)/sqrt(2)
    static PointerState plus() {
        const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
        return PointerState({s, 0}, {s, 0}, true);
    }

    /// (|H> + e^{i phase}|V>)/sqrt(2)
    static PointerState equatorial(Scalar phase) {
        const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
        return PointerState({s, 0}, std::polar(s, phase), true);
    }

    const Complex<Scalar>& h() const { return amps_(kH); }
    const Complex<Scalar>& v() const { return amps_(kV); }
    const Amplitudes& amplitudes() const { return amps_; }
    bool is_normalized() const { return normalized_; }
    Scalar squared_norm() const { return detail::squared_norm(amps_); }

    PointerState normalized() const {
        const Scalar n = std::sqrt(squared_norm());
        if (!(n > Scalar(0))) throw PhaseLostError("cannot normalize a zero pointer");
        return PointerState(amps_(kH) / n, amps_(kV) / n, true);
    }

private:
    Amplitudes amps_;
    bool normalized_;
};

/// Ket over the path system. Real coefficient lists are stored as
/// complex amplitudes.
template <typename Scalar>
class SystemKet {
public:
    using Amplitudes = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

    explicit SystemKet(Amplitudes amps) : amps_(std::move(amps)) {
        if (amps_.size() < 2) throw DimensionError("system ket needs dim >= 2");
        if (!detail::all_finite(amps_)) throw DomainError("system ket amplitudes must be finite");
        if (!(detail::squared_norm(amps_) > Scalar(0))) {
            throw NormalizationError("system ket needs at least one nonzero amplitude");
        }
    }

    static SystemKet from_real(const std::vector<Scalar>& coeffs) {
        Amplitudes amps(static_cast<Eigen::Index>(coeffs.size()));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            amps(static_cast<Eigen::Index>(i)) = Complex<Scalar>(coeffs[i], 0);
        }
        return SystemKet(std::move(amps));
    }

    static SystemKet from_real(std::initializer_list<Scalar> coeffs) {
        return from_real(std::vector<Scalar>(coeffs));
    }

    Eigen::Index dim() const { return amps_.size(); }
    const Amplitudes& amplitudes() const { return amps_; }
    const Complex<Scalar>& operator[](Eigen::Index i) const { return amps_(i); }
    Scalar squared_norm() const { return detail::squared_norm(amps_); }
    bool is_normalized() const { return detail::near_unit(squared_norm()); }

private:
    Amplitudes amps_;
};

/// Path (x) polarization state as a d x 2 amplitude table. Squared norm lies
/// in (0, 1 + 1e-12].
template <typename Scalar>
class CompositeState {
public:
    using Table = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 2>;

    explicit CompositeState(Table amps) : amps_(std::move(amps)) {
        if (amps_.rows() < 1) throw DimensionError("composite state needs at least one path");
        if (!detail::all_finite(amps_)) throw DomainError("composite amplitudes must be finite");
        const Scalar n2 = squared_norm();
        if (!(n2 > Scalar(0)) || n2 > Scalar(1) + Scalar(kNormTolerance)) {
            throw NormalizationError("composite squared norm outside (0, 1]");
        }
    }

    Eigen::Index dim() const { return amps_.rows(); }
    const Table& amplitudes() const { return amps_; }
    const Complex<Scalar>& operator()(Eigen::Index path, Polarization pol) const {
        return amps_(path, pol);
    }
    Scalar squared_norm() const { return detail::squared_norm(amps_); }

    /// Pointer carried by one path branch, unnormalized.
    PointerState<Scalar> branch(Eigen::Index path) const {
        if (path < 0 || path >= dim()) throw DimensionError("path index out of range");
        return PointerState<Scalar>(amps_(path, kH), amps_(path, kV));
    }

private:
    Table amps_;
};

template <typename Scalar>
struct PostSelection {
    PointerState<Scalar> pointer;  // unnormalized
    Scalar probability;
};

/// Real coefficients of a two-branch merge: |mu> = first|i> + second|j>.
template <typename Scalar>
struct Mixing {
    Scalar first;
    Scalar second;
};

template <typename Scalar>
CompositeState<Scalar> tensor(const SystemKet<Scalar>& system, const PointerState<Scalar>& pointer) {
    if (!system.is_normalized()) throw NormalizationError("tensor: system ket not normalized");
    if (!detail::near_unit(pointer.squared_norm())) {
        throw NormalizationError("tensor: pointer not normalized");
    }
    return CompositeState<Scalar>(system.amplitudes() * pointer.amplitudes().transpose());
}

/// Multiplies the V amplitude of `target_path` by e^{i theta}.
template <typename Scalar>
CompositeState<Scalar> apply_control_phase(const CompositeState<Scalar>& state, Eigen::Index target_path,
                                            Scalar theta) {
    if (target_path < 0 || target_path >= state.dim()) {
        throw DimensionError("control phase target path " + std::to_string(target_path) + " out of range");
    }
    typename CompositeState<Scalar>::Table amps = state.amplitudes();
    amps(target_path, kV) *= std::polar(Scalar(1), theta);
    return CompositeState<Scalar>(std::move(amps));
}

/// Projects the system onto `ket` and returns the surviving pointer together
/// with its squared norm.
template <typename Scalar>
PostSelection<Scalar> post_select_full(const CompositeState<Scalar>& state, const SystemKet<Scalar>& ket) {
    if (ket.dim() != state.dim()) throw DimensionError("post-selection ket dimension mismatch");
    if (!ket.is_normalized()) throw NormalizationError("post-selection ket not normalized");
    const Eigen::Matrix<Complex<Scalar>, 1, 2> p = ket.amplitudes().adjoint() * state.amplitudes();
    PointerState<Scalar> pointer(p(kH), p(kV));
    const Scalar prob = pointer.squared_norm();
    return {std::move(pointer), prob};
}

/// Partial projection onto span{|k> : k != i, j} + |mu>, |mu> = mix.first|i> + mix.second|j>.
/// The merged branch takes the position min(i, j); the remaining branches keep
/// their relative order, so the result has one path fewer.
template <typename Scalar>
CompositeState<Scalar> merge_branches(const CompositeState<Scalar>& state, Eigen::Index i, Eigen::Index j,
                                      Mixing<Scalar> mix) {
    const Eigen::Index d = state.dim();
    if (i == j) throw DimensionError("merge_branches: i and j must differ");
    if (i < 0 || j < 0 || i >= d || j >= d) throw DimensionError("merge_branches: index out of range");
    if (!std::isfinite(mix.first) || !std::isfinite(mix.second) ||
        !detail::near_unit(mix.first * mix.first + mix.second * mix.second)) {
        throw NormalizationError("merge_branches: mixing coefficients must be unit norm");
    }

    const auto& in = state.amplitudes();
    const Eigen::Index slot = std::min(i, j);
    typename CompositeState<Scalar>::Table out(d - 1, 2);
    Eigen::Index row = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
        if (k == slot) {
            out.row(row++) = mix.first * in.row(i) + mix.second * in.row(j);
        } else if (k != i && k != j) {
            out.row(row++) = in.row(k);
        }
    }
    return CompositeState<Scalar>(std::move(out));
}

/// <sigma_R> = |R><R| - |L><L| of the normalized pointer.
template <typename Scalar>
Scalar sigma_r_expectation(const PointerState<Scalar>& pointer) {
    const Scalar n2 = pointer.squared_norm();
    if (!(n2 > Scalar(0))) throw PhaseLostError("sigma_R expectation of a zero pointer");
    return Scalar(2) * (std::conj(pointer.h()) * pointer.v()).imag() / n2;
}

/// Relative H -> V phase on (-pi, pi].
template <typename Scalar>
Scalar extract_phase(const PointerState<Scalar>& pointer) {
    const Scalar norm = std::sqrt(pointer.squared_norm());
    const Scalar cut = Scalar(kPhaseLossThreshold) * norm;
    if (!(norm > Scalar(0)) || std::abs(pointer.h()) < cut || std::abs(pointer.v()) < cut) {
        throw PhaseLostError(
            "pointer collapsed onto a single polarization component; the phase is global "
            "(the forbidden point delta = 0)");
    }
    const Scalar phase = std::arg(std::conj(pointer.h()) * pointer.v());
    return phase <= -std::numbers::pi_v<Scalar> ? std::numbers::pi_v<Scalar> : phase;
}

} // namespace wmamp
