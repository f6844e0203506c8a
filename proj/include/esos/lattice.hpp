#pragma once

// Dense operators on tensor products of V = C² (basis e+ ↦ bit 0, e- ↦ bit 1).
// Leg 0 is the most significant bit. Two-leg gates may depend on the summed
// h-eigenvalue k of a set of spectator legs; that is how dynamical shifts such
// as R_12(λ, θ - γh_3) are realised, blockwise over the spectator signs.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include <esos/theta.hpp>

namespace esos {

using matrix = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic>;
using vector = Eigen::Matrix<complex, Eigen::Dynamic, 1>;
using matrix2 = Eigen::Matrix<complex, 2, 2>;
using matrix4 = Eigen::Matrix<complex, 4, 4>;

inline std::size_t basis_dim(int legs)
{
    return std::size_t{1} << legs;
}

inline int leg_sign(std::size_t index, int leg, int legs)
{
    return ((index >> (legs - 1 - leg)) & 1u) ? -1 : 1;
}

// Σ h over the given legs for a basis state.
inline int partial_weight(std::size_t index, std::span<const int> of_legs, int legs)
{
    int k = 0;
    for (int l : of_legs) {
        k += leg_sign(index, l, legs);
    }
    return k;
}

inline int total_weight(std::size_t index, int legs)
{
    return legs - 2 * std::popcount(index);
}

// An operator on `legs` copies of V together with the weight it is declared to carry:
// [Σ_legs h, X] = weight·X.
struct lattice_operator {
    int legs = 0;
    matrix entries;
    int weight = 0;
};

namespace detail {

// Lazily evaluated gate per spectator weight k ∈ [-s, s].
template <class Mat, class Fn>
class gate_cache {
public:
    gate_cache(int spectators, Fn &fn) : offset_(spectators), slots_(2 * spectators + 1), fn_(fn) {}

    const Mat &operator()(int k)
    {
        auto &slot = slots_[k + offset_];
        if (!slot) {
            slot.emplace(fn_(k));
        }
        return *slot;
    }

private:
    int offset_;
    std::vector<std::optional<Mat>> slots_;
    Fn &fn_;
};

} // namespace detail

// X ← G_{la lb} · X, where G acts on legs (la, lb) with la the first tensor
// factor of the 4×4 block returned by gate_for(k).
template <class Derived, class GateFn>
void apply_two_leg(Eigen::MatrixBase<Derived> &X, int legs, int la, int lb, std::span<const int> shift_legs,
                   GateFn &&gate_for)
{
    if (la == lb) {
        throw std::invalid_argument("apply_two_leg: legs must differ");
    }
    const std::size_t ma = std::size_t{1} << (legs - 1 - la);
    const std::size_t mb = std::size_t{1} << (legs - 1 - lb);
    const std::size_t dim = basis_dim(legs);
    const Eigen::Index cols = X.cols();
    detail::gate_cache<matrix4, std::remove_reference_t<GateFn>> cache(int(shift_legs.size()), gate_for);
    Eigen::Matrix<complex, 4, Eigen::Dynamic> in(4, cols), out(4, cols);
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & (ma | mb)) {
            continue;
        }
        const matrix4 &G = cache(partial_weight(i, shift_legs, legs));
        const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
        for (int r = 0; r < 4; ++r) {
            in.row(r) = X.row(Eigen::Index(idx[r]));
        }
        out.noalias() = G * in;
        for (int r = 0; r < 4; ++r) {
            X.row(Eigen::Index(idx[r])) = out.row(r);
        }
    }
}

template <class Derived, class GateFn>
void apply_one_leg(Eigen::MatrixBase<Derived> &X, int legs, int leg, std::span<const int> shift_legs,
                   GateFn &&gate_for)
{
    const std::size_t ml = std::size_t{1} << (legs - 1 - leg);
    const std::size_t dim = basis_dim(legs);
    const Eigen::Index cols = X.cols();
    detail::gate_cache<matrix2, std::remove_reference_t<GateFn>> cache(int(shift_legs.size()), gate_for);
    Eigen::Matrix<complex, 2, Eigen::Dynamic> in(2, cols), out(2, cols);
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & ml) {
            continue;
        }
        const matrix2 &G = cache(partial_weight(i, shift_legs, legs));
        in.row(0) = X.row(Eigen::Index(i));
        in.row(1) = X.row(Eigen::Index(i | ml));
        out.noalias() = G * in;
        X.row(Eigen::Index(i)) = out.row(0);
        X.row(Eigen::Index(i | ml)) = out.row(1);
    }
}

// X ← diag(fn(Σ_{of_legs} h)) · X; the scalar is read on the output (row) state.
template <class Derived, class Fn>
void apply_weight_diagonal(Eigen::MatrixBase<Derived> &X, int legs, std::span<const int> of_legs, Fn &&fn)
{
    const std::size_t dim = basis_dim(legs);
    const int s = int(of_legs.size());
    std::vector<std::optional<complex>> cache(2 * s + 1);
    for (std::size_t i = 0; i < dim; ++i) {
        const int k = partial_weight(i, of_legs, legs);
        auto &slot = cache[k + s];
        if (!slot) {
            slot.emplace(fn(k));
        }
        X.row(Eigen::Index(i)) *= *slot;
    }
}

inline std::vector<int> leg_range(int first, int count)
{
    std::vector<int> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = first + i;
    }
    return v;
}

// Aux-space block (row sign, column sign) of an operator whose leading leg is auxiliary.
enum class block { A, B, C, D };

inline matrix extract_block(const matrix &op, block which)
{
    const Eigen::Index D = op.rows() / 2;
    switch (which) {
    case block::A:
        return op.topLeftCorner(D, D);
    case block::B:
        return op.topRightCorner(D, D);
    case block::C:
        return op.bottomLeftCorner(D, D);
    case block::D:
        return op.bottomRightCorner(D, D);
    }
    return {};
}

inline matrix embed_blocks(const matrix &A, const matrix &B, const matrix &C, const matrix &D)
{
    const Eigen::Index n = A.rows();
    matrix op(2 * n, 2 * n);
    op << A, B, C, D;
    return op;
}

// Partial transpose in the leading leg: block (a,b) ↦ block (b,a).
inline matrix partial_transpose_leading(const matrix &op)
{
    const Eigen::Index D = op.rows() / 2;
    matrix out(op.rows(), op.cols());
    out.topLeftCorner(D, D) = op.topLeftCorner(D, D);
    out.bottomRightCorner(D, D) = op.bottomRightCorner(D, D);
    out.topRightCorner(D, D) = op.bottomLeftCorner(D, D);
    out.bottomLeftCorner(D, D) = op.topRightCorner(D, D);
    return out;
}

// max|A − B| / max|A|
inline real relative_residual(const matrix &lhs, const matrix &rhs)
{
    const real scale = lhs.cwiseAbs().maxCoeff();
    const real diff = (lhs - rhs).cwiseAbs().maxCoeff();
    return scale > 0.0L ? diff / scale : diff;
}

// max|[H, X] − w X| / max|X| with H the total weight on all legs.
inline real weight_residual(const lattice_operator &op)
{
    const matrix &X = op.entries;
    real diff = 0.0L;
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const int hr = total_weight(std::size_t(r), op.legs);
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            const int hc = total_weight(std::size_t(c), op.legs);
            diff = std::max(diff, std::abs(real(hr - hc - op.weight) * X(r, c)));
        }
    }
    const real scale = X.cwiseAbs().maxCoeff();
    return scale > 0.0L ? diff / scale : diff;
}

} // namespace esos
