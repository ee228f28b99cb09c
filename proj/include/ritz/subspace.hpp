#pragma once

// Subspaces represented by isometries: principal angles, projections,
// sums, orthocomplements, compressions, invariant subspaces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ritz/error.hpp"
#include "ritz/linalg.hpp"
#include "ritz/majorization.hpp"

namespace ritz {

/// Angles at or below this many radians count as zero (subspaces intersect).
inline constexpr double kAngleTol = 1e-8;
/// Relative rank threshold used when orthonormalizing [X | Y].
inline constexpr double kSumRankTol = 1e-10;
/// Orthonormality tolerance accepted for a basis.
inline constexpr double kBasisTol = 1e-12;

/// d x k isometry whose columns span a k-dimensional subspace of C^d.
class SubspaceBasis {
public:
    explicit SubspaceBasis(ComplexMatrix basis) : basis_(std::move(basis)) {
        require(basis_.cols() >= 1 && basis_.cols() <= basis_.rows(), ErrorCode::DimensionMismatch,
                "subspace dimension must satisfy 1 <= k <= d");
        require_finite(basis_, "subspace basis");
        const double err = max_abs(adjoint(basis_) * basis_ - ComplexMatrix::identity(basis_.cols()));
        require(err <= kBasisTol, ErrorCode::NotOrthonormal,
                "columns are not orthonormal (max deviation " + std::to_string(err) + ")");
    }

    /// Orthonormal basis of the column space of m.
    static SubspaceBasis span_of(const ComplexMatrix& m, double rank_tol = kSumRankTol) {
        return SubspaceBasis(orthonormalize(m, rank_tol));
    }

    std::size_t ambient_dim() const noexcept { return basis_.rows(); }
    std::size_t dim() const noexcept { return basis_.cols(); }
    const ComplexMatrix& basis() const noexcept { return basis_; }

private:
    ComplexMatrix basis_;
};

/// Principal angles, non-increasing, each in [0, pi/2].
struct PrincipalAngles {
    RealVec angles;

    std::size_t size() const noexcept { return angles.size(); }
    double largest() const noexcept { return angles.empty() ? 0.0 : angles.front(); }

    RealVec sines() const { return map([](double t) { return std::sin(t); }); }
    RealVec sines_squared() const { return map([](double t) { return std::sin(t) * std::sin(t); }); }
    /// Non-decreasing (angles are non-increasing).
    RealVec cosines() const { return map([](double t) { return std::cos(t); }); }
    RealVec tangents() const { return map([](double t) { return std::tan(t); }); }

    /// Number of angles at most angle_tol.
    std::size_t zero_count(double angle_tol = kAngleTol) const {
        return static_cast<std::size_t>(
            std::count_if(angles.begin(), angles.end(), [&](double t) { return t <= angle_tol; }));
    }

private:
    template <class F>
    RealVec map(F f) const {
        RealVec out(angles.size());
        std::transform(angles.begin(), angles.end(), out.begin(), f);
        return out;
    }
};

inline void require_same_ambient(const SubspaceBasis& x, const SubspaceBasis& y) {
    require(x.ambient_dim() == y.ambient_dim(), ErrorCode::DimensionMismatch,
            "subspaces live in C^" + std::to_string(x.ambient_dim()) + " and C^" + std::to_string(y.ambient_dim()));
}

/**
 * Principal angles between span(X) and span(Y), m = min(dim X, dim Y) of them.
 *
 * Cosines come from s(X*Y). Angles below pi/4 are taken from the sines
 * s((I - P_big) small) instead, since arccos loses half the digits near 1.
 */
inline PrincipalAngles principal_angles(const SubspaceBasis& x, const SubspaceBasis& y) {
    require_same_ambient(x, y);
    const auto& big = x.dim() >= y.dim() ? x.basis() : y.basis();
    const auto& small = x.dim() >= y.dim() ? y.basis() : x.basis();
    const std::size_t m = small.cols();

    const ComplexMatrix cross = adjoint(big) * small;
    const auto cosv = singular_values(cross);          // cos of angles, non-increasing
    const auto sinv = singular_values(small - big * cross);  // sin of angles, non-increasing

    PrincipalAngles out;
    out.angles.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double c = std::clamp(cosv[m - 1 - i], 0.0, 1.0);
        const double s = std::clamp(sinv[i], 0.0, 1.0);
        out.angles[i] = c * c < 0.5 ? std::acos(c) : std::asin(s);
    }
    // Mixed formulas can disagree in the last bit at the pi/4 crossover.
    for (std::size_t i = 1; i < m; ++i) out.angles[i] = std::min(out.angles[i], out.angles[i - 1]);
    return out;
}

/// Orthogonal projection X X*.
inline HermitianMatrix projector(const SubspaceBasis& x) {
    return HermitianMatrix(x.basis() * adjoint(x.basis()));
}

/// Orthonormal basis of the orthogonal complement of span(X) in C^d.
inline SubspaceBasis orthocomplement(const SubspaceBasis& x) {
    const std::size_t d = x.ambient_dim();
    const std::size_t k = x.dim();
    require(k < d, ErrorCode::FullSpace, "subspace is the whole space");
    const HermitianMatrix complement(ComplexMatrix::identity(d) - x.basis() * adjoint(x.basis()));
    const auto eig = hermitian_eig(complement);
    return SubspaceBasis(eig.eigenvectors.columns(0, d - k));
}

/// Orthonormal basis of span(X) + span(Y), from the numerical range of [X | Y].
inline SubspaceBasis subspace_sum(const SubspaceBasis& x, const SubspaceBasis& y, double rank_tol = kSumRankTol) {
    require_same_ambient(x, y);
    return SubspaceBasis::span_of(hcat(x.basis(), y.basis()), rank_tol);
}

/// S* A S.
inline HermitianMatrix compress(const HermitianMatrix& a, const SubspaceBasis& s) {
    require(a.dim() == s.ambient_dim(), ErrorCode::DimensionMismatch, "compress: dimension mismatch");
    return HermitianMatrix(adjoint(s.basis()) * a.matrix() * s.basis());
}

/// Coordinates S* X of a subspace contained in span(S), as a subspace of C^p.
inline SubspaceBasis coordinates_in(const SubspaceBasis& s, const SubspaceBasis& x) {
    require_same_ambient(s, x);
    return SubspaceBasis(adjoint(s.basis()) * x.basis());
}

/// ||A Q - Q (Q* A Q)||_F.
inline double invariance_residual(const HermitianMatrix& a, const SubspaceBasis& q) {
    require(a.dim() == q.ambient_dim(), ErrorCode::DimensionMismatch, "invariance_residual: dimension mismatch");
    const ComplexMatrix aq = a.matrix() * q.basis();
    return frobenius_norm(aq - q.basis() * (adjoint(q.basis()) * aq));
}

/// span(Q) is A-invariant up to rel_tol * ||A||_F.
inline bool is_invariant(const HermitianMatrix& a, const SubspaceBasis& q, double rel_tol = 1e-9) {
    return invariance_residual(a, q) <= rel_tol * frobenius_norm(a.matrix());
}

/**
 * Span of the eigenvectors at the given 0-based positions of the
 * non-increasing eigenvalue list. Raises DegenerateCut when the selection
 * splits a cluster of eigenvalues closer than 1e-8 * ||A||.
 */
inline SubspaceBasis invariant_subspace(const HermitianMatrix& a, std::span<const std::size_t> indices) {
    const std::size_t d = a.dim();
    const std::set<std::size_t> chosen(indices.begin(), indices.end());
    require(!chosen.empty() && chosen.size() == indices.size(), ErrorCode::PreconditionViolated,
            "indices must be non-empty and distinct");
    require(*chosen.rbegin() < d, ErrorCode::PreconditionViolated, "eigen index out of range");

    const auto eig = hermitian_eig(a);
    const auto& lam = eig.eigenvalues;
    const double norm = std::max(std::abs(lam[0]), std::abs(lam[d - 1]));
    const double gap_tol = 1e-8 * norm;
    for (std::size_t i : chosen)
        for (std::size_t j = 0; j < d; ++j)
            if (!chosen.count(j) && std::abs(lam[i] - lam[j]) <= gap_tol)
                fail(ErrorCode::DegenerateCut, "selection splits eigenvalue cluster at positions " + std::to_string(i) +
                                                   " and " + std::to_string(j));

    ComplexMatrix q(d, chosen.size());
    std::size_t c = 0;
    for (std::size_t i : chosen) {
        for (std::size_t r = 0; r < d; ++r) q(r, c) = eig.eigenvectors(r, i);
        ++c;
    }
    return SubspaceBasis(std::move(q));
}

/// Number of principal angles at or below angle_tol, i.e. dim of the intersection.
inline std::size_t intersection_dim(const SubspaceBasis& x, const SubspaceBasis& y, double angle_tol = kAngleTol) {
    return principal_angles(x, y).zero_count(angle_tol);
}

/**
 * Checks lambda(P_X P_{Y⊥} P_X) = s^2(P_{Y⊥} P_X) = (sin^2 Θ(X, Y), 0_{d-k})
 * by three independent computations. Margins are the worst prefix deviation.
 */
inline MajorizationVerdict sin_squared_identity_check(const SubspaceBasis& x, const SubspaceBasis& y,
                                                      double tol = 1e-9) {
    require_same_ambient(x, y);
    require(x.dim() == y.dim(), ErrorCode::DimensionMismatch, "subspaces must have equal dimension");
    const std::size_t d = x.ambient_dim();
    const ComplexMatrix px = projector(x).matrix();
    const ComplexMatrix py_perp = ComplexMatrix::identity(d) - projector(y).matrix();

    const RealVec via_eigen = eigenvalues(HermitianMatrix(px * py_perp * px)).values();
    const RealVec via_svd = apply_monotone_convex(singular_values(py_perp * px).values(), ConvexFn::square);
    const RealVec via_angles = zero_padded(principal_angles(x, y).sines_squared(), d);

    return both(equal_rearrangements(via_eigen, via_angles, tol), equal_rearrangements(via_svd, via_angles, tol));
}

}  // namespace ritz
