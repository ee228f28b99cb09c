#pragma once

// Rayleigh quotients, residuals, spectral spread, and every Ritz value
// perturbation bound as an executable check returning a BoundReport.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ritz/error.hpp"
#include "ritz/linalg.hpp"
#include "ritz/majorization.hpp"
#include "ritz/subspace.hpp"

namespace ritz {

/// Largest angle for which tan and 1/cos are evaluated.
inline constexpr double kMaxAngle = std::numbers::pi / 2 - 1e-8;
/// Relative residual (vs ||A||_F) under which a subspace counts as invariant.
inline constexpr double kInvarianceTol = 1e-9;
/// Absolute slack (scaled by max(1, ||A||_F)) for DKN interval checks.
inline constexpr double kSeparationTol = 1e-10;

enum class Relation { submajorization, norm_inequality_family };

struct BoundMetadata {
    std::size_t d = 0;
    std::size_t k = 0;
    std::size_t p = 0;  // dim(X + Y) when relevant
    double theta_max = 0.0;
    std::optional<double> delta;
    std::optional<double> delta_prime;
    std::optional<std::uint64_t> seed;
};

struct BoundReport {
    std::string theorem_id;
    RealVec lhs;
    RealVec rhs;
    MajorizationVerdict verdict;
    Relation relation = Relation::submajorization;
    bool must_hold = true;  // false for conjectured bounds, reported for comparison only
    BoundMetadata metadata;
    std::vector<std::string> flags;
    std::map<std::string, double> extras;
};

struct RayleighData {
    HermitianMatrix rho;                 // X* A X
    OrderedSpectrum ritz_values;         // lambda(rho), non-increasing
    ComplexMatrix residual;              // A X - X rho
    OrderedSpectrum residual_singulars;  // s(residual)
};

inline RayleighData rayleigh(const HermitianMatrix& a, const SubspaceBasis& x) {
    require(a.dim() == x.ambient_dim(), ErrorCode::DimensionMismatch, "rayleigh: dimension mismatch");
    const ComplexMatrix ax = a.matrix() * x.basis();
    HermitianMatrix rho(adjoint(x.basis()) * ax);
    auto ritz = eigenvalues(rho);
    ComplexMatrix residual = ax - x.basis() * rho.matrix();
    auto sing = singular_values(residual);
    return {std::move(rho), std::move(ritz), std::move(residual), std::move(sing)};
}

/// Spr(A, Z)_i = lambda_i(A_Z) - lambda_{p-i+1}(A_Z).
struct SpectralSpread {
    OrderedSpectrum values;

    /// First k (largest) entries.
    RealVec leading(std::size_t k) const {
        require(k <= values.size(), ErrorCode::DimensionMismatch, "spread has fewer entries than requested");
        return RealVec(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k));
    }
};

inline SpectralSpread spectral_spread(const HermitianMatrix& a, const SubspaceBasis& z) {
    const auto lam = eigenvalues(compress(a, z));
    const std::size_t p = lam.size();
    RealVec spr(p);
    for (std::size_t i = 0; i < p; ++i) spr[i] = lam[i] - lam[p - 1 - i];
    return {OrderedSpectrum::descending(std::move(spr))};
}

enum class Side { below, above };

/// Witness of the DKN separation property for (A, X, Y, delta).
struct DknCertificate {
    double a = 0.0;
    double b = 0.0;
    double delta = 0.0;
    std::vector<Side> sides;  // one per Ritz value of Y, non-increasing order
};

namespace detail {

inline double scale_of(const HermitianMatrix& a) { return std::max(1.0, frobenius_norm(a.matrix())); }

inline double bound_tolerance(const HermitianMatrix& a, std::span<const double> rhs) {
    double top = scale_of(a);
    for (double v : rhs) top = std::max(top, std::abs(v));
    return 1e-9 * top * static_cast<double>(std::max<std::size_t>(1, rhs.size()));
}

inline RealVec abs_entries(RealVec v) {
    for (auto& x : v) x = std::abs(x);
    return v;
}

inline RealVec desc(std::span<const double> v) { return sort_desc(v).values(); }

/// |lambda(C) - lambda(D)| entrywise on non-increasing lists, then re-sorted.
inline RealVec eigen_gap(const OrderedSpectrum& c, const OrderedSpectrum& d) {
    return desc(abs_entries(entrywise_sub(c.values(), d.values())));
}

inline void require_square_pair(const ComplexMatrix& c, const ComplexMatrix& d, const ComplexMatrix& t) {
    require(c.rows() == c.cols() && d.rows() == c.rows() && d.cols() == c.cols() && t.rows() == c.rows() &&
                t.cols() == c.cols(),
            ErrorCode::DimensionMismatch, "C, D, T must be square of equal size");
}

inline void require_angles_below_right(const PrincipalAngles& angles) {
    if (angles.largest() >= kMaxAngle)
        fail(ErrorCode::AnglesTooLarge, "largest principal angle " + std::to_string(angles.largest()) +
                                            " is not below pi/2 - 1e-8");
}

inline void require_invariant(const HermitianMatrix& a, const SubspaceBasis& x) {
    const double r = invariance_residual(a, x);
    if (r > kInvarianceTol * frobenius_norm(a.matrix()))
        fail(ErrorCode::NotInvariant, "residual of X is " + std::to_string(r));
}

inline BoundReport submajorization_report(std::string id, RealVec lhs, RealVec rhs, double tol) {
    BoundReport r;
    r.theorem_id = std::move(id);
    r.verdict = submajorized_by(lhs, rhs, tol);
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    return r;
}

/// Margins rhs_j - lhs_j over a list of norm values; holds iff all >= -tol.
inline MajorizationVerdict norm_family_verdict(std::span<const double> lhs, std::span<const double> rhs, double tol) {
    MajorizationVerdict v;
    v.tol = tol;
    v.prefix_margins = entrywise_sub(rhs, lhs);
    v.worst_index = argmin(v.prefix_margins);
    v.holds = v.prefix_margins.empty() || v.prefix_margins[v.worst_index] >= -tol;
    v.trace_gap = v.prefix_margins.empty() ? 0.0 : v.prefix_margins.back();
    return v;
}

/// Everything the mixed and a priori bounds share for one (A, X, Y).
struct PairData {
    std::size_t d;
    std::size_t k;
    std::size_t p;
    RayleighData rx;
    RayleighData ry;
    PrincipalAngles angles;
    SubspaceBasis sum;
    ComplexMatrix px;
    ComplexMatrix py;
    ComplexMatrix psum;
    RealVec ritz_gap;  // |lambda(rho X) - lambda(rho Y)|, non-increasing

    BoundMetadata metadata() const {
        BoundMetadata m;
        m.d = d;
        m.k = k;
        m.p = p;
        m.theta_max = angles.largest();
        return m;
    }
};

inline PairData pair_data(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    require_same_ambient(x, y);
    require(a.dim() == x.ambient_dim(), ErrorCode::DimensionMismatch, "A and subspaces differ in dimension");
    require(x.dim() == y.dim(), ErrorCode::DimensionMismatch, "X and Y must have equal dimension");
    auto rx = rayleigh(a, x);
    auto ry = rayleigh(a, y);
    auto angles = principal_angles(x, y);
    auto sum = subspace_sum(x, y);
    auto gap = eigen_gap(rx.ritz_values, ry.ritz_values);
    const std::size_t p = sum.dim();
    ComplexMatrix px = projector(x).matrix();
    ComplexMatrix py = projector(y).matrix();
    ComplexMatrix ps = projector(sum).matrix();
    return PairData{a.dim(), x.dim(), p, std::move(rx), std::move(ry), std::move(angles), std::move(sum),
                    std::move(px), std::move(py), std::move(ps), std::move(gap)};
}

inline RealVec svals(const ComplexMatrix& m) { return singular_values(m).values(); }

/// (lambda_i(A_Z) - lambda_min(A_Z))_{i < k}.
inline RealVec gaps_to_min(const HermitianMatrix& a, const SubspaceBasis& z, std::size_t k) {
    const auto lam = eigenvalues(compress(a, z));
    RealVec g(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = lam[i] - lam[lam.size() - 1];
    return g;
}

inline double compression_width(const HermitianMatrix& a, const SubspaceBasis& z) {
    const auto lam = eigenvalues(compress(a, z));
    return lam[0] - lam[lam.size() - 1];
}

/// Spr(A, X+Y)_{i<=k} * sin(Theta), flagging negative spread paired with a nonzero angle.
inline RealVec spread_times_sin(const HermitianMatrix& a, const PairData& pd, std::vector<std::string>& flags) {
    const RealVec spr = spectral_spread(a, pd.sum).leading(pd.k);
    const RealVec sines = pd.angles.sines();
    RealVec out = entrywise_mul(spr, sines);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < -1e-10) flags.push_back("negative_spread_with_nonzero_angle@" + std::to_string(i));
    return out;
}

inline RealVec inverse_cosines(const PrincipalAngles& angles) {
    const RealVec cosv = angles.cosines();
    return entrywise_div(RealVec(cosv.size(), 1.0), cosv);
}

}  // namespace detail

/**
 * |lambda(C) - lambda(D)| ≺_w s(T^-1) s(CT - TD) for Hermitian C, D and
 * invertible T (s_min(T) > 1e-12 s_max(T)).
 */
inline BoundReport eigenlist_distance_bound(const HermitianMatrix& c, const HermitianMatrix& d, const ComplexMatrix& t) {
    detail::require_square_pair(c.matrix(), d.matrix(), t);
    const auto st = singular_values(t);
    if (st.empty() || st[st.size() - 1] <= 1e-12 * st[0]) fail(ErrorCode::SingularT, "T is numerically singular");
    const RealVec inv_s = entrywise_div(RealVec(st.size(), 1.0), st.reversed().values());
    const RealVec rhs = entrywise_mul(inv_s, detail::svals(c.matrix() * t - t * d.matrix()));
    RealVec lhs = detail::eigen_gap(eigenvalues(c), eigenvalues(d));
    auto r = detail::submajorization_report("eigenlist_distance", std::move(lhs), rhs, detail::bound_tolerance(c, rhs));
    r.metadata.d = c.dim();
    r.metadata.k = c.dim();
    return r;
}

/// s(C - D) ≺_w s(T^-1) s(CT - TD) for positive definite T.
inline BoundReport positive_T_distance_bound(const HermitianMatrix& c, const HermitianMatrix& d,
                                             const HermitianMatrix& t) {
    detail::require_square_pair(c.matrix(), d.matrix(), t.matrix());
    const auto lt = eigenvalues(t);
    if (lt[lt.size() - 1] <= 0.0 || lt[lt.size() - 1] <= 1e-12 * lt[0])
        fail(ErrorCode::NotPositiveDefinite, "T is not positive definite");
    const RealVec inv_s = entrywise_div(RealVec(lt.size(), 1.0), lt.reversed().values());
    const RealVec rhs = entrywise_mul(inv_s, detail::svals(c.matrix() * t.matrix() - t.matrix() * d.matrix()));
    RealVec lhs = detail::svals(c.matrix() - d.matrix());
    auto r = detail::submajorization_report("positive_T_distance", std::move(lhs), rhs, detail::bound_tolerance(c, rhs));
    r.metadata.d = c.dim();
    r.metadata.k = c.dim();
    return r;
}

/// |Δλ| ≺_w (s(P_Y R_X) + s(P_X R_Y)) / cos Θ(X, Y).
inline BoundReport mixed_bound_cos(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_angles_below_right(pd.angles);
    const RealVec numer = entrywise_add(detail::svals(pd.py * pd.rx.residual), detail::svals(pd.px * pd.ry.residual));
    const RealVec rhs = entrywise_mul(numer, detail::inverse_cosines(pd.angles));
    auto r = detail::submajorization_report("mixed_cos", pd.ritz_gap, rhs, detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    return r;
}

/// |Δλ| ≺_w (s(P_{X+Y} R_X) + s(P_{X+Y} R_Y)) tan Θ(X, Y).
inline BoundReport mixed_bound_tan(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_angles_below_right(pd.angles);
    const RealVec numer =
        entrywise_add(detail::svals(pd.psum * pd.rx.residual), detail::svals(pd.psum * pd.ry.residual));
    const RealVec rhs = entrywise_mul(numer, pd.angles.tangents());
    auto r = detail::submajorization_report("mixed_tan", pd.ritz_gap, rhs, detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    return r;
}

/// Squared forms of the two mixed bounds (x -> x^2 is monotone convex on [0, inf)).
inline std::pair<BoundReport, BoundReport> squared_mixed_bounds(const HermitianMatrix& a, const SubspaceBasis& x,
                                                                const SubspaceBasis& y) {
    const auto square = [&](const BoundReport& base, const char* id) {
        RealVec lhs = apply_monotone_convex(base.lhs, ConvexFn::square);
        RealVec rhs = apply_monotone_convex(base.rhs, ConvexFn::square);
        const double tol = detail::bound_tolerance(a, rhs);
        auto r = detail::submajorization_report(id, std::move(lhs), std::move(rhs), tol);
        r.metadata = base.metadata;
        return r;
    };
    return {square(mixed_bound_cos(a, x, y), "mixed_cos_squared"), square(mixed_bound_tan(a, x, y), "mixed_tan_squared")};
}

/// s(P_X R_Y) ≺_w s(P_{X+Y} R_Y) sin Θ(X, Y).
inline BoundReport residual_projection_bound(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    RealVec lhs = detail::svals(pd.px * pd.ry.residual);
    const RealVec rhs = entrywise_mul(detail::svals(pd.psum * pd.ry.residual), pd.angles.sines());
    auto r = detail::submajorization_report("residual_projection", std::move(lhs), rhs, detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    return r;
}

/// s(P_X R_Y) ≺_w Spr(A, X+Y) sin Θ(X, Y), first k spread entries.
inline BoundReport apriori_spread_partial(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    std::vector<std::string> flags;
    const RealVec rhs = detail::spread_times_sin(a, pd, flags);
    RealVec lhs = detail::svals(pd.px * pd.ry.residual);
    auto r = detail::submajorization_report("spread_partial", std::move(lhs), rhs, detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    r.flags = std::move(flags);
    return r;
}

/// |Δλ| ≺_w 2 Spr(A, X+Y) sin Θ / cos Θ.
inline BoundReport apriori_mixed_theorem(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_angles_below_right(pd.angles);
    std::vector<std::string> flags;
    const RealVec rhs =
        scaled(entrywise_mul(detail::spread_times_sin(a, pd, flags), detail::inverse_cosines(pd.angles)), 2.0);
    auto r = detail::submajorization_report("apriori_mixed", pd.ritz_gap, rhs, detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    r.flags = std::move(flags);
    return r;
}

/// X invariant: s(P_X R_Y) ≺_w 2 (lambda_i(A_{X+Y}) - lambda_min(A_{X+Y}))_{i<=k} sin^2 Θ.
inline BoundReport sin_squared_residual_bound(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_invariant(a, x);
    const RealVec rhs = scaled(entrywise_mul(detail::gaps_to_min(a, pd.sum, pd.k), pd.angles.sines_squared()), 2.0);
    RealVec lhs = detail::svals(pd.px * pd.ry.residual);
    auto r = detail::submajorization_report("proposition_sin_squared", std::move(lhs), rhs,
                                            detail::bound_tolerance(a, rhs));
    r.metadata = pd.metadata();
    return r;
}

struct InvariantQuadraticReports {
    BoundReport proposition;  // residual bound
    BoundReport theorem;      // Ritz value bound
};

/// X invariant: the residual bound above and |Δλ| ≺_w 2 (λ_i - λ_min)_{i<=k} sin^2 Θ / cos Θ.
inline InvariantQuadraticReports apriori_invariant_quadratic(const HermitianMatrix& a, const SubspaceBasis& x,
                                                             const SubspaceBasis& y) {
    auto prop = sin_squared_residual_bound(a, x, y);
    auto pd = detail::pair_data(a, x, y);
    detail::require_angles_below_right(pd.angles);
    const RealVec rhs = scaled(entrywise_mul(entrywise_mul(detail::gaps_to_min(a, pd.sum, pd.k),
                                                           pd.angles.sines_squared()),
                                             detail::inverse_cosines(pd.angles)),
                               2.0);
    auto thm = detail::submajorization_report("apriori_invariant", pd.ritz_gap, rhs, detail::bound_tolerance(a, rhs));
    thm.metadata = pd.metadata();
    return {std::move(prop), std::move(thm)};
}

/**
 * Scalar-prefactor variants with 2 / cos Θ_1:
 *   corollary_constant            |Δλ| ≺_w (2/cos Θ_1) Spr sin Θ
 *   corollary_root8               |Δλ| ≺_w 2√2 Spr sin Θ             (only when Θ_1 <= pi/4)
 * and, when `invariant` is set (X must be A-invariant):
 *   corollary_constant_invariant  |Δλ| ≺_w (2/cos Θ_1) (λ_i - λ_min) sin^2 Θ
 *   corollary_root8_invariant     |Δλ| ≺_w 2√2 (λ_i - λ_min) sin^2 Θ (only when Θ_1 <= pi/4)
 */
inline std::vector<BoundReport> apriori_constant_corollary(const HermitianMatrix& a, const SubspaceBasis& x,
                                                           const SubspaceBasis& y, bool invariant) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_angles_below_right(pd.angles);
    if (invariant) detail::require_invariant(a, x);
    const double prefactor = 2.0 / std::cos(pd.angles.largest());
    const bool within_quarter = pd.angles.largest() <= std::numbers::pi / 4 + 1e-15;

    std::vector<std::string> flags;
    const RealVec spread_sin = detail::spread_times_sin(a, pd, flags);
    std::vector<BoundReport> out;
    const auto add = [&](const char* id, const RealVec& base, double factor) {
        RealVec rhs = scaled(base, factor);
        const double tol = detail::bound_tolerance(a, rhs);
        auto r = detail::submajorization_report(id, pd.ritz_gap, std::move(rhs), tol);
        r.metadata = pd.metadata();
        r.flags = flags;
        r.extras["prefactor"] = factor;
        out.push_back(std::move(r));
    };
    add("corollary_constant", spread_sin, prefactor);
    if (within_quarter) add("corollary_root8", spread_sin, 2.0 * std::numbers::sqrt2);
    if (invariant) {
        const RealVec gap_sin2 = entrywise_mul(detail::gaps_to_min(a, pd.sum, pd.k), pd.angles.sines_squared());
        add("corollary_constant_invariant", gap_sin2, prefactor);
        if (within_quarter) add("corollary_root8_invariant", gap_sin2, 2.0 * std::numbers::sqrt2);
    }
    return out;
}

/// Validity regime of the earlier a priori bounds.
enum class ReferenceRegime { general, invariant, top_k };

/**
 * Earlier a priori bounds used as comparison columns:
 *   reference_sin          |Δλ| ≺_w (λ_max - λ_min)(A_{X+Y}) sin Θ
 *   reference_sin_squared  |Δλ| ≺_w (λ_max - λ_min)(A_{X+Y}) sin^2 Θ       (X invariant)
 *   reference_top_k        0 <= λ(ρX) - λ(ρY) ≺_w (λ_i - λ_min)_{i<=k} sin^2 Θ (X the top-k invariant subspace)
 * plus the conjectured spread bounds, reported with must_hold = false.
 */
inline std::vector<BoundReport> fem_reference_bounds(const HermitianMatrix& a, const SubspaceBasis& x,
                                                     const SubspaceBasis& y, ReferenceRegime regime) {
    auto pd = detail::pair_data(a, x, y);
    const bool invariant = regime != ReferenceRegime::general;
    if (invariant) detail::require_invariant(a, x);
    if (regime == ReferenceRegime::top_k) {
        const auto lam = eigenvalues(a);
        const double tol = 1e-9 * detail::scale_of(a);
        for (std::size_t i = 0; i < pd.k; ++i)
            if (std::abs(lam[i] - pd.rx.ritz_values[i]) > tol)
                fail(ErrorCode::NotTopK, "X does not carry the k largest eigenvalues of A");
    }

    const double width = detail::compression_width(a, pd.sum);
    const RealVec sines = pd.angles.sines();
    const RealVec sines2 = pd.angles.sines_squared();
    std::vector<std::string> flags;
    const RealVec spread_sin = detail::spread_times_sin(a, pd, flags);

    std::vector<BoundReport> out;
    const auto add = [&](const char* id, RealVec lhs, RealVec rhs, bool must_hold) {
        const double tol = detail::bound_tolerance(a, rhs);
        auto r = detail::submajorization_report(id, std::move(lhs), std::move(rhs), tol);
        r.metadata = pd.metadata();
        r.must_hold = must_hold;
        out.push_back(std::move(r));
        return &out.back();
    };
    add("reference_sin", pd.ritz_gap, scaled(sines, width), true);
    add("conjecture_spread_sin", pd.ritz_gap, spread_sin, false)->flags = flags;
    if (invariant) {
        add("reference_sin_squared", pd.ritz_gap, scaled(sines2, width), true);
        add("conjecture_spread_sin_squared", pd.ritz_gap, entrywise_mul(spread_sin, sines), false)->flags = flags;
    }
    if (regime == ReferenceRegime::top_k) {
        RealVec signed_gap = entrywise_sub(pd.rx.ritz_values.values(), pd.ry.ritz_values.values());
        const RealVec rhs = entrywise_mul(detail::gaps_to_min(a, pd.sum, pd.k), sines2);
        auto* r = add("reference_top_k", signed_gap, rhs, true);
        const double tol = r->verdict.tol;
        for (std::size_t i = 0; i < signed_gap.size(); ++i)
            if (signed_gap[i] < -tol) {
                r->verdict.holds = false;
                r->flags.push_back("negative_ritz_gap@" + std::to_string(i));
            }
    }
    return out;
}

/**
 * DKN certificate for (A, X, Y) with X invariant: [a, b] is the exact range of
 * lambda(X_⊥* A X_⊥) and delta the distance from the Ritz values of Y to it.
 * Returns nullopt when delta <= 1e-10 * max(1, ||A||_F) (no separation).
 */
inline std::optional<DknCertificate> dkn_certificate(const HermitianMatrix& a, const SubspaceBasis& x,
                                                     const SubspaceBasis& y) {
    require_same_ambient(x, y);
    require(a.dim() == x.ambient_dim(), ErrorCode::DimensionMismatch, "A and subspaces differ in dimension");
    require(x.dim() == y.dim(), ErrorCode::DimensionMismatch, "X and Y must have equal dimension");
    require(x.dim() < x.ambient_dim(), ErrorCode::FullSpace, "DKN separation needs dim X < d");
    detail::require_invariant(a, x);

    const auto block = eigenvalues(compress(a, orthocomplement(x)));
    DknCertificate cert;
    cert.b = block[0];
    cert.a = block[block.size() - 1];
    cert.delta = std::numeric_limits<double>::infinity();
    for (double mu : rayleigh(a, y).ritz_values) {
        double dist = 0.0;
        if (mu < cert.a) {
            dist = cert.a - mu;
            cert.sides.push_back(Side::below);
        } else if (mu > cert.b) {
            dist = mu - cert.b;
            cert.sides.push_back(Side::above);
        } else {
            return std::nullopt;
        }
        cert.delta = std::min(cert.delta, dist);
    }
    if (cert.delta <= kSeparationTol * detail::scale_of(a)) return std::nullopt;
    return cert;
}

/// Re-checks both DKN conditions for a supplied certificate.
inline bool certificate_valid(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y,
                              const DknCertificate& cert) {
    if (!(cert.delta > 0.0) || cert.a > cert.b || !is_invariant(a, x, kInvarianceTol) || x.dim() >= x.ambient_dim())
        return false;
    const double tol = kSeparationTol * detail::scale_of(a);
    for (double l : eigenvalues(compress(a, orthocomplement(x))))
        if (l < cert.a - tol || l > cert.b + tol) return false;
    for (double mu : rayleigh(a, y).ritz_values)
        if (!(mu <= cert.a - cert.delta + tol || mu >= cert.b + cert.delta - tol)) return false;
    return true;
}

/// Certificate of the compressed problem (S*AS, S*X, S*Y), S an ONB of X + Y.
inline std::optional<DknCertificate> compressed_certificate(const HermitianMatrix& a, const SubspaceBasis& x,
                                                            const SubspaceBasis& y) {
    const auto s = subspace_sum(x, y);
    if (s.dim() == x.dim()) return std::nullopt;
    return dkn_certificate(compress(a, s), coordinates_in(s, x), coordinates_in(s, y));
}

/// delta tan Θ ≺_w s(R_Y) under a valid ambient certificate.
inline BoundReport tan_theta_classical(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y,
                                       const DknCertificate& cert) {
    if (!certificate_valid(a, x, y, cert)) fail(ErrorCode::InvalidCertificate, "DKN conditions do not hold");
    auto pd = detail::pair_data(a, x, y);
    std::vector<std::string> flags;
    RealVec lhs;
    if (pd.angles.largest() >= kMaxAngle) {
        flags.push_back("largest_angle_not_below_right_angle");
        lhs.assign(pd.k, std::numeric_limits<double>::max());
    } else {
        lhs = scaled(pd.angles.tangents(), cert.delta);
    }
    RealVec rhs = pd.ry.residual_singulars.values();
    const double tol = detail::bound_tolerance(a, rhs);
    auto r = detail::submajorization_report("tan_classical", std::move(lhs), rhs, tol);
    if (!flags.empty()) r.verdict.holds = false;
    r.metadata = pd.metadata();
    r.metadata.delta = cert.delta;
    r.flags = std::move(flags);
    r.extras["ratio"] = rhs.empty() ? 0.0 : rhs[0] / cert.delta;
    return r;
}

struct ImprovedTanReports {
    BoundReport improved;                 // delta' tan Θ ≺_w s(P_{X+Y} R_Y)
    std::optional<BoundReport> corollary; // delta tan Θ ≺_w s(P_{X+Y} R_Y), when the ambient certificate exists
    std::optional<double> delta;
    double delta_prime = 0.0;
    bool delta_monotone = true;           // delta' >= delta - 1e-10
};

/**
 * tan Θ bound on the compression to X + Y. delta' is the separation of
 * (S*AS, S*X, S*Y); NoSeparation when that compressed problem has none.
 */
inline ImprovedTanReports tan_theta_improved(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_invariant(a, x);
    const auto compressed = compressed_certificate(a, x, y);
    if (!compressed) fail(ErrorCode::NoSeparation, "compressed problem has no DKN separation");
    const auto ambient = pd.k < pd.d ? dkn_certificate(a, x, y) : std::nullopt;

    ImprovedTanReports out;
    out.delta_prime = compressed->delta;
    if (ambient) out.delta = ambient->delta;
    out.delta_monotone = !ambient || compressed->delta >= ambient->delta - 1e-10;

    detail::require_angles_below_right(pd.angles);
    const RealVec tangents = pd.angles.tangents();
    const RealVec rhs = detail::svals(pd.psum * pd.ry.residual);
    const double tol = detail::bound_tolerance(a, rhs);

    out.improved = detail::submajorization_report("tan_improved", scaled(tangents, compressed->delta), rhs, tol);
    out.improved.metadata = pd.metadata();
    out.improved.metadata.delta = out.delta;
    out.improved.metadata.delta_prime = out.delta_prime;
    out.improved.extras["ratio"] = rhs.empty() ? 0.0 : rhs[0] / compressed->delta;
    if (ambient) out.improved.extras["classical_ratio"] = pd.ry.residual_singulars[0] / ambient->delta;
    if (!out.delta_monotone) {
        out.improved.flags.push_back("delta_prime_below_delta");
        out.improved.verdict.holds = false;
    }

    if (ambient) {
        auto cor = detail::submajorization_report("tan_corollary", scaled(tangents, ambient->delta), rhs, tol);
        cor.metadata = out.improved.metadata;
        out.corollary = std::move(cor);
    }
    return out;
}

/**
 * ||Δλ|| <= ||P_{X+Y} R_Y||^2 / delta_used for Ky Fan k-norms (all k) and
 * Schatten 1, 2, inf. delta_used must not exceed the best compressed
 * separation constant.
 */
inline BoundReport quadratic_aposteriori(const HermitianMatrix& a, const SubspaceBasis& x, const SubspaceBasis& y,
                                         double delta_used) {
    auto pd = detail::pair_data(a, x, y);
    detail::require_invariant(a, x);
    const auto compressed = compressed_certificate(a, x, y);
    const auto ambient = pd.k < pd.d ? dkn_certificate(a, x, y) : std::nullopt;
    const double best = std::max(compressed ? compressed->delta : 0.0, ambient ? ambient->delta : 0.0);
    const double slack = kSeparationTol * detail::scale_of(a);
    if (!(delta_used > 0.0) || best <= 0.0 || delta_used > best + slack)
        fail(ErrorCode::InvalidCertificate, "delta " + std::to_string(delta_used) +
                                                " is not a DKN separation constant (best " + std::to_string(best) + ")");

    const NormTable lhs_norms = uin_norms(pd.ritz_gap);
    const NormTable res_norms = uin_norms(singular_values(pd.psum * pd.ry.residual));
    RealVec lhs = lhs_norms.flattened();
    RealVec rhs = res_norms.flattened();
    for (auto& v : rhs) v = v * v / delta_used;

    BoundReport r;
    r.theorem_id = "quadratic_aposteriori";
    r.relation = Relation::norm_inequality_family;
    r.verdict = detail::norm_family_verdict(lhs, rhs, detail::bound_tolerance(a, rhs));
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    r.metadata = pd.metadata();
    if (ambient) r.metadata.delta = ambient->delta;
    if (compressed) r.metadata.delta_prime = compressed->delta;
    r.extras["delta_used"] = delta_used;
    return r;
}

/**
 * Consecutive-eigenvalue bound from a single subspace Y.
 *
 * j is the largest index with lambda_j(A) > lambda_1(Y*AY), i.e. lambda_j is
 * the smallest eigenvalue above the top Ritz value. Requires
 * eta = lambda_j - lambda_1(Y*AY) > 1e-10 and lambda_i(Y*AY) >= lambda_{i+j}(A).
 * With U the top-j eigenspace and X = (I - P_U) Y, checks
 * ||(lambda_{i+j}(A))_i - lambda(Y*AY)|| <= ||P_{X+Y} R_Y||^2 / eta
 * over the norm family.
 */
inline BoundReport consecutive_eigenvalue_bound(const HermitianMatrix& a, const SubspaceBasis& y) {
    require(a.dim() == y.ambient_dim(), ErrorCode::DimensionMismatch, "A and Y differ in dimension");
    const std::size_t d = a.dim();
    const std::size_t k = y.dim();
    require(k < d, ErrorCode::FullSpace, "Y must be a proper subspace");

    const auto lam = eigenvalues(a);
    const auto ry = rayleigh(a, y);
    const auto& mu = ry.ritz_values;

    std::size_t j = 0;  // 1-based
    for (std::size_t i = 0; i < d; ++i)
        if (lam[i] > mu[0]) j = i + 1;
    if (j == 0 || j > d - k) fail(ErrorCode::HypothesisFailed, "condition 1: no eigenvalue above the top Ritz value");
    const double eta = lam[j - 1] - mu[0];
    if (!(eta > 1e-10)) fail(ErrorCode::HypothesisFailed, "condition 1: eta = " + std::to_string(eta));
    const double cond_tol = 1e-12 * detail::scale_of(a);
    for (std::size_t i = 0; i < k; ++i)
        if (mu[i] < lam[i + j] - cond_tol)
            fail(ErrorCode::HypothesisFailed, "condition 2 fails at Ritz value " + std::to_string(i));

    std::vector<std::size_t> top(j);
    std::iota(top.begin(), top.end(), std::size_t{0});
    const auto u = invariant_subspace(a, top);
    const double min_angle = principal_angles(u, y).angles.back();
    if (min_angle <= kAngleTol) fail(ErrorCode::HypothesisFailed, "U and Y intersect (smallest angle below 1e-8)");
    const ComplexMatrix deflated = y.basis() - projector(u).matrix() * y.basis();
    const SubspaceBasis x(orthonormalize(deflated, kSumRankTol));
    if (x.dim() != k) fail(ErrorCode::HypothesisFailed, "(I - P_U) Y lost rank");
    const auto s = subspace_sum(x, y);
    const ComplexMatrix proj_res = projector(s).matrix() * ry.residual;

    RealVec target(k);
    for (std::size_t i = 0; i < k; ++i) target[i] = lam[i + j];
    const RealVec diff = detail::desc(detail::abs_entries(entrywise_sub(target, mu.values())));
    const NormTable res = uin_norms(singular_values(proj_res));
    RealVec lhs = uin_norms(diff).flattened();
    RealVec rhs = res.flattened();
    for (auto& v : rhs) v = v * v / eta;

    BoundReport r;
    r.theorem_id = "consecutive_eigenvalues";
    r.relation = Relation::norm_inequality_family;
    r.verdict = detail::norm_family_verdict(lhs, rhs, detail::bound_tolerance(a, rhs));
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    r.metadata.d = d;
    r.metadata.k = k;
    r.metadata.p = s.dim();
    r.metadata.theta_max = principal_angles(x, y).largest();
    r.metadata.delta = eta;
    r.extras["j"] = static_cast<double>(j);
    r.extras["eta"] = eta;
    r.extras["min_angle_U_Y"] = min_angle;
    if (min_angle <= 1e-6) r.flags.push_back("U_Y_nearly_intersect");
    if (k == 1) {
        r.extras["scalar_lhs"] = mu[0] - lam[j];
        r.extras["scalar_rhs"] = res.schatten_inf * res.schatten_inf / eta;
    }
    return r;
}

}  // namespace ritz
