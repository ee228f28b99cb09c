#pragma once

// Vector (sub)majorization with per-prefix margins, entrywise vector
// arithmetic, and unitarily invariant norm tables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ritz/error.hpp"
#include "ritz/linalg.hpp"

namespace ritz {

/**
 * Outcome of comparing x against y.
 *
 * prefix_margins[j] = sum_{i<=j} y_desc[i] - sum_{i<=j} x_desc[i]. A relation
 * holds when every margin is >= -tol; margins are filled in either way.
 */
struct MajorizationVerdict {
    bool holds = true;
    RealVec prefix_margins;
    std::size_t worst_index = 0;
    double trace_gap = 0.0;  // sum(y) - sum(x)
    double tol = 0.0;

    double worst_margin() const {
        return prefix_margins.empty() ? 0.0 : prefix_margins[worst_index];
    }
};

namespace detail {

inline void require_finite_vec(std::span<const double> x, const char* what) {
    for (double v : x)
        if (!std::isfinite(v)) fail(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
}

inline void require_same_length(std::span<const double> x, std::span<const double> y, const char* op) {
    require(x.size() == y.size(), ErrorCode::DimensionMismatch,
            std::string(op) + ": lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
}

inline std::size_t argmin(const RealVec& v) {
    return v.empty() ? 0 : static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

inline OrderedSpectrum sort_desc(std::span<const double> x) {
    detail::require_finite_vec(x, "sort_desc input");
    return OrderedSpectrum::descending(RealVec(x.begin(), x.end()));
}

inline OrderedSpectrum sort_asc(std::span<const double> x) {
    detail::require_finite_vec(x, "sort_asc input");
    return OrderedSpectrum::ascending(RealVec(x.begin(), x.end()));
}

/// x is submajorized by y (x ≺_w y), with slack tol on every prefix sum.
inline MajorizationVerdict submajorized_by(std::span<const double> x, std::span<const double> y, double tol) {
    detail::require_same_length(x, y, "submajorized_by");
    require(tol >= 0.0, ErrorCode::PreconditionViolated, "tol must be non-negative");
    const auto xs = sort_desc(x);
    const auto ys = sort_desc(y);
    MajorizationVerdict v;
    v.tol = tol;
    v.prefix_margins.resize(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sx += xs[j];
        sy += ys[j];
        v.prefix_margins[j] = sy - sx;
    }
    v.trace_gap = sy - sx;
    v.worst_index = detail::argmin(v.prefix_margins);
    v.holds = v.prefix_margins.empty() || v.prefix_margins[v.worst_index] >= -tol;
    return v;
}

/// x is majorized by y (x ≺ y): submajorization plus |sum(y) - sum(x)| <= tol.
inline MajorizationVerdict majorized_by(std::span<const double> x, std::span<const double> y, double tol) {
    auto v = submajorized_by(x, y, tol);
    v.holds = v.holds && std::abs(v.trace_gap) <= tol;
    return v;
}

/**
 * Equality of decreasing rearrangements up to tol on every prefix sum, i.e.
 * x ≺_w y and y ≺_w x. Margins are -|prefix difference|.
 */
inline MajorizationVerdict equal_rearrangements(std::span<const double> x, std::span<const double> y, double tol) {
    auto v = submajorized_by(x, y, tol);
    for (auto& m : v.prefix_margins) m = -std::abs(m);
    v.worst_index = detail::argmin(v.prefix_margins);
    v.holds = v.prefix_margins.empty() || v.prefix_margins[v.worst_index] >= -tol;
    return v;
}

/// Both verdicts must hold; margins combine entrywise by minimum.
inline MajorizationVerdict both(const MajorizationVerdict& a, const MajorizationVerdict& b) {
    require(a.prefix_margins.size() == b.prefix_margins.size(), ErrorCode::DimensionMismatch,
            "combining verdicts of different length");
    MajorizationVerdict v = a;
    for (std::size_t j = 0; j < v.prefix_margins.size(); ++j)
        v.prefix_margins[j] = std::min(a.prefix_margins[j], b.prefix_margins[j]);
    v.worst_index = detail::argmin(v.prefix_margins);
    v.holds = a.holds && b.holds;
    v.trace_gap = std::abs(a.trace_gap) >= std::abs(b.trace_gap) ? a.trace_gap : b.trace_gap;
    v.tol = std::max(a.tol, b.tol);
    return v;
}

/// (x_i y_i)_i in the given entry order.
inline RealVec entrywise_mul(std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x, y, "entrywise_mul");
    RealVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
    return out;
}

/// (x_i / y_i)_i; |y_i| <= 1e-300 raises DivisionByZero carrying i.
inline RealVec entrywise_div(std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x, y, "entrywise_div");
    RealVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(y[i]) <= 1e-300) fail(ErrorCode::DivisionByZero, "divisor entry " + std::to_string(i) + " is zero", i);
        out[i] = x[i] / y[i];
    }
    return out;
}

inline RealVec entrywise_add(std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x, y, "entrywise_add");
    RealVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

inline RealVec entrywise_sub(std::span<const double> x, std::span<const double> y) {
    detail::require_same_length(x, y, "entrywise_sub");
    RealVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

inline RealVec scaled(std::span<const double> x, double factor) {
    RealVec out(x.begin(), x.end());
    for (auto& v : out) v *= factor;
    return out;
}

/// (x, 0, ..., 0) of length n >= x.size().
inline RealVec zero_padded(std::span<const double> x, std::size_t n) {
    require(n >= x.size(), ErrorCode::DimensionMismatch, "cannot pad to a shorter length");
    RealVec out(x.begin(), x.end());
    out.resize(n, 0.0);
    return out;
}

enum class ConvexFn { square };

/// Entrywise monotone convex map; preserves ≺_w between non-negative vectors.
inline RealVec apply_monotone_convex(std::span<const double> x, ConvexFn fn) {
    detail::require_finite_vec(x, "apply_monotone_convex input");
    RealVec out(x.size());
    switch (fn) {
        case ConvexFn::square:
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] < 0.0)
                    fail(ErrorCode::NegativeInput, "square is monotone only on [0, inf); entry " + std::to_string(i));
                out[i] = x[i] * x[i];
            }
            break;
    }
    return out;
}

/// Ky Fan k-norms for every k plus Schatten 1, 2, inf of a singular value list.
struct NormTable {
    RealVec ky_fan;
    double schatten_1 = 0.0;
    double schatten_2 = 0.0;
    double schatten_inf = 0.0;

    /// Flattened: ky_fan_1..ky_fan_k, schatten_1, schatten_2, schatten_inf.
    RealVec flattened() const {
        RealVec out = ky_fan;
        out.push_back(schatten_1);
        out.push_back(schatten_2);
        out.push_back(schatten_inf);
        return out;
    }
};

inline NormTable uin_norms(const OrderedSpectrum& s) {
    require(s.order() == Order::non_increasing, ErrorCode::PreconditionViolated,
            "uin_norms expects a non-increasing spectrum");
    NormTable t;
    t.ky_fan.reserve(s.size());
    double running = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0.0) fail(ErrorCode::NegativeSingularValue, "singular value " + std::to_string(i) + " is negative");
        running += s[i];
        sq += s[i] * s[i];
        t.ky_fan.push_back(running);
    }
    t.schatten_1 = running;
    t.schatten_2 = std::sqrt(sq);
    t.schatten_inf = s.empty() ? 0.0 : s[0];
    return t;
}

/// Norm table of a non-negative vector taken as the diagonal of a matrix.
inline NormTable uin_norms(std::span<const double> x) {
    RealVec a(x.begin(), x.end());
    for (auto& v : a) v = std::abs(v);
    return uin_norms(OrderedSpectrum::descending(std::move(a)));
}

/// Ky Fan comparison: every k-norm of x is at most that of y (within tol).
inline bool ky_fan_dominated(std::span<const double> x, std::span<const double> y, double tol) {
    detail::require_same_length(x, y, "ky_fan_dominated");
    const auto nx = uin_norms(sort_desc(x));
    const auto ny = uin_norms(sort_desc(y));
    for (std::size_t j = 0; j < nx.ky_fan.size(); ++j)
        if (ny.ky_fan[j] - nx.ky_fan[j] < -tol) return false;
    return true;
}

namespace detail {

inline bool is_non_increasing(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

inline bool is_non_negative(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return a >= 0.0; });
}

}  // namespace detail

/**
 * Elementary submajorization facts, by item:
 *  1. x↓ + y↑ ≺ x + y ≺ x↓ + y↓
 *  2. x ≺_w y, y and z non-increasing  =>  x + z ≺_w y + z
 *  3. (non-negative) x↓ y↑ ≺_w x y ≺_w x↓ y↓
 *  4. (non-negative) x ≺_w y, y and z non-increasing  =>  x z ≺_w y z
 * Unmet hypotheses raise PreconditionViolated.
 */
inline MajorizationVerdict lemma_props_oracle(std::span<const double> x, std::span<const double> y,
                                              std::span<const double> z, int item, double tol) {
    detail::require_same_length(x, y, "lemma_props_oracle");
    const auto bad = [item](const std::string& why) {
        fail(ErrorCode::PreconditionViolated, "item " + std::to_string(item) + ": " + why);
    };
    const RealVec xd = sort_desc(x).values();
    const RealVec yd = sort_desc(y).values();
    const RealVec ya = sort_asc(y).values();
    switch (item) {
        case 1: {
            const auto sum = entrywise_add(x, y);
            return both(majorized_by(entrywise_add(xd, ya), sum, tol),
                        majorized_by(sum, entrywise_add(xd, yd), tol));
        }
        case 2: {
            detail::require_same_length(y, z, "lemma_props_oracle");
            if (!detail::is_non_increasing(y) || !detail::is_non_increasing(z)) bad("y and z must be non-increasing");
            if (!submajorized_by(x, y, tol).holds) bad("x is not submajorized by y");
            return submajorized_by(entrywise_add(x, z), entrywise_add(y, z), tol);
        }
        case 3: {
            if (!detail::is_non_negative(x) || !detail::is_non_negative(y)) bad("entries must be non-negative");
            const auto prod = entrywise_mul(x, y);
            return both(submajorized_by(entrywise_mul(xd, ya), prod, tol),
                        submajorized_by(prod, entrywise_mul(xd, yd), tol));
        }
        case 4: {
            detail::require_same_length(y, z, "lemma_props_oracle");
            if (!detail::is_non_negative(x) || !detail::is_non_negative(y) || !detail::is_non_negative(z))
                bad("entries must be non-negative");
            if (!detail::is_non_increasing(y) || !detail::is_non_increasing(z)) bad("y and z must be non-increasing");
            if (!submajorized_by(x, y, tol).holds) bad("x is not submajorized by y");
            return submajorized_by(entrywise_mul(x, z), entrywise_mul(y, z), tol);
        }
        default:
            bad("unknown item");
    }
    return {};
}

}  // namespace ritz
