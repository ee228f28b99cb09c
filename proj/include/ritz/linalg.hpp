#pragma once

// Dense complex linear algebra: matrix storage, Hermitian eigendecomposition
// (cyclic Jacobi), SVD (one-sided Jacobi), orthonormalization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ritz/error.hpp"

namespace ritz {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;

/// Row-major dense complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        require(data_.size() == rows_ * cols_, ErrorCode::DimensionMismatch,
                "entry count " + std::to_string(data_.size()) + " != " + std::to_string(rows_) + "x" +
                    std::to_string(cols_));
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> diag) {
        ComplexMatrix m(diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<cplx> data;
        data.reserve(r * c);
        for (const auto& row : rows) {
            require(row.size() == c, ErrorCode::DimensionMismatch, "ragged row in from_rows");
            data.insert(data.end(), row.begin(), row.end());
        }
        return ComplexMatrix(r, c, std::move(data));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const cplx> entries() const noexcept { return data_; }

    bool is_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    /// Columns [first, first + count).
    ComplexMatrix columns(std::size_t first, std::size_t count) const {
        require(first + count <= cols_, ErrorCode::DimensionMismatch, "column range out of bounds");
        ComplexMatrix out(rows_, count);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
        return out;
    }

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline void require_finite(const ComplexMatrix& m, const char* what) {
    require(m.is_finite(), ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
            std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.cols() == b.rows(), ErrorCode::DimensionMismatch,
            "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const cplx ail = a(i, l);
            if (ail == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
        }
    return out;
}

inline ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "add");
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += b(i, j);
    return out;
}

inline ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b, "sub");
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
    return out;
}

inline ComplexMatrix scale(const ComplexMatrix& a, cplx factor) {
    ComplexMatrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) *= factor;
    return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }
inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) { return add(a, b); }
inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) { return sub(a, b); }
inline ComplexMatrix operator*(cplx factor, const ComplexMatrix& a) { return scale(a, factor); }

/// [a | b]
inline ComplexMatrix hcat(const ComplexMatrix& a, const ComplexMatrix& b) {
    require(a.rows() == b.rows(), ErrorCode::DimensionMismatch, "hcat: row counts differ");
    ComplexMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

inline double frobenius_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (const auto& z : a.entries()) sum += std::norm(z);
    return std::sqrt(sum);
}

inline double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const auto& z : a.entries()) m = std::max(m, std::abs(z));
    return m;
}

inline cplx trace(const ComplexMatrix& a) {
    cplx t{};
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
inline ComplexMatrix inverse(const ComplexMatrix& a) {
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "inverse of non-square matrix");
    require_finite(a, "inverse input");
    const std::size_t n = a.rows();
    ComplexMatrix work = a;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    const double scale_ref = std::max(max_abs(a), std::numeric_limits<double>::min());
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        if (std::abs(work(pivot, col)) <= 1e-300 * scale_ref || work(pivot, col) == cplx{})
            fail(ErrorCode::SingularT, "matrix is singular");
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        const cplx p = work(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const cplx f = work(r, col);
            if (f == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Self-adjoint matrix. Construction stores (M + M*)/2, so conjugate symmetry is exact.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const ComplexMatrix& m) : m_(m.rows(), m.cols()) {
        require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, "Hermitian matrix must be square");
        const std::size_t n = m.rows();
        for (std::size_t i = 0; i < n; ++i) {
            m_(i, i) = cplx(m(i, i).real(), 0.0);
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx h = 0.5 * (m(i, j) + std::conj(m(j, i)));
                m_(i, j) = h;
                m_(j, i) = std::conj(h);
            }
        }
    }

    static HermitianMatrix diagonal(std::span<const double> diag) {
        return HermitianMatrix(ComplexMatrix::diagonal(diag));
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    operator const ComplexMatrix&() const noexcept { return m_; }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

    bool operator==(const HermitianMatrix&) const = default;

private:
    ComplexMatrix m_;
};

/// re(C) = (C + C*)/2.
inline HermitianMatrix real_part(const ComplexMatrix& c) { return HermitianMatrix(c); }

enum class Order { non_increasing, non_decreasing };

/// Real vector sorted according to its order tag. Sorting is stable.
class OrderedSpectrum {
public:
    OrderedSpectrum() = default;

    static OrderedSpectrum descending(RealVec values) {
        std::stable_sort(values.begin(), values.end(), [](double a, double b) { return a > b; });
        return OrderedSpectrum(std::move(values), Order::non_increasing);
    }

    static OrderedSpectrum ascending(RealVec values) {
        std::stable_sort(values.begin(), values.end());
        return OrderedSpectrum(std::move(values), Order::non_decreasing);
    }

    const RealVec& values() const noexcept { return values_; }
    Order order() const noexcept { return order_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    OrderedSpectrum reversed() const {
        RealVec r(values_.rbegin(), values_.rend());
        return OrderedSpectrum(std::move(r),
                               order_ == Order::non_increasing ? Order::non_decreasing : Order::non_increasing);
    }

private:
    OrderedSpectrum(RealVec values, Order order) : values_(std::move(values)), order_(order) {}

    RealVec values_;
    Order order_ = Order::non_increasing;
};

struct EigenDecomposition {
    OrderedSpectrum eigenvalues;  // non-increasing
    ComplexMatrix eigenvectors;   // column i pairs with eigenvalues[i]
};

struct SingularDecomposition {
    OrderedSpectrum singular_values;  // non-increasing, min(rows, cols) entries
    ComplexMatrix left_vectors;
    ComplexMatrix right_vectors;
};

namespace detail {

inline constexpr int kMaxSweeps = 100;

/// Jacobi rotation G = [[c, s e^{iφ}], [-s e^{-iφ}, c]] chosen so that G* [[app, apq], [apq*, aqq]] G is diagonal.
struct Rotation {
    double c;
    double s;
    cplx phase;
};

inline Rotation jacobi_rotation(double app, double aqq, cplx apq) {
    const double mag = std::abs(apq);
    const double theta = (aqq - app) / (2.0 * mag);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    return {c, t * c, apq / mag};
}

/// M <- M G on columns p, q.
inline void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q, const Rotation& r) {
    const cplx sp = r.s * r.phase;
    const cplx sc = r.s * std::conj(r.phase);
    for (std::size_t k = 0; k < m.rows(); ++k) {
        const cplx mp = m(k, p);
        const cplx mq = m(k, q);
        m(k, p) = r.c * mp - sc * mq;
        m(k, q) = sp * mp + r.c * mq;
    }
}

/// M <- G* M on rows p, q.
inline void rotate_rows(ComplexMatrix& m, std::size_t p, std::size_t q, const Rotation& r) {
    const cplx sp = r.s * r.phase;
    const cplx sc = r.s * std::conj(r.phase);
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const cplx mp = m(p, k);
        const cplx mq = m(q, k);
        m(p, k) = r.c * mp - sp * mq;
        m(q, k) = sc * mp + r.c * mq;
    }
}

inline double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += std::norm(a(i, j));
    return std::sqrt(sum);
}

/// Indices that sort `values` non-increasingly; ties keep the lower index first.
inline std::vector<std::size_t> descending_permutation(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return idx;
}

inline double column_norm2(const ComplexMatrix& m, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::norm(m(i, j));
    return s;
}

inline cplx column_dot(const ComplexMatrix& a, std::size_t i, const ComplexMatrix& b, std::size_t j) {
    cplx s{};
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::conj(a(r, i)) * b(r, j);
    return s;
}

}  // namespace detail

/**
 * Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
 *
 * Sweeps until the off-diagonal Frobenius norm drops to 1e-14 * ||A||_F; more
 * than 100 sweeps raises NoConvergence. Eigenvalues come back non-increasing
 * with ties in original diagonal order.
 */
inline EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
    const std::size_t n = h.dim();
    require(n >= 1, ErrorCode::DimensionMismatch, "hermitian_eig needs dim >= 1");
    require_finite(h.matrix(), "hermitian_eig input");

    ComplexMatrix a = h.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double threshold = 1e-14 * frobenius_norm(a);

    int sweeps = 0;
    while (detail::off_diagonal_norm(a) > threshold) {
        if (sweeps++ >= detail::kMaxSweeps) fail(ErrorCode::NoConvergence, "Jacobi eigensolver exceeded sweep cap");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (apq == cplx{}) continue;
                const auto rot = detail::jacobi_rotation(a(p, p).real(), a(q, q).real(), apq);
                detail::rotate_columns(a, p, q, rot);
                detail::rotate_rows(a, p, q, rot);
                a(p, q) = a(q, p) = cplx{};
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                detail::rotate_columns(v, p, q, rot);
            }
    }

    RealVec diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
    const auto perm = detail::descending_permutation(diag);
    RealVec sorted(n);
    ComplexMatrix vectors(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted[j] = diag[perm[j]];
        for (std::size_t i = 0; i < n; ++i) vectors(i, j) = v(i, perm[j]);
    }
    return {OrderedSpectrum::descending(std::move(sorted)), std::move(vectors)};
}

/// Eigenvalues only, non-increasing.
inline OrderedSpectrum eigenvalues(const HermitianMatrix& h) { return hermitian_eig(h).eigenvalues; }

/**
 * Thin SVD by one-sided (Hestenes) Jacobi on the columns of B.
 *
 * Returns min(rows, cols) singular values, non-increasing. Left vectors of
 * (numerically) zero singular values are completed to an orthonormal set.
 */
inline SingularDecomposition svd(const ComplexMatrix& b) {
    require_finite(b, "svd input");
    if (b.rows() < b.cols()) {
        auto t = svd(adjoint(b));
        return {std::move(t.singular_values), std::move(t.right_vectors), std::move(t.left_vectors)};
    }
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    ComplexMatrix w = b;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double tol = std::max(1e-14, static_cast<double>(m) * std::numeric_limits<double>::epsilon());

    bool converged = n < 2;
    for (int sweep = 0; sweep < detail::kMaxSweeps && !converged; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double alpha = detail::column_norm2(w, i);
                const double beta = detail::column_norm2(w, j);
                const cplx gamma = detail::column_dot(w, i, w, j);
                const double mag = std::abs(gamma);
                if (mag == 0.0 || mag <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const auto rot = detail::jacobi_rotation(alpha, beta, gamma);
                detail::rotate_columns(w, i, j, rot);
                detail::rotate_columns(v, i, j, rot);
            }
        converged = !rotated;
    }
    if (!converged) fail(ErrorCode::NoConvergence, "one-sided Jacobi SVD exceeded sweep cap");

    RealVec sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(detail::column_norm2(w, j));
    const auto perm = detail::descending_permutation(sigma);

    ComplexMatrix u(m, n);
    ComplexMatrix vs(n, n);
    RealVec sorted(n);
    const double smax = n == 0 ? 0.0 : sigma[perm[0]];
    const double small = 1e-13 * smax;
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = perm[c];
        sorted[c] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) vs(i, c) = v(i, src);
        if (sigma[src] > small && sigma[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) u(i, c) = w(i, src) / sigma[src];
            continue;
        }
        // Orthonormal completion: start from the (noisy) direction if any, else canonical vectors.
        std::vector<cplx> seed(m);
        bool have = false;
        if (sigma[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) seed[i] = w(i, src) / sigma[src];
            have = true;
        }
        for (std::size_t attempt = 0; attempt <= m; ++attempt) {
            if (!have) {
                std::fill(seed.begin(), seed.end(), cplx{});
                seed[(attempt + c) % m] = 1.0;
            }
            have = false;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t k = 0; k < c; ++k) {
                    cplx dot{};
                    for (std::size_t i = 0; i < m; ++i) dot += std::conj(u(i, k)) * seed[i];
                    for (std::size_t i = 0; i < m; ++i) seed[i] -= dot * u(i, k);
                }
            double nrm = 0.0;
            for (const auto& z : seed) nrm += std::norm(z);
            nrm = std::sqrt(nrm);
            if (nrm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) u(i, c) = seed[i] / nrm;
                break;
            }
        }
    }
    return {OrderedSpectrum::descending(std::move(sorted)), std::move(u), std::move(vs)};
}

/// Singular values only, non-increasing.
inline OrderedSpectrum singular_values(const ComplexMatrix& b) { return svd(b).singular_values; }

/**
 * Orthonormal basis of the column space of M. Keeps left singular vectors whose
 * singular value exceeds rank_tol * s_max.
 */
inline ComplexMatrix orthonormalize(const ComplexMatrix& m, double rank_tol) {
    require_finite(m, "orthonormalize input");
    require(rank_tol > 0.0, ErrorCode::PreconditionViolated, "rank_tol must be positive");
    const auto dec = svd(m);
    const auto& s = dec.singular_values;
    const double smax = s.empty() ? 0.0 : s[0];
    std::size_t rank = 0;
    while (rank < s.size() && s[rank] > rank_tol * smax) ++rank;
    if (smax == 0.0 || rank == 0) fail(ErrorCode::ZeroMatrix, "numerical rank is zero");
    return dec.left_vectors.columns(0, rank);
}

/// Modified Gram-Schmidt with one reorthogonalization pass; requires full column rank.
inline ComplexMatrix gram_schmidt(const ComplexMatrix& m) {
    require_finite(m, "gram_schmidt input");
    ComplexMatrix q = m;
    for (std::size_t j = 0; j < q.cols(); ++j) {
        const double original = std::sqrt(detail::column_norm2(q, j));
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < j; ++k) {
                const cplx dot = detail::column_dot(q, k, q, j);
                for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) -= dot * q(i, k);
            }
        const double nrm = std::sqrt(detail::column_norm2(q, j));
        if (nrm <= 1e-12 * std::max(original, 1e-300)) fail(ErrorCode::ZeroMatrix, "columns are linearly dependent");
        for (std::size_t i = 0; i < q.rows(); ++i) q(i, j) /= nrm;
    }
    return q;
}

/// V diag(values) V*.
inline HermitianMatrix from_spectrum(const ComplexMatrix& v, std::span<const double> values) {
    require(v.cols() == values.size(), ErrorCode::DimensionMismatch, "from_spectrum: vector count mismatch");
    ComplexMatrix scaled = v;
    for (std::size_t i = 0; i < v.rows(); ++i)
        for (std::size_t j = 0; j < v.cols(); ++j) scaled(i, j) *= values[j];
    return HermitianMatrix(scaled * adjoint(v));
}

/// A - shift * I.
inline HermitianMatrix shifted(const HermitianMatrix& a, double shift) {
    return HermitianMatrix(a.matrix() - scale(ComplexMatrix::identity(a.dim()), shift));
}

/// Spectral norm (largest singular value).
inline double spectral_norm(const ComplexMatrix& a) {
    if (a.empty()) return 0.0;
    const auto s = singular_values(a);
    return s.empty() ? 0.0 : s[0];
}

}  // namespace ritz
