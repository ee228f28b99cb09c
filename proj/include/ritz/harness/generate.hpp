#pragma once

// Seeded instance generation: (A, X, Y) from an InstanceSpec.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ritz/error.hpp"
#include "ritz/harness/rng.hpp"
#include "ritz/linalg.hpp"
#include "ritz/subspace.hpp"

namespace ritz::harness {

enum class SpectrumKind { explicit_values, uniform, clustered, paper_exa1, paper_exa2 };
enum class SubspaceMode { random_pair, invariant_plus_perturbation, paper_fixed, orthogonal_pair };
/// Which eigenvectors span X in invariant_plus_perturbation.
enum class EigenSelection { top, bottom, random };

struct SpectrumSpec {
    SpectrumKind kind = SpectrumKind::uniform;
    RealVec values;                              // explicit_values
    double lo = 0.0;                             // uniform
    double hi = 1.0;
    double gap = 1.0;                            // clustered
    std::array<double, 4> params{0, 1, 2, 3};    // worked examples: diagonal entries as placed in A
    double theta = 0.0;                          // worked examples
};

struct InstanceSpec {
    std::size_t d = 4;
    std::size_t k = 1;
    SpectrumSpec spectrum;
    SubspaceMode mode = SubspaceMode::random_pair;
    double epsilon = 0.0;
    EigenSelection selection = EigenSelection::top;
    std::uint64_t seed = 0;
};

struct Instance {
    HermitianMatrix a;
    SubspaceBasis x;
    SubspaceBasis y;
};

inline std::string to_string(SpectrumKind k) {
    switch (k) {
        case SpectrumKind::explicit_values: return "explicit";
        case SpectrumKind::uniform: return "uniform";
        case SpectrumKind::clustered: return "clustered";
        case SpectrumKind::paper_exa1: return "exa1";
        case SpectrumKind::paper_exa2: return "exa2";
    }
    return "unknown";
}

inline std::string to_string(SubspaceMode m) {
    switch (m) {
        case SubspaceMode::random_pair: return "random";
        case SubspaceMode::invariant_plus_perturbation: return "perturbed";
        case SubspaceMode::paper_fixed: return "example";
        case SubspaceMode::orthogonal_pair: return "orthogonal";
    }
    return "unknown";
}

inline std::string to_string(EigenSelection s) {
    switch (s) {
        case EigenSelection::top: return "top";
        case EigenSelection::bottom: return "bottom";
        case EigenSelection::random: return "random";
    }
    return "unknown";
}

inline bool is_example(SpectrumKind k) { return k == SpectrumKind::paper_exa1 || k == SpectrumKind::paper_exa2; }

inline void validate(const InstanceSpec& spec) {
    const auto bad = [](const std::string& msg) { fail(ErrorCode::SpecInvalid, msg); };
    const bool example_spectrum = is_example(spec.spectrum.kind);
    if ((spec.mode == SubspaceMode::paper_fixed) != example_spectrum)
        bad("example spectra and the fixed example subspaces go together");
    if (example_spectrum) {
        if (spec.d != 4 || spec.k != 2) bad("examples are defined for d = 4, k = 2");
        const double t = spec.spectrum.theta;
        if (!(t >= 0.0 && t < std::numbers::pi / 2)) bad("example angle must lie in [0, pi/2)");
        for (double v : spec.spectrum.params)
            if (!std::isfinite(v)) bad("example parameters must be finite");
        return;
    }
    if (spec.d < 2) bad("d must be at least 2");
    if (spec.k < 1 || 2 * spec.k > spec.d) bad("random modes need 1 <= k <= d/2");
    switch (spec.spectrum.kind) {
        case SpectrumKind::explicit_values:
            if (spec.spectrum.values.size() != spec.d) bad("explicit spectrum must have d entries");
            for (double v : spec.spectrum.values)
                if (!std::isfinite(v)) bad("explicit spectrum must be finite");
            break;
        case SpectrumKind::uniform:
            if (!(spec.spectrum.lo < spec.spectrum.hi)) bad("uniform spectrum needs lo < hi");
            break;
        case SpectrumKind::clustered:
            if (!(spec.spectrum.gap >= 0.0) || !std::isfinite(spec.spectrum.gap)) bad("cluster gap must be >= 0");
            break;
        default: break;
    }
    if (!(spec.epsilon >= 0.0) || !std::isfinite(spec.epsilon)) bad("epsilon must be finite and >= 0");
}

/// d x n matrix of independent standard complex Gaussians (real and imaginary parts N(0, 1/2)).
inline ComplexMatrix complex_gaussian(std::size_t d, std::size_t n, Rng& rng) {
    ComplexMatrix g(d, n);
    const double s = std::sqrt(0.5);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            g(i, j) = {s * re, s * im};
        }
    return g;
}

inline ComplexMatrix random_unitary(std::size_t d, Rng& rng) { return gram_schmidt(complex_gaussian(d, d, rng)); }

inline RealVec draw_spectrum(const InstanceSpec& spec, Rng& rng) {
    const auto& s = spec.spectrum;
    RealVec v(spec.d);
    switch (s.kind) {
        case SpectrumKind::explicit_values: return s.values;
        case SpectrumKind::uniform:
            for (auto& x : v) x = rng.uniform(s.lo, s.hi);
            return v;
        case SpectrumKind::clustered:
            for (std::size_t i = 0; i < spec.d - spec.k; ++i) v[i] = rng.uniform(0.0, 1.0);
            for (std::size_t i = spec.d - spec.k; i < spec.d; ++i) v[i] = rng.uniform(1.0 + s.gap, 2.0 + s.gap);
            return v;
        default: return RealVec(s.params.begin(), s.params.end());
    }
}

/// Positions in `values` of the k eigenvalues chosen by `sel`.
inline std::vector<std::size_t> select_eigen(const RealVec& values, std::size_t k, EigenSelection sel, Rng& rng) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    switch (sel) {
        case EigenSelection::top:
            std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] > values[b]; });
            break;
        case EigenSelection::bottom:
            std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
            break;
        case EigenSelection::random:
            for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.integer(0, i)]);
            break;
    }
    idx.resize(k);
    return idx;
}

/// The displayed example: A diagonal, X = span{e1, e2}, Y = span{e1, cos t e2 + sin t e3}.
inline Instance example_instance(const std::array<double, 4>& diag, double theta) {
    ComplexMatrix x(4, 2);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;
    ComplexMatrix y(4, 2);
    y(0, 0) = 1.0;
    y(1, 1) = std::cos(theta);
    y(2, 1) = std::sin(theta);
    return {HermitianMatrix::diagonal(diag), SubspaceBasis(std::move(x)), SubspaceBasis(std::move(y))};
}

/// Deterministic in spec (including seed).
inline Instance generate(const InstanceSpec& spec) {
    validate(spec);
    if (is_example(spec.spectrum.kind)) return example_instance(spec.spectrum.params, spec.spectrum.theta);

    Rng rng(spec.seed);
    const RealVec values = draw_spectrum(spec, rng);
    const ComplexMatrix u = random_unitary(spec.d, rng);
    HermitianMatrix a = from_spectrum(u, values);

    switch (spec.mode) {
        case SubspaceMode::random_pair: {
            ComplexMatrix x = gram_schmidt(complex_gaussian(spec.d, spec.k, rng));
            ComplexMatrix y = gram_schmidt(complex_gaussian(spec.d, spec.k, rng));
            return {std::move(a), SubspaceBasis(std::move(x)), SubspaceBasis(std::move(y))};
        }
        case SubspaceMode::invariant_plus_perturbation: {
            const auto idx = select_eigen(values, spec.k, spec.selection, rng);
            ComplexMatrix x(spec.d, spec.k);
            for (std::size_t c = 0; c < spec.k; ++c)
                for (std::size_t r = 0; r < spec.d; ++r) x(r, c) = u(r, idx[c]);
            const ComplexMatrix g = complex_gaussian(spec.d, spec.k, rng);
            if (spec.epsilon == 0.0) return {std::move(a), SubspaceBasis(x), SubspaceBasis(x)};
            ComplexMatrix y = gram_schmidt(x + cplx(spec.epsilon) * g);
            return {std::move(a), SubspaceBasis(std::move(x)), SubspaceBasis(std::move(y))};
        }
        case SubspaceMode::orthogonal_pair: {
            ComplexMatrix x = gram_schmidt(complex_gaussian(spec.d, spec.k, rng));
            const ComplexMatrix g = complex_gaussian(spec.d, spec.k, rng);
            ComplexMatrix y = gram_schmidt(g - x * (adjoint(x) * g));
            return {std::move(a), SubspaceBasis(std::move(x)), SubspaceBasis(std::move(y))};
        }
        case SubspaceMode::paper_fixed: break;
    }
    fail(ErrorCode::SpecInvalid, "unsupported subspace mode");
}

/// Spec of the first example with diagonal (a, b, c, d).
inline InstanceSpec exa1_spec(double theta, std::array<double, 4> abcd = {0, 1, 2, 3}) {
    InstanceSpec s;
    s.spectrum.kind = SpectrumKind::paper_exa1;
    s.spectrum.params = abcd;
    s.spectrum.theta = theta;
    s.mode = SubspaceMode::paper_fixed;
    s.d = 4;
    s.k = 2;
    return s;
}

/// Spec of the second example; the diagonal is placed as (a, b, d, c).
inline InstanceSpec exa2_spec(double theta, std::array<double, 4> abdc = {0, 1, 3, 2}) {
    InstanceSpec s = exa1_spec(theta, abdc);
    s.spectrum.kind = SpectrumKind::paper_exa2;
    return s;
}

}  // namespace ritz::harness
