#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ritz/bounds.hpp"
#include "ritz/harness/generate.hpp"
#include "ritz/harness/rng.hpp"
#include "ritz/harness/verify.hpp"

using namespace ritz;
using namespace ritz::harness;
using std::numbers::pi;

namespace {

struct Check {
    bool ok = true;
    std::size_t cases = 0;
    std::ostringstream notes;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) notes << "first failure: " << what << "; ";
        ok = ok && cond;
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s << what << " = " << got << ", want " << want;
        expect(std::abs(got - want) <= tol, s.str());
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;  // seconds, 0 for none
    std::function<void(Check&)> body;
};

double max_dev(const RealVec& a, const RealVec& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double vec_tol(const RealVec& y, double base) {
    double inf = 0.0;
    for (double v : y) inf = std::max(inf, std::abs(v));
    return base * std::max(1.0, inf * static_cast<double>(y.size()));
}

RealVec sv(const ComplexMatrix& m) { return singular_values(m).values(); }

InstanceSpec random_spec(std::uint64_t seed, std::size_t d, std::size_t k, SubspaceMode mode, double eps) {
    InstanceSpec s;
    s.d = d;
    s.k = k;
    s.mode = mode;
    s.epsilon = eps;
    s.seed = seed;
    s.spectrum.lo = -1.0;
    s.spectrum.hi = 1.0;
    return s;
}

void example_one(Check& c) {
    for (double theta : {pi / 6, pi / 4, pi / 3}) {
        const auto inst = generate(exa1_spec(theta));
        const double s2 = std::sin(theta) * std::sin(theta);  // (c - b) = 1
        for (const auto& r : {mixed_bound_cos(inst.a, inst.x, inst.y), mixed_bound_tan(inst.a, inst.x, inst.y)}) {
            ++c.cases;
            c.expect(max_dev(r.lhs, {s2, 0}) <= 1e-10, r.theorem_id + " lhs at theta " + std::to_string(theta));
            c.expect(max_dev(r.rhs, {s2, 0}) <= 1e-10, r.theorem_id + " rhs at theta " + std::to_string(theta));
        }
    }
}

void example_two(Check& c) {
    const auto at = generate(exa2_spec(pi / 6));
    const auto cert = dkn_certificate(at.a, at.x, at.y);
    c.expect(cert.has_value(), "ambient certificate at pi/6");
    if (!cert) return;
    c.near(cert->delta, 0.5, 1e-10, "delta");
    const auto imp = tan_theta_improved(at.a, at.x, at.y);
    c.near(imp.delta_prime, 1.5, 1e-10, "delta'");
    c.near(tan_theta_classical(at.a, at.x, at.y, *cert).extras.at("ratio"), std::sqrt(3.0), 1e-10, "classical ratio");
    c.near(imp.improved.extras.at("ratio"), 1.0 / std::sqrt(3.0), 1e-10, "improved ratio");
    c.expect(imp.improved.verdict.holds, "improved bound at pi/6");

    const auto far = generate(exa2_spec(pi / 3));
    c.expect(!dkn_certificate(far.a, far.x, far.y).has_value(), "NoSeparation at pi/3");
    const auto imp3 = tan_theta_improved(far.a, far.x, far.y);
    c.near(imp3.improved.extras.at("ratio"), std::sqrt(3.0), 1e-10, "improved ratio at pi/3");
    c.near(imp3.delta_prime, 0.5, 1e-10, "delta' at pi/3");
    c.cases = 2;
}

void mixed_property_suite(Check& c) {
    const std::set<std::string> ids{"mixed_cos",       "mixed_tan",        "mixed_cos_squared",
                                     "mixed_tan_squared", "spread_partial", "apriori_mixed",
                                     "proposition_sin_squared", "apriori_invariant"};
    Rng rng(20240601);
    std::size_t checked = 0, other_violations = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const std::size_t d = 4 + rng.integer(0, 6);
        const std::size_t k = 1 + rng.integer(0, d / 2 - 1);
        const SubspaceMode mode = i % 3 == 0 ? SubspaceMode::random_pair : SubspaceMode::invariant_plus_perturbation;
        const double eps = i % 3 == 1 ? 1e-3 : 1e-1;
        const auto spec = random_spec(trial_seed(7, i), d, k, mode, eps);
        for (const auto& o : evaluate_instance(generate(spec), 1e-9)) {
            if (o.status != Status::fail || !o.must_hold) {
                if (o.status == Status::pass && ids.count(o.theorem_id)) ++checked;
                continue;
            }
            if (ids.count(o.theorem_id))
                c.expect(false, o.theorem_id + " at trial " + std::to_string(i));
            else
                ++other_violations;
        }
    }
    c.cases = checked;
    c.expect(other_violations == 0, std::to_string(other_violations) + " violations of other must-hold bounds");
}

void appendix_suite(Check& c) {
    Rng rng(777);
    for (std::size_t trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + rng.integer(0, 6);
        const auto tag = " at trial " + std::to_string(trial);
        const auto cm = oracle::random_complex(d, d, rng);
        const auto dm = oracle::random_complex(d, d, rng);

        // Singular value submajorizations.
        const auto r1 = entrywise_add(sv(cm), sv(dm));
        c.expect(submajorized_by(sv(cm + dm), r1, vec_tol(r1, 1e-9)).holds, "additive" + tag);
        const auto r2 = sv(cm);
        c.expect(submajorized_by(sv(real_part(cm)), r2, vec_tol(r2, 1e-9)).holds, "real part" + tag);
        const auto r3 = entrywise_mul(sv(cm), sv(dm));
        c.expect(submajorized_by(sv(cm * dm), r3, vec_tol(r3, 1e-9)).holds, "multiplicative" + tag);
        const auto h = oracle::random_hermitian(d, rng).matrix();
        const auto shifted_d = dm + cplx(3.0) * ComplexMatrix::identity(d);
        const auto herm_c = h * inverse(shifted_d);
        const auto r4 = sv(real_part(shifted_d * herm_c));
        c.expect(submajorized_by(sv(herm_c * shifted_d), r4, vec_tol(r4, 1e-9)).holds, "Hermitian product" + tag);

        // Eigenvalue majorizations.
        const auto hc = oracle::random_hermitian(d, rng);
        const auto hd = oracle::random_hermitian(d, rng);
        const auto lc = eigenvalues(hc).values();
        const auto ld = eigenvalues(hd).values();
        const auto ldiff = eigenvalues(HermitianMatrix(hc.matrix() - hd.matrix())).values();
        const auto lo = entrywise_sub(lc, ld);
        const auto hi = entrywise_sub(lc, sort_asc(ld).values());
        c.expect(majorized_by(lo, ldiff, vec_tol(ldiff, 1e-9)).holds, "difference lower" + tag);
        c.expect(majorized_by(ldiff, hi, vec_tol(hi, 1e-9)).holds, "difference upper" + tag);
        RealVec absdiff = lo;
        for (auto& v : absdiff) v = std::abs(v);
        const auto sdiff = sv(hc.matrix() - hd.matrix());
        c.expect(submajorized_by(absdiff, sdiff, vec_tol(sdiff, 1e-9)).holds, "eigenvalue distance" + tag);
        const auto u = random_unitary(d, rng);
        ComplexMatrix pinched(d, d);
        for (std::size_t start = 0; start < d;) {
            const std::size_t len = std::min<std::size_t>(d - start, 1 + rng.integer(0, 2));
            const auto q = u.columns(start, len);
            const auto p = q * adjoint(q);
            pinched = pinched + p * hc.matrix() * p;
            start += len;
        }
        c.expect(majorized_by(eigenvalues(HermitianMatrix(pinched)).values(), lc, vec_tol(lc, 1e-9)).holds,
                 "pinching" + tag);

        // Vector lemma, all four items.
        const auto x = sv(cm);
        const auto y = sv(dm);
        const auto z = sort_desc(sv(oracle::random_complex(d, d, rng))).values();
        RealVec yy = x;
        for (auto& v : yy) v += rng.uniform(0.0, 0.5);
        yy = sort_desc(yy).values();
        RealVec xs = x;
        std::reverse(xs.begin(), xs.end());
        const double lt = vec_tol(entrywise_mul(yy, z), 1e-9) + vec_tol(entrywise_add(yy, z), 1e-9);
        c.expect(lemma_props_oracle(xs, lc, lc, 1, lt).holds, "lemma item 1" + tag);
        c.expect(lemma_props_oracle(xs, yy, z, 2, lt).holds, "lemma item 2" + tag);
        c.expect(lemma_props_oracle(xs, y, y, 3, lt).holds, "lemma item 3" + tag);
        c.expect(lemma_props_oracle(xs, yy, z, 4, lt).holds, "lemma item 4" + tag);

        // Block anti-diagonal spectrum.
        if (d >= 2) {
            const std::size_t k = 1 + rng.integer(0, d - 2);
            const auto e = oracle::random_complex(k, d - k, rng);
            ComplexMatrix hat(d, d);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < d - k; ++j) {
                    hat(i, k + j) = e(i, j);
                    hat(k + j, i) = std::conj(e(i, j));
                }
            RealVec expected = zero_padded(sv(e), k);
            const auto neg = scaled(zero_padded(sv(adjoint(e)), d - k), -1.0);
            expected.insert(expected.end(), neg.begin(), neg.end());
            expected = sort_desc(expected).values();
            c.expect(max_dev(eigenvalues(HermitianMatrix(hat)).values(), expected) <= 1e-10, "block spectrum" + tag);
        }

        // Projector identity for a random pair of equal dimension.
        const std::size_t kk = 1 + rng.integer(0, d - 1);
        const SubspaceBasis sx(gram_schmidt(oracle::random_complex(d, kk, rng)));
        const SubspaceBasis sy(gram_schmidt(oracle::random_complex(d, kk, rng)));
        c.expect(sin_squared_identity_check(sx, sy, 1e-9).holds, "sin^2 identity" + tag);

        // Positive definite T distance bound.
        const auto g = oracle::random_complex(d, d, rng);
        const HermitianMatrix t(g * adjoint(g) + cplx(0.1) * ComplexMatrix::identity(d));
        c.expect(positive_T_distance_bound(hc, hd, t).verdict.holds, "positive T distance" + tag);
        ++c.cases;
    }
}

struct SeparatedInstance {
    Instance inst;
    DknCertificate cert;
};

const std::vector<SeparatedInstance>& separated_instances() {
    static const std::vector<SeparatedInstance> pool = [] {
        std::vector<SeparatedInstance> out;
        Rng rng(4242);
        const double eps_grid[] = {1e-3, 1e-2, 1e-1};
        for (std::size_t i = 0; out.size() < 500 && i < 20000; ++i) {
            const std::size_t d = 4 + rng.integer(0, 6);
            const std::size_t k = 1 + rng.integer(0, d / 2 - 1);
            auto spec = random_spec(trial_seed(99, i), d, k, SubspaceMode::invariant_plus_perturbation,
                                    eps_grid[i % 3]);
            spec.spectrum.kind = SpectrumKind::clustered;
            spec.spectrum.gap = 0.2 + rng.uniform();
            spec.selection = i % 2 ? EigenSelection::top : EigenSelection::random;
            auto inst = generate(spec);
            const auto cert = dkn_certificate(inst.a, inst.x, inst.y);
            if (!cert || !compressed_certificate(inst.a, inst.x, inst.y)) continue;
            out.push_back({std::move(inst), *cert});
        }
        return out;
    }();
    return pool;
}

void dkn_monotonicity(Check& c) {
    const auto& pool = separated_instances();
    c.expect(pool.size() == 500, "only " + std::to_string(pool.size()) + " separated instances found");
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& [inst, cert] = pool[i];
        const auto tag = " at instance " + std::to_string(i);
        const auto imp = tan_theta_improved(inst.a, inst.x, inst.y);
        c.expect(imp.delta_prime >= cert.delta - 1e-10, "delta' < delta" + tag);
        const auto cls = tan_theta_classical(inst.a, inst.x, inst.y, cert);
        const RealVec proj = imp.improved.rhs;
        const RealVec full = cls.rhs;
        c.expect(submajorized_by(proj, full, vec_tol(full, 1e-9)).holds, "s(P R_Y) not below s(R_Y)" + tag);
        const RealVec imp_rhs = scaled(proj, 1.0 / imp.delta_prime);
        const RealVec cls_rhs = scaled(full, 1.0 / cert.delta);
        c.expect(submajorized_by(imp_rhs, cls_rhs, vec_tol(cls_rhs, 1e-9)).holds, "improved rhs above classical" + tag);
        c.expect(imp.improved.verdict.holds && cls.verdict.holds, "tan bound fails" + tag);
        ++c.cases;
    }
}

void quadratic_suite(Check& c) {
    const auto& pool = separated_instances();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& [inst, cert] = pool[i];
        const double dp = compressed_certificate(inst.a, inst.x, inst.y)->delta;
        for (double delta : {cert.delta, dp}) {
            const auto r = quadratic_aposteriori(inst.a, inst.x, inst.y, delta);
            c.expect(r.verdict.holds, "quadratic bound at instance " + std::to_string(i));
            ++c.cases;
        }
    }
    const auto ex = generate(exa2_spec(pi / 6));
    const auto r = quadratic_aposteriori(ex.a, ex.x, ex.y, 1.5);
    c.near(r.lhs.back(), 0.5, 1e-10, "spectral lhs");
    c.near(r.rhs.back(), 0.5, 1e-10, "spectral rhs");
}

void consecutive_suite(Check& c) {
    Rng rng(31337);
    std::size_t accepted = 0, scalar = 0, tries = 0;
    while (accepted < 200 && tries < 100000) {
        ++tries;
        const std::size_t d = 4 + rng.integer(0, 4);
        const std::size_t k = 1 + rng.integer(0, 1);
        const auto h = oracle::random_hermitian(d, rng);
        const SubspaceBasis y(gram_schmidt(oracle::random_complex(d, k, rng)));
        BoundReport r;
        try {
            r = consecutive_eigenvalue_bound(h, y);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::HypothesisFailed || e.code() == ErrorCode::DegenerateCut) continue;
            throw;
        }
        ++accepted;
        const auto tag = " at sample " + std::to_string(tries);
        c.expect(r.verdict.holds, "bound fails" + tag);
        if (k != 1) continue;
        // Scalar form recomputed from scratch.
        const auto lam = oracle::bisection_eigenvalues(h.matrix());
        const ComplexMatrix& v = y.basis();
        const double rq = (adjoint(v) * h.matrix() * v)(0, 0).real();
        std::size_t j = 0;
        while (j < d && lam[j] > rq) ++j;
        const auto eig = hermitian_eig(h);
        const auto u = eig.eigenvectors.columns(0, j);
        const ComplexMatrix w = v - u * (adjoint(u) * v);
        const ComplexMatrix basis = gram_schmidt(hcat(v, w));
        const ComplexMatrix res = h.matrix() * v - cplx(rq) * v;
        const double pr = frobenius_norm(adjoint(basis) * res);
        const double want_lhs = rq - lam[j];
        const double want_rhs = pr * pr / (lam[j - 1] - rq);
        c.near(r.lhs.back(), want_lhs, 1e-10, "scalar lhs" + tag);
        c.near(r.rhs.back(), want_rhs, 1e-10 * std::max(1.0, want_rhs), "scalar rhs" + tag);
        ++scalar;
    }
    c.expect(accepted == 200, "only " + std::to_string(accepted) + " instances accepted");
    c.expect(scalar > 0, "no k = 1 instance accepted");
    c.cases = accepted;
}

void kernel_suite(Check& c) {
    Rng rng(8080);
    for (std::size_t i = 0; i < 1000; ++i) {
        const std::size_t d = 1 + (i * 7) % 50;
        const auto tag = " at d = " + std::to_string(d) + ", trial " + std::to_string(i);
        const auto a = oracle::random_hermitian(d, rng);
        const auto eig = hermitian_eig(a);
        const auto& v = eig.eigenvectors;
        const double fa = frobenius_norm(a.matrix());
        c.expect(frobenius_norm(a.matrix() * v - v * ComplexMatrix::diagonal(eig.eigenvalues.values())) <= 1e-10 * fa,
                 "eigen residual" + tag);
        c.expect(max_abs(adjoint(v) * v - ComplexMatrix::identity(d)) <= 1e-12, "eigenvector orthogonality" + tag);
        c.expect(max_dev(eig.eigenvalues.values(), oracle::bisection_eigenvalues(a.matrix())) <= 1e-8,
                 "bisection agreement" + tag);

        const std::size_t cols = 1 + rng.integer(0, d - 1);
        const auto b = oracle::random_complex(d, cols, rng);
        const auto s = svd(b);
        const double smax = s.singular_values[0];
        const auto recon =
            s.left_vectors * ComplexMatrix::diagonal(s.singular_values.values()) * adjoint(s.right_vectors);
        c.expect(max_abs(recon - b) <= 1e-10 * std::max(1.0, smax), "svd reconstruction" + tag);
        c.expect(max_abs(adjoint(s.left_vectors) * s.left_vectors - ComplexMatrix::identity(cols)) <= 1e-12,
                 "left singular vectors" + tag);
        c.expect(max_abs(adjoint(s.right_vectors) * s.right_vectors - ComplexMatrix::identity(cols)) <= 1e-12,
                 "right singular vectors" + tag);
        ++c.cases;
    }
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "first example sharpness", 1.0, example_one},
        {2, "second example reproduction", 1.0, example_two},
        {3, "mixed and a priori property suite", 60.0, mixed_property_suite},
        {4, "appendix oracle suite", 0.0, appendix_suite},
        {5, "separation monotonicity", 0.0, dkn_monotonicity},
        {6, "quadratic a posteriori bound", 0.0, quadratic_suite},
        {7, "consecutive eigenvalue bound", 0.0, consecutive_suite},
        {8, "eigensolver and svd accuracy", 0.0, kernel_suite},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.body(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.time_limit > 0.0 && secs >= cr.time_limit) {
            std::ostringstream s;
            s << "runtime " << secs << " s over limit " << cr.time_limit << " s";
            check.expect(false, s.str());
        }
        std::printf("%s %d %s: %zu cases, %.2f s%s%s\n", check.ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(),
                    check.cases, secs, check.ok ? "" : " - ", check.notes.str().c_str());
        std::fflush(stdout);
        if (!check.ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
