#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "oracles.hpp"
#include "ritz/error.hpp"
#include "ritz/harness/rng.hpp"
#include "ritz/linalg.hpp"
#include "ritz/majorization.hpp"

using namespace ritz;
using harness::Rng;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected ritz::Error";
    return ErrorCode::ParseError;
}

RealVec random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    RealVec v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

double tol_for(const RealVec& y) {
    double m = 1.0;
    for (double v : y) m = std::max(m, std::abs(v) * static_cast<double>(y.size()));
    return 1e-9 * m;
}

RealVec sv(const ComplexMatrix& m) { return singular_values(m).values(); }

}  // namespace

TEST(Submajorization, ClassicPairs) {
    const RealVec a{1, 1}, b{2, 0};
    auto v = submajorized_by(a, b, 0.0);
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.prefix_margins, (RealVec{1, 0}));
    v = submajorized_by(b, a, 0.0);
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.worst_index, 0u);
    EXPECT_EQ(v.worst_margin(), -1.0);
}

TEST(Majorization, TraceCondition) {
    EXPECT_TRUE(majorized_by(RealVec{1, 1, 1}, RealVec{3, 0, 0}, 0.0).holds);
    const auto v = majorized_by(RealVec{2, 1}, RealVec{2, 2}, 1e-12);
    EXPECT_FALSE(v.holds);
    EXPECT_TRUE(submajorized_by(RealVec{2, 1}, RealVec{2, 2}, 1e-12).holds);
    EXPECT_EQ(v.trace_gap, 1.0);
}

TEST(Submajorization, ErrorsOnBadInput) {
    EXPECT_EQ(code_of([] { submajorized_by(RealVec{1}, RealVec{1, 2}, 0.0); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { submajorized_by(RealVec{std::nan("")}, RealVec{1}, 0.0); }), ErrorCode::NonFinite);
}

TEST(Submajorization, ReflexiveAndTransitive) {
    Rng rng(21);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 200; ++trial) {
        const auto x = random_vec(5, rng), y = random_vec(5, rng), z = random_vec(5, rng);
        EXPECT_TRUE(submajorized_by(x, x, 0.0).holds);
        if (submajorized_by(x, y, 0.0).holds && submajorized_by(y, z, 0.0).holds) {
            EXPECT_TRUE(submajorized_by(x, z, 1e-14).holds);
            ++checked;
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(Submajorization, AgreesWithNaiveOracleAndKyFan) {
    Rng rng(22);
    for (int trial = 0; trial < 500; ++trial) {
        const auto x = random_vec(6, rng, 0.0, 1.0);
        const auto y = random_vec(6, rng, 0.0, 1.0);
        const bool holds = submajorized_by(x, y, 0.0).holds;
        EXPECT_EQ(holds, oracle::naive_submajorized(x, y, 0.0));
        EXPECT_EQ(holds, ky_fan_dominated(x, y, 0.0));
    }
}

TEST(Sorting, OrdersAndMatchesNaiveSort) {
    EXPECT_EQ(sort_desc(RealVec{3, 1, 2}).values(), (RealVec{3, 2, 1}));
    EXPECT_EQ(sort_asc(RealVec{3, 1, 2}).values(), (RealVec{1, 2, 3}));
    EXPECT_TRUE(sort_desc(RealVec{}).empty());
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = random_vec(9, rng);
        auto ref = v;
        std::sort(ref.begin(), ref.end(), std::greater<>());
        EXPECT_EQ(sort_desc(v).values(), ref);
    }
}

TEST(Entrywise, ProductsQuotientsAndZeroDivisor) {
    EXPECT_EQ(entrywise_mul(RealVec{4, 2}, RealVec{2, 1}), (RealVec{8, 2}));
    EXPECT_EQ(entrywise_div(RealVec{4, 2}, RealVec{2, 1}), (RealVec{2, 2}));
    try {
        entrywise_div(RealVec{1, 2, 3}, RealVec{1, 0, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DivisionByZero);
        EXPECT_EQ(e.index(), std::optional<std::size_t>(1));
    }
}

TEST(Entrywise, ExplicitPaddingOnly) {
    EXPECT_EQ(zero_padded(RealVec{1, 2}, 4), (RealVec{1, 2, 0, 0}));
    EXPECT_EQ(code_of([] { entrywise_add(RealVec{1}, RealVec{1, 2}); }), ErrorCode::DimensionMismatch);
}

TEST(MonotoneConvex, SquarePreservesSubmajorization) {
    EXPECT_EQ(apply_monotone_convex(RealVec{3, 1}, ConvexFn::square), (RealVec{9, 1}));
    EXPECT_EQ(code_of([] { apply_monotone_convex(RealVec{-1}, ConvexFn::square); }), ErrorCode::NegativeInput);
    Rng rng(24);
    int checked = 0;
    for (int trial = 0; trial < 5000 && checked < 500; ++trial) {
        const auto x = sort_desc(random_vec(4, rng, 0.0, 1.0)).values();
        const auto y = sort_desc(random_vec(4, rng, 0.0, 1.0)).values();
        if (!oracle::naive_submajorized(x, y, 0.0)) continue;
        ++checked;
        const auto x2 = apply_monotone_convex(x, ConvexFn::square);
        const auto y2 = apply_monotone_convex(y, ConvexFn::square);
        EXPECT_TRUE(oracle::naive_submajorized(x2, y2, 1e-14));
    }
    EXPECT_EQ(checked, 500);
}

TEST(UinNorms, TableValues) {
    const auto t = uin_norms(OrderedSpectrum::descending({3, 1}));
    EXPECT_EQ(t.ky_fan, (RealVec{3, 4}));
    EXPECT_DOUBLE_EQ(t.schatten_2, std::sqrt(10.0));
    EXPECT_EQ(t.schatten_inf, 3.0);
    EXPECT_EQ(t.schatten_1, 4.0);
    const auto empty = uin_norms(OrderedSpectrum::descending({}));
    EXPECT_TRUE(empty.ky_fan.empty());
    EXPECT_EQ(empty.schatten_2, 0.0);
    EXPECT_EQ(code_of([] { uin_norms(OrderedSpectrum::descending({1, -1})); }), ErrorCode::NegativeSingularValue);
}

TEST(LemmaOracle, ItemExamplesAndPreconditions) {
    EXPECT_TRUE(lemma_props_oracle(RealVec{1, 3}, RealVec{2, 0}, RealVec{0, 0}, 1, 1e-12).holds);
    EXPECT_TRUE(lemma_props_oracle(RealVec{2, 1}, RealVec{3, 1}, RealVec{0, 0}, 3, 1e-12).holds);
    EXPECT_TRUE(lemma_props_oracle(RealVec{1, 1}, RealVec{2, 0}, RealVec{1, 1}, 4, 1e-12).holds);
    EXPECT_EQ(code_of([] { lemma_props_oracle(RealVec{-1, 0}, RealVec{1, 0}, RealVec{1, 0}, 3, 0.0); }),
              ErrorCode::PreconditionViolated);
    EXPECT_EQ(code_of([] { lemma_props_oracle(RealVec{1, 0}, RealVec{0, 1}, RealVec{1, 0}, 2, 0.0); }),
              ErrorCode::PreconditionViolated);
    try {
        lemma_props_oracle(RealVec{1}, RealVec{1}, RealVec{1}, 7, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("item 7"), std::string::npos);
    }
}

TEST(LemmaOracle, RandomInstancesAllItems) {
    Rng rng(25);
    for (int trial = 0; trial < 300; ++trial) {
        const auto x = random_vec(5, rng, 0.0, 1.0);
        const auto y = random_vec(5, rng, 0.0, 1.0);
        EXPECT_TRUE(lemma_props_oracle(x, y, y, 1, 1e-12).holds);
        EXPECT_TRUE(lemma_props_oracle(x, y, y, 3, 1e-12).holds);
        // Items 2 and 4: build y >= x prefix-wise by construction.
        const auto xd = sort_desc(x).values();
        RealVec yy = xd;
        for (auto& v : yy) v += rng.uniform(0.0, 0.5);
        yy = sort_desc(yy).values();
        const auto z = sort_desc(random_vec(5, rng, 0.0, 1.0)).values();
        EXPECT_TRUE(lemma_props_oracle(x, yy, z, 2, 1e-12).holds);
        EXPECT_TRUE(lemma_props_oracle(x, yy, z, 4, 1e-12).holds);
    }
}

TEST(SingularValueFacts, LidskiiAdditiveRealPartMultiplicative) {
    Rng rng(26);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const auto c = oracle::random_complex(d, d, rng);
        const auto dm = oracle::random_complex(d, d, rng);
        const auto rhs1 = entrywise_add(sv(c), sv(dm));
        EXPECT_TRUE(submajorized_by(sv(c + dm), rhs1, tol_for(rhs1)).holds);
        EXPECT_TRUE(submajorized_by(sv(real_part(c)), sv(c), tol_for(sv(c))).holds);
        const auto rhs3 = entrywise_mul(sv(c), sv(dm));
        EXPECT_TRUE(submajorized_by(sv(c * dm), rhs3, tol_for(rhs3)).holds);
    }
}

TEST(SingularValueFacts, HermitianProductBoundedByRealPart) {
    Rng rng(27);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const auto h = oracle::random_hermitian(d, rng).matrix();
        const auto dm = oracle::random_complex(d, d, rng) + cplx(3.0) * ComplexMatrix::identity(d);
        const auto c = h * inverse(dm);  // c * dm = h is Hermitian
        const auto rhs = sv(real_part(dm * c));
        EXPECT_TRUE(submajorized_by(sv(c * dm), rhs, tol_for(rhs)).holds);
    }
}

TEST(EigenvalueFacts, DifferenceMajorizationChain) {
    Rng rng(28);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 7;
        const auto c = oracle::random_hermitian(d, rng);
        const auto dm = oracle::random_hermitian(d, rng);
        const auto lc = eigenvalues(c).values();
        const auto ld = eigenvalues(dm).values();
        const auto ldiff = eigenvalues(HermitianMatrix(c.matrix() - dm.matrix())).values();
        const auto lo = entrywise_sub(lc, ld);
        const auto hi = entrywise_sub(lc, sort_asc(ld).values());
        EXPECT_TRUE(majorized_by(lo, ldiff, tol_for(ldiff)).holds);
        EXPECT_TRUE(majorized_by(ldiff, hi, tol_for(hi)).holds);
        RealVec absdiff = lo;
        for (auto& v : absdiff) v = std::abs(v);
        const auto s = sv(c.matrix() - dm.matrix());
        EXPECT_TRUE(submajorized_by(absdiff, s, tol_for(s)).holds);
    }
}

TEST(EigenvalueFacts, PinchingIsMajorized) {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 3 + trial % 6;
        const auto c = oracle::random_hermitian(d, rng);
        const auto u = harness::random_unitary(d, rng);
        // Split the columns of u into blocks of random sizes.
        ComplexMatrix pinched(d, d);
        std::size_t start = 0;
        while (start < d) {
            const std::size_t len = std::min<std::size_t>(d - start, 1 + rng.integer(0, 2));
            const auto q = u.columns(start, len);
            const auto p = q * adjoint(q);
            pinched = pinched + p * c.matrix() * p;
            start += len;
        }
        const auto lc = eigenvalues(c).values();
        EXPECT_TRUE(majorized_by(eigenvalues(HermitianMatrix(pinched)).values(), lc, tol_for(lc)).holds);
    }
}

TEST(EigenvalueFacts, BlockAntiDiagonalSpectrum) {
    Rng rng(30);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 3 + trial % 6;
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
        EXPECT_LE(oracle::max_diff(eigenvalues(HermitianMatrix(hat)).values(), expected), 1e-10);
    }
}
