#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qpi/gap.hpp"
#include "qpi/linalg.hpp"
#include "qpi/wienerhopf.hpp"
#include "qpi/zoo.hpp"

using namespace qpi;
using std::numbers::pi;

namespace {

LaurentMatrix scalar1(std::vector<std::pair<int, Complex>> c) {
    std::vector<Term> t;
    for (auto [k, v] : c) t.push_back({{k, 0, 0}, Matrix::Constant(1, 1, v)});
    return LaurentMatrix(1, 1, t);
}

// Closed-form factors of h, x direction. The square root branch is the one
// with alpha(1) = 3, continued along the circle.
Complex alpha(Complex w) { return std::sqrt(25.0 - 16.0 * w + 4.0 * w * w); }

Matrix hx_minus(Complex z, Complex w) {
    const Complex a = alpha(w);
    Matrix m = Matrix::Identity(3, 3);
    m(2, 0) = (-1.0 + 2.0 * w + a) / (6.0 * z * w);
    m(2, 1) = 1.0 / z;
    m(2, 2) = 1.0 + (-5.0 + 2.0 * w + a) / (4.0 * z * w);
    return m;
}

Matrix hx_plus(Complex z, Complex w) {
    const Complex a = alpha(w);
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = (1.0 + z) * w;
    m(0, 1) = m(1, 0) = -0.5 + z;
    m(1, 1) = (1.0 + 2.0 * z) / (2.0 * w);
    m(1, 2) = 1;
    m(2, 0) = (-5.0 - 2.0 * w - a) / 6.0;
    m(2, 1) = (-5.0 + 4.0 * w - a) / (6.0 * w);
    return m;
}

Matrix hy_minus(Complex z, Complex w) {
    Matrix m = Matrix::Identity(3, 3);
    m(1, 0) = (1.0 + 2.0 * z) / ((2.0 * z - 1.0) * w);
    return m;
}

Matrix hy_plus(Complex z, Complex w) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = (1.0 + z) * w;
    m(0, 1) = -0.5 + z;
    m(1, 0) = (1.0 + 10.0 * z) / (2.0 - 4.0 * z);
    m(1, 2) = 1;
    m(2, 1) = 1;
    m(2, 2) = 1.0 / z;
    return m;
}

std::vector<Complex> disk_points(int count, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> r(0.0, 0.98), a(-pi, pi);
    std::vector<Complex> out;
    for (int i = 0; i < count; ++i) out.push_back(std::polar(std::sqrt(r(gen)), a(gen)));
    return out;
}

}  // namespace

TEST(WindingDet, Scalars) {
    EXPECT_EQ(winding_det(scalar1({{1, 1.0}})), 1);
    EXPECT_EQ(winding_det(scalar1({{0, 2.0}, {1, 1.0}})), 0);
    EXPECT_EQ(winding_det(scalar1({{-2, 1.0}})), -2);
}

TEST(WindingDet, PaperSymbolSlice) { EXPECT_EQ(winding_det(zoo::paper_h().fix_variable(1, 1.0)), 0); }

TEST(WindingDet, SingularOnCircle) {
    try {
        winding_det(scalar1({{0, 1.0}, {1, 1.0}}));  // 1 + z vanishes at -1
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularOnCircle);
    }
}

TEST(PrintedFactors, MultiplyBackToSymbol) {
    // guards the transcription used by the golden tests below
    const auto h = zoo::paper_h();
    for (int i = 0; i < 12; ++i) {
        Complex z = unit(0.37 + 0.5 * i), w = unit(2 * pi * i / 12);
        EXPECT_LT((hx_minus(z, w) * hx_plus(z, w) - h(z, w)).norm(), 1e-12) << "x factors at sample " << i;
        EXPECT_LT((hy_minus(z, w) * hy_plus(z, w) - h(z, w)).norm(), 1e-12) << "y factors at sample " << i;
    }
}

TEST(FactorizeRight, TwoPlusZ) {
    auto f = scalar1({{0, 2.0}, {1, 1.0}});
    auto cf = factorize_right(f);
    EXPECT_LT(cf.residual, 1e-9);
    EXPECT_LT(std::abs(extend_1var(cf, 0.0)(0, 0) - 2.0), 1e-10);
    for (double a : {0.0, 1.0, 2.5}) EXPECT_LT((cf.product(unit(a)) - f(unit(a))).norm(), 1e-9);
}

TEST(FactorizeRight, ZIsNonCanonical) {
    try {
        factorize_right(scalar1({{1, 1.0}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonCanonical);
    }
}

TEST(FactorizeRight, SlowDecayExtendsTruncation) {
    // 1/(1 - rz) has coefficients r^k, far from 1e-10 at the largest scheduled size
    const double r = 0.985;
    auto f = scalar1({{0, 1.0}, {1, -r}});
    auto cf = factorize_right(f);
    EXPECT_GT(cf.truncation, 512);
    EXPECT_LT(cf.residual, 1e-9);
    EXPECT_LT(std::abs(extend_1var(cf, 0.5)(0, 0) - (1 - 0.5 * r)), 1e-9);
    FactorizationOptions capped;
    capped.max_truncation = 512;
    try {
        factorize_right(f, capped);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IllConditioned);
    }
}

TEST(FactorizeLeft, TwoPlusZInverse) {
    auto f = scalar1({{0, 2.0}, {-1, 1.0}});
    auto cf = factorize_left(f);
    EXPECT_TRUE(cf.left);
    EXPECT_EQ(cf.plus_coeffs.size(), 1u);  // constant plus factor
    for (double a : {0.3, 1.9}) EXPECT_LT((cf.product(unit(a)) - f(unit(a))).norm(), 1e-9);
    EXPECT_THROW(factorize_left(scalar1({{-1, 1.0}})), Error);
}

TEST(FactorizeRight, PaperSliceResidualAndExtension) {
    const auto h = zoo::paper_h();
    const auto pts = disk_points(100, 3);
    for (int i = 0; i < 12; ++i) {
        const Complex w = unit(2 * pi * i / 12);
        auto cf = factorize_right(h.fix_variable(1, w));
        EXPECT_LT(cf.residual, 1e-8);
        for (Complex z : pts) {
            Matrix want = hx_minus(1.0 / std::conj(z), w) * hx_plus(z, w);
            EXPECT_LT((extend_1var(cf, z) - want).norm(), 1e-6);
        }
    }
}

TEST(FactorizeRight, PaperSliceYDirection) {
    const auto h = zoo::paper_h();
    const auto pts = disk_points(50, 5);
    for (int i = 0; i < 12; ++i) {
        const Complex z = unit(2 * pi * i / 12 + 0.1);
        auto cf = factorize_right(h.fix_variable(0, z));
        EXPECT_LT(cf.residual, 1e-8);
        for (Complex w : pts) {
            Matrix want = hy_minus(z, 1.0 / std::conj(w)) * hy_plus(z, w);
            EXPECT_LT((extend_1var(cf, w) - want).norm(), 1e-6);
        }
    }
}

TEST(FactorizeLeft, PaperSliceFlipped) {
    const auto h = zoo::paper_h();
    for (int i = 0; i < 12; ++i) EXPECT_NO_THROW(factorize_left(h.fix_variable(1, unit(2 * pi * i / 12))));
}

TEST(Extension, RestrictsToSymbolOnCircle) {
    const auto h = zoo::paper_h().fix_variable(1, unit(0.4));
    auto cf = factorize_right(h);
    for (int i = 0; i < 16; ++i) {
        Complex z = unit(2 * pi * i / 16);
        EXPECT_LT((extend_1var(cf, z) - h(z)).norm(), 1e-8);
    }
}

TEST(Extension, IndependentOfTruncation) {
    const auto f = zoo::paper_h().fix_variable(1, unit(1.2));
    FactorizationOptions a, b;
    a.schedule = {128};
    b.schedule = {256};
    auto ca = factorize_right(f, a), cb = factorize_right(f, b);
    for (Complex z : disk_points(20, 9)) EXPECT_LT((extend_1var(ca, z) - extend_1var(cb, z)).norm(), 1e-6);
}

TEST(Extension, HermitianAndChiralInside) {
    ExtendedSymbol ext(zoo::paper_H());
    const Matrix P = zoo::block_sign(3);
    for (int i = 0; i < 64; ++i) {
        Matrix e = ext.evaluate(Patch::ZPlus, 0.5, 2 * pi * i / 64);
        EXPECT_LT((e - e.adjoint()).norm(), 1e-8);
        EXPECT_LT((P * e * P + e).norm(), 1e-8);
        EXPECT_GT(min_abs_eigenvalue(e), 1e-3);
    }
}

TEST(Extension, InversionEquivariance) {
    ExtendedSymbol ext(zoo::paper_H());
    const Matrix I = zoo::block_swap(3);
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> r(0.0, 0.95), a(-pi, pi);
    for (int i = 0; i < 50; ++i) {
        const Complex u = std::polar(r(gen), a(gen));
        const double phi = a(gen);
        const bool zpatch = i % 2 == 0;
        // (z, w) -> (1/z, 1/w) swaps the inner and outer disk of the free variable
        Matrix lhs = I * ext.evaluate(zpatch ? Patch::ZPlus : Patch::WPlus, u, phi) * I.adjoint();
        Matrix rhs = ext.evaluate(zpatch ? Patch::ZMinus : Patch::WMinus, u, -phi);
        EXPECT_LT((lhs - rhs).norm(), 1e-6);
    }
}

TEST(Extension, GluedCoordinatesAgree) {
    ExtendedSymbol ext(zoo::paper_H());
    Complex z(0.3, 0.2), w = unit(0.9);
    EXPECT_LT((ext(z, w) - ext.evaluate(Patch::ZPlus, z, 0.9)).norm(), 1e-12);
    EXPECT_LT((ext(1.0 / z, w) - ext.evaluate(Patch::ZMinus, z, 0.9)).norm(), 1e-12);
    EXPECT_THROW(ext(z, z), Error);
}

TEST(Extension, CacheIsReusedAcrossThreads) {
    ExtendedSymbol ext(zoo::paper_H());
    std::vector<Matrix> out(8);
    parallel_for(8, [&](int i) { out[i] = ext.evaluate(Patch::WPlus, Complex(0.1 * i, 0), 0.25); });
    EXPECT_EQ(ext.cached(), 1u);
}

TEST(PartialIndex, FredholmIdentity) {
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int k = -2; k <= 2; ++k) {
        // diag(z^k, 1) plus a small perturbation keeps the winding at k
        std::vector<Term> t;
        Matrix e0 = Matrix::Zero(2, 2), e1 = Matrix::Zero(2, 2);
        e0(0, 0) = 1;
        e1(1, 1) = 1;
        t.push_back({{k, 0, 0}, e0});
        t.push_back({{0, 0, 0}, e1});
        Matrix p(2, 2);
        for (int i = 0; i < 4; ++i) p(i / 2, i % 2) = Complex(u(gen), u(gen));
        t.push_back({{1, 0, 0}, 0.1 * p});
        LaurentMatrix f(2, 1, t);
        auto r = partial_index_report(f);
        EXPECT_EQ(r.winding_det, k);
        EXPECT_EQ(r.ker_dim - r.coker_dim, -k);
        EXPECT_EQ(r.canonical, k == 0);
    }
}

TEST(HalfPlaneGap, ShiftEdgeIsNotInvertible) {
    auto h = chiral_hamiltonian(LaurentMatrix::monomial(Matrix::Identity(1, 1), {1, 0, 0}, 2));
    auto e = half_plane_gap(h, 1);
    EXPECT_FALSE(e.invertible);
}

TEST(HalfPlaneGap, ConstantGivesItsSmallestSingularValue) {
    Matrix eps = 0.5 * zoo::block_swap(3);
    eps(0, 3) = eps(3, 0) = 0.25;
    auto e = half_plane_gap(LaurentMatrix::constant(eps, 2), 2);
    EXPECT_TRUE(e.invertible);
    EXPECT_NEAR(e.min_singular, 0.25, 1e-9);
}

TEST(AssumptionCheck, PaperModelAllEdges) {
    auto g = assumption_check_2d(zoo::paper_H());
    ASSERT_EQ(g.entries.size(), 4u);
    for (const auto& e : g.entries) EXPECT_TRUE(e.invertible) << "edge " << e.label;
}

TEST(AssumptionCheck, WindingEdgeNamesItsLabel) {
    auto h = LaurentMatrix::monomial(Matrix::Identity(1, 1), {1, 0, 0}, 2);
    auto g = assumption_check_2d(chiral_hamiltonian(h));
    EXPECT_FALSE(g.all_invertible());
    EXPECT_FALSE(g.entry(1).invertible);
}
