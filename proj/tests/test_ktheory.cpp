#include <gtest/gtest.h>

#include "qpi/ktheory.hpp"

using namespace qpi;
using namespace qpi::k;

TEST(RElement, RingLaws) {
    RElement x{2, -1}, y{-3, 4};
    EXPECT_EQ(x * y, (RElement{2 * -3 + -1 * 4, 2 * 4 + -1 * -3}));
    EXPECT_EQ(kT * kT, kOne);
    EXPECT_EQ((x + y) * kT, x * kT + y * kT);
    EXPECT_EQ((kOne - kT) * (kOne + kT), RElement{});
    EXPECT_EQ(RElement({2, -2}).str(), "2-2t");
    EXPECT_EQ(kT.str(), "t");
}

TEST(F3, UnitClass) {
    auto v = f3(basis(C0));
    for (const auto& e : v) EXPECT_EQ(e, kOne);
}

TEST(F3, H12Row) {
    auto v = f3(basis(H12));
    const auto& pts = fixed_points_3d();
    for (int p = 0; p < kFixedPoints; ++p) {
        const bool at = pts[p][0] == 1 && pts[p][1] == 1;
        EXPECT_EQ(v[p], at ? kT : kOne) << p;
    }
}

TEST(F3, ProductClassSitsAtOnePoint) {
    auto v = f3(psi_phi_image(11));
    EXPECT_EQ(v[0], (RElement{2, -2}));
    for (int p = 1; p < kFixedPoints; ++p) EXPECT_EQ(v[p], RElement{}) << p;
}

TEST(F3, Linear) {
    KClassT3 a = 3 * basis(L1) - basis(H23), b = basis(C1H13) + 2 * basis(H12L3);
    auto fa = f3(a), fb = f3(b), fs = f3(a + b);
    for (int p = 0; p < kFixedPoints; ++p) EXPECT_EQ(fs[p], fa[p] + fb[p]);
    EXPECT_EQ(mu3d_ledger(a + b), mod4(mu3d_ledger(a) + mu3d_ledger(b)));
}

TEST(Mu, Generators) {
    EXPECT_EQ(mu3d_ledger(basis(C0)), 0);
    EXPECT_EQ(mu3d_ledger(basis(C1)), 0);  // -8 = 0 mod 4
    EXPECT_EQ(mu3d_ledger(basis(H12)), 2);
    for (int g = 0; g < kGenerators; ++g) {
        int m = mu3d_ledger(basis(Generator(g)));
        EXPECT_TRUE(m == 0 || m == 2) << f3_table()[g].name;
    }
}

TEST(Mu, PsiPhiImages) {
    for (int i = 1; i <= kXGenerators; ++i) EXPECT_EQ(mu3d_ledger(psi_phi_image(i)), i == 11 ? 2 : 0) << "x" << i;
    EXPECT_EQ(psi_phi_image(1), basis(C0));
    EXPECT_EQ(psi_phi_image(12), KClassT3{});
    EXPECT_EQ(psi_phi_image(7), basis(C0) - basis(H12) - basis(C1) + basis(C1H12));
    EXPECT_THROW(psi_phi_image(14), Error);
}

TEST(HalfMu, OnlyX11Counts) {
    KClassXT a{};
    a[10] = 1;
    EXPECT_EQ(half_mu(a), 1);
    a[10] = 2;
    EXPECT_EQ(half_mu(a), 0);
    KClassXT b{};
    for (auto& x : b) x = 1;
    b[10] = 0;
    EXPECT_EQ(half_mu(b), 0);
}

TEST(W3, ZeroSum) {
    for (long p = -3; p <= 3; ++p)
        for (long q = -3; q <= 3; ++q)
            for (long r = -3; r <= 3; ++r) {
                auto v = w3(p, q, r);
                EXPECT_EQ(v[0] + v[1] + v[2] + v[3], 0);
            }
}

TEST(Ledger, AllChecksPass) {
    auto rep = verify_ledger();
    ASSERT_EQ(rep.checks.size(), 4u);
    for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
    EXPECT_TRUE(rep.all_pass());
}

TEST(Ledger, FaultInjectionIsCaught) {
    // flipping any single entry of the table must break check (ii) or (iii)
    for (int g = 0; g < kGenerators; ++g)
        for (int p = 0; p < kFixedPoints; ++p) {
            F3Table t = f3_table();
            auto& e = t[g].values[p];
            e = e == kT ? kOne : kT;
            auto rep = verify_ledger(t);
            EXPECT_FALSE(rep.checks[1].pass && rep.checks[2].pass) << t[g].name << " at point " << p;
            EXPECT_FALSE(rep.all_pass());
        }
}
