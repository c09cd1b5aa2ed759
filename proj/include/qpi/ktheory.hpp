// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact bookkeeping for the equivariant K-theory of the 3-torus with the
// inversion action. Everything here is integer arithmetic.

#include <array>
#include <string>
#include <vector>

#include "qpi/errors.hpp"

namespace qpi::k {

// a + b t in Z[t]/(t^2 - 1)
struct RElement {
    long a = 0;
    long b = 0;

    friend RElement operator+(RElement x, RElement y) { return {x.a + y.a, x.b + y.b}; }
    friend RElement operator-(RElement x, RElement y) { return {x.a - y.a, x.b - y.b}; }
    friend RElement operator*(RElement x, RElement y) { return {x.a * y.a + x.b * y.b, x.a * y.b + x.b * y.a}; }
    friend RElement operator*(long s, RElement x) { return {s * x.a, s * x.b}; }
    friend bool operator==(RElement, RElement) = default;

    std::string str() const {
        if (b == 0) return std::to_string(a);
        std::string tb = b == 1 ? "t" : b == -1 ? "-t" : std::to_string(b) + "t";
        if (a == 0) return tb;
        return std::to_string(a) + (b > 0 ? "+" : "") + tb;
    }
};

inline constexpr RElement kOne{1, 0};
inline constexpr RElement kT{0, 1};

inline constexpr int kFixedPoints = 8;
inline constexpr int kGenerators = 12;
inline constexpr int kXGenerators = 13;

using F3Values = std::array<RElement, kFixedPoints>;

// Fixed points (i, j, k) in table column order.
inline const std::array<std::array<int, 3>, kFixedPoints>& fixed_points_3d() {
    static const std::array<std::array<int, 3>, kFixedPoints> p{
        {{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {-1, -1, 1}, {1, 1, -1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}}};
    return p;
}

struct F3Row {
    std::string name;
    std::string forgetful;  // the non-equivariant part, carried only as a label
    F3Values values;
};

using F3Table = std::array<F3Row, kGenerators>;

namespace detail {
inline F3Values row(const char* pattern) {
    F3Values v;
    for (int i = 0; i < kFixedPoints; ++i) v[i] = pattern[i] == 't' ? kT : kOne;
    return v;
}
} // namespace detail

// Basis order: C0, C1, H12, H23, H13, C1H12, C1H23, C1H13, L1, L2, L3, H12L3.
inline const F3Table& f3_table() {
    using detail::row;
    static const F3Table t{{
        {"C0", "C", row("11111111")},
        {"C1", "C", row("tttttttt")},
        {"H12", "H12", row("t111t111")},
        {"H23", "H23", row("tt111111")},
        {"H13", "H13", row("t1t11111")},
        {"C1H12", "H12", row("1ttt1ttt")},
        {"C1H23", "H23", row("11tttttt")},
        {"C1H13", "H13", row("1t1ttttt")},
        {"L1", "C", row("t1t1t1t1")},
        {"L2", "C", row("tt11tt11")},
        {"L3", "C", row("tttt1111")},
        {"H12L3", "H12", row("1tttt111")},
    }};
    return t;
}

enum Generator { C0, C1, H12, H23, H13, C1H12, C1H23, C1H13, L1, L2, L3, H12L3 };

using KClassT3 = std::array<long, kGenerators>;
using KClassXT = std::array<long, kXGenerators>;

inline KClassT3 basis(Generator g) {
    KClassT3 c{};
    c[g] = 1;
    return c;
}

inline KClassT3 operator+(KClassT3 x, const KClassT3& y) {
    for (int i = 0; i < kGenerators; ++i) x[i] += y[i];
    return x;
}
inline KClassT3 operator-(KClassT3 x, const KClassT3& y) {
    for (int i = 0; i < kGenerators; ++i) x[i] -= y[i];
    return x;
}
inline KClassT3 operator*(long s, KClassT3 x) {
    for (auto& v : x) v *= s;
    return x;
}

inline F3Values f3(const KClassT3& c, const F3Table& table = f3_table()) {
    F3Values out{};
    for (int g = 0; g < kGenerators; ++g)
        if (c[g] != 0)
            for (int p = 0; p < kFixedPoints; ++p) out[p] = out[p] + c[g] * table[g].values[p];
    return out;
}

inline int mod4(long v) { return int(((v % 4) + 4) % 4); }

// minus the total number of sign representations, mod 4
inline int mu_of(const F3Values& v) {
    long s = 0;
    for (const auto& e : v) s += e.b;
    return mod4(-s);
}

inline int mu3d_ledger(const KClassT3& c, const F3Table& table = f3_table()) { return mu_of(f3(c, table)); }

// Products of the lower case classes 1 - X, expanded in the generator basis with
// t (1 - H) = C1 - C1 H and (1 - H12)(1 - L3) = C0 - H12 - L3 + H12 L3.
inline KClassT3 lower(Generator g) { return basis(C0) - basis(g); }
inline KClassT3 one_minus_t_times_lower(Generator h) {
    const Generator th = h == H12 ? C1H12 : h == H23 ? C1H23 : C1H13;
    return lower(h) - (basis(C1) - basis(th));
}

// Images of x_1..x_13 under psi_1 phi_1.
inline KClassT3 psi_phi_image(int i) {
    switch (i) {
    case 1: return basis(C0);
    case 2: return basis(C1);
    case 3: return lower(L1);
    case 5: return lower(L2);
    case 7: return one_minus_t_times_lower(H12);
    case 8: return lower(L3);
    case 9: return one_minus_t_times_lower(H13);
    case 10: return one_minus_t_times_lower(H23);
    case 11: return basis(C0) - basis(H12) - basis(L3) + basis(H12L3);
    case 4:
    case 6:
    case 12:
    case 13: return KClassT3{};
    }
    fail(ErrorKind::IndexOutOfRange, "generator index must be in 1..13");
}

// half of the indicator of sum a_i x_i; only defined mod 2
inline int half_mu(const KClassXT& a, const F3Table& table = f3_table()) {
    long s = 0;
    for (int i = 1; i <= kXGenerators; ++i) {
        const int m = mu3d_ledger(psi_phi_image(i), table);
        if (m % 2) fail(ErrorKind::SymmetryError, "indicator of a generator is odd");
        s += a[i - 1] * (m / 2);
    }
    return int(((s % 2) + 2) % 2);
}

// W3(p, q, r): boundary invariants of the four corners
inline std::array<long, 4> w3(long p, long q, long r) { return {p + q, -q + r, -r, -p}; }

struct LedgerCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct LedgerReport {
    std::vector<LedgerCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
};

inline std::string values_str(const F3Values& v) {
    std::string s;
    for (int i = 0; i < kFixedPoints; ++i) s += (i ? " " : "") + v[i].str();
    return s;
}

inline LedgerReport verify_ledger(const F3Table& table = f3_table()) {
    LedgerReport rep;
    // (i) the three product classes agree and sit at a single fixed point
    {
        // F3 is a ring map, so products restrict pointwise
        const F3Values expanded = f3(psi_phi_image(11), table);
        F3Values fa{}, fb{}, fc{};
        for (int p = 0; p < kFixedPoints; ++p) {
            fa[p] = (kOne - table[H12].values[p]) * (kOne - table[L3].values[p]);
            fb[p] = (kOne - table[H13].values[p]) * (kOne - table[L2].values[p]);
            fc[p] = (kOne - table[H23].values[p]) * (kOne - table[L1].values[p]);
        }
        F3Values want{};
        want[0] = RElement{2, -2};
        const bool ok = fa == expanded && fa == fb && fb == fc && fa == want;
        rep.checks.push_back({"product classes share fixed-point data", ok,
                              values_str(fa) + " | " + values_str(fb) + " | " + values_str(fc)});
    }
    // (ii) indicator on the generators
    {
        bool ok = true;
        std::string d;
        for (int g = 0; g < kGenerators; ++g) {
            const int m = mu_of(table[g].values);
            ok = ok && (m == 0 || m == 2);
            d += table[g].name + "=" + std::to_string(m) + (g + 1 < kGenerators ? " " : "");
        }
        rep.checks.push_back({"indicator is 0 or 2 on every generator", ok, d});
    }
    // (iii) indicator on the images of x_i
    {
        bool ok = true;
        std::string d;
        for (int i = 1; i <= kXGenerators; ++i) {
            const int m = mu3d_ledger(psi_phi_image(i), table);
            ok = ok && m == (i == 11 ? 2 : 0);
            d += "x" + std::to_string(i) + "=" + std::to_string(m) + (i < kXGenerators ? " " : "");
        }
        rep.checks.push_back({"indicator of psi phi (x_i) is 2 exactly at x_11", ok, d});
    }
    // (iv) boundary arithmetic over a test lattice
    {
        bool ok = true;
        long tried = 0;
        std::string d;
        for (long p = -3; p <= 3; ++p)
            for (long q = -3; q <= 3; ++q)
                for (long r = -3; r <= 3; ++r)
                    for (long a11 = -3; a11 <= 3; ++a11)
                        for (long a12 = -3; a12 <= 3; ++a12) {
                            if (a11 + 2 * a12 != p + r) continue;
                            ++tried;
                            const auto v = w3(p, q, r);
                            const bool zero = v[0] + v[1] + v[2] + v[3] == 0;
                            const bool parity = ((a11 - (v[0] + v[1])) % 2) == 0;
                            KClassXT a{};
                            a[10] = a11;
                            a[11] = a12;
                            bool half = false;
                            try {
                                half = half_mu(a, table) == int(((a11 % 2) + 2) % 2);
                            } catch (const Error&) {
                            }
                            if (!(zero && parity && half)) {
                                if (ok) d = "first failure at p,q,r,a11,a12 = " + std::to_string(p) + "," +
                                            std::to_string(q) + "," + std::to_string(r) + "," +
                                            std::to_string(a11) + "," + std::to_string(a12);
                                ok = false;
                            }
                        }
        if (ok) d = std::to_string(tried) + " lattice points";
        rep.checks.push_back({"boundary arithmetic matches the indicator mod 2", ok, d});
    }
    return rep;
}

} // namespace qpi::k
