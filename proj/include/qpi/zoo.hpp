// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <string>
#include <vector>

#include "qpi/laurent.hpp"

namespace qpi::zoo {

namespace detail {
inline Matrix unit_entry(int n, int r, int c, Complex v = 1.0) {
    Matrix a = Matrix::Zero(n, n);
    a(r, c) = v;
    return a;
}
} // namespace detail

// The 3x3 block h_r(z, w); r = 0 is the model itself, r = 1 the deformed one
// with easily read parities.
inline LaurentMatrix paper_h(double r = 0.0) {
    using detail::unit_entry;
    const double c = (1 + r) / 2;
    std::vector<Term> t;
    t.push_back({{1, 1, 0}, unit_entry(3, 0, 0)});
    t.push_back({{0, 1, 0}, unit_entry(3, 0, 0)});
    t.push_back({{1, 0, 0}, unit_entry(3, 0, 1) + unit_entry(3, 1, 0)});
    t.push_back({{0, 0, 0}, unit_entry(3, 0, 1, -c) + unit_entry(3, 1, 0, -c) + unit_entry(3, 1, 1, r) +
                                unit_entry(3, 1, 2) + unit_entry(3, 2, 1)});
    t.push_back({{1, -1, 0}, unit_entry(3, 1, 1)});
    t.push_back({{0, -1, 0}, unit_entry(3, 1, 1, c)});
    t.push_back({{-1, 0, 0}, unit_entry(3, 2, 2)});
    return LaurentMatrix(3, 2, std::move(t));
}

inline Matrix block_sign(int n) {
    Matrix p = Matrix::Identity(2 * n, 2 * n);
    p.bottomRightCorner(n, n) *= -1.0;
    return p;
}

inline Matrix block_swap(int n) {
    Matrix s = Matrix::Zero(2 * n, 2 * n);
    s.topRightCorner(n, n).setIdentity();
    s.bottomLeftCorner(n, n).setIdentity();
    return s;
}

inline LaurentMatrix paper_H(double r = 0.0) { return chiral_hamiltonian(paper_h(r)); }

inline SymmetryData paper_symmetry() { return SymmetryData(block_swap(3), block_sign(3)); }

inline LaurentMatrix paper_epsilon(int nvars = 2) { return LaurentMatrix::constant(block_swap(3), nvars); }

inline Family3D paper_suspension() { return suspend(paper_H(), paper_symmetry(), paper_epsilon()); }

// Hopping patterns used by the random models: on-site plus nearest and
// next-nearest neighbours.
inline const std::vector<Exponent>& random_hops() {
    static const std::vector<Exponent> hops{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                            {0, -1, 0}, {1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0}};
    return hops;
}

// Random off-diagonal block with Hermitian coefficients. Such an h makes
// [[0, h*], [h, 0]] chiral under diag(1, -1) and inversion symmetric under the
// block swap. With base = true the block is a perturbation of the paper model.
inline LaurentMatrix random_h(std::uint64_t seed, int n, double amplitude, bool base) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto herm = [&](double scale) {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = Complex(u(gen), u(gen));
        return Matrix(scale * 0.5 * (a + a.adjoint()));
    };
    std::vector<Term> terms;
    for (const auto& k : random_hops()) terms.push_back({k, herm(amplitude)});
    LaurentMatrix h(n, 2, std::move(terms));
    if (base) {
        if (n != 3) fail(ErrorKind::DimensionMismatch, "paper base needs n = 3");
        return paper_h() + h;
    }
    // a massive diagonal term keeps the random part gapped most of the time
    Matrix mass = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) mass(i, i) = (i % 2 ? -1.0 : 1.0) * (1.0 + 0.5 * u(gen));
    return h + LaurentMatrix::constant(mass, 2);
}

} // namespace qpi::zoo
