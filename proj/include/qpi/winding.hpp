// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qpi/boundary.hpp"
#include "qpi/laurent.hpp"
#include "qpi/parallel.hpp"
#include "qpi/wienerhopf.hpp"

namespace qpi {

// A map on a glued 3-sphere D x T  u  T x D. Patch 0 has the first coordinate in
// the disk and the second on the circle, patch 1 the reverse. Arguments are the
// patch, the disk point and the circle angle.
using GluedMap = std::function<Matrix(int patch, Complex disk, double loop)>;

struct Winding3Options {
    int radial = 24;
    int angular = 24;
    int loop = 48;
    double fd_step = 1e-5;
    double guard = 0.1;
    bool refine = true;
    bool reverse_accumulation = false;  // sum the cells backwards; used to test order independence
};

struct Winding3Result {
    double raw = 0;
    double imag = 0;     // should vanish; reported for diagnostics
    int value = 0;
    std::array<double, 2> patches{};
    int radial = 0, angular = 0, loop = 0;
    bool refined = false;
};

namespace detail {

// Tr(A_rho [A_phi, A_psi]) summed over one patch with midpoint quadrature.
inline Complex patch_integral(const GluedMap& g, int patch, const Winding3Options& o) {
    const double h = o.fd_step;
    const double dr = 1.0 / o.radial, da = 2 * std::numbers::pi / o.angular, dl = 2 * std::numbers::pi / o.loop;
    std::vector<Complex> slots(o.loop);
    parallel_for(o.loop, [&](int k) {
        const double psi = (k + 0.5) * dl;
        Complex acc{};
        for (int i = 0; i < o.radial; ++i) {
            const double rho = (i + 0.5) * dr;
            for (int j = 0; j < o.angular; ++j) {
                const double phi = (j + 0.5) * da;
                auto at = [&](double r, double a, double l) { return g(patch, std::polar(r, a), l); };
                Matrix g0 = at(rho, phi, psi);
                Eigen::PartialPivLU<Matrix> lu(g0);
                Matrix ar = lu.solve(Matrix((at(rho + h, phi, psi) - at(rho - h, phi, psi)) / (2 * h)));
                Matrix aa = lu.solve(Matrix((at(rho, phi + h, psi) - at(rho, phi - h, psi)) / (2 * h)));
                Matrix al = lu.solve(Matrix((at(rho, phi, psi + h) - at(rho, phi, psi - h)) / (2 * h)));
                acc += (ar * (aa * al - al * aa)).trace();
            }
        }
        slots[k] = acc * dr * da * dl;
    });
    Complex sum{};
    if (o.reverse_accumulation)
        for (int k = o.loop - 1; k >= 0; --k) sum += slots[k];
    else
        for (int k = 0; k < o.loop; ++k) sum += slots[k];
    return sum;
}

inline Winding3Result winding_once(const GluedMap& g, const Winding3Options& o) {
    Winding3Result r;
    r.radial = o.radial;
    r.angular = o.angular;
    r.loop = o.loop;
    const double norm = 1.0 / (8 * std::numbers::pi * std::numbers::pi);
    Complex total{};
    for (int p = 0; p < 2; ++p) {
        Complex v = patch_integral(g, p, o) * norm;
        r.patches[p] = v.real();
        total += v;
    }
    r.raw = total.real();
    r.imag = total.imag();
    r.value = int(std::lround(r.raw));
    return r;
}

} // namespace detail

// Degree (1/24 pi^2) int Tr((g^-1 dg)^3) over the glued sphere.
inline Winding3Result winding3(const GluedMap& g, const Winding3Options& opt = {}) {
    Winding3Result r = detail::winding_once(g, opt);
    auto resolved = [&](const Winding3Result& x) {
        return std::abs(x.raw - x.value) < opt.guard && std::abs(x.imag) < opt.guard;
    };
    if (resolved(r)) return r;
    if (opt.refine) {
        Winding3Options fine = opt;
        fine.radial *= 2;
        fine.angular *= 2;
        fine.loop *= 2;
        r = detail::winding_once(g, fine);
        r.refined = true;
        if (resolved(r)) return r;
    }
    fail(ErrorKind::QuadratureUnresolved, "winding integral " + std::to_string(r.raw) + " is not near an integer");
}

// Evaluates a symbol with negative powers read as conjugates, which agrees with
// the symbol on the torus and is defined on the closed disks.
inline Matrix transplant_eval(const LaurentMatrix& m, Complex z, Complex w) {
    Matrix out = Matrix::Zero(m.size(), m.size());
    const std::array<Complex, 2> x{z, w};
    for (const auto& t : m.terms()) {
        Complex c = 1.0;
        for (int v = 0; v < 2; ++v) {
            const int k = t.exp[v];
            c *= k >= 0 ? ipow(x[v], k) : ipow(std::conj(x[v]), -k);
        }
        out += c * t.coeff;
    }
    return out;
}

inline GluedMap transplant_map(LaurentMatrix m) {
    if (m.nvars() != 2) fail(ErrorKind::DimensionMismatch, "glued maps need a 2-variable symbol");
    return [m = std::move(m)](int patch, Complex disk, double loop) {
        const Complex c = unit(loop);
        return patch == 0 ? transplant_eval(m, disk, c) : transplant_eval(m, c, disk);
    };
}

// [[z, -1/w], [w, 1/z]]: on the torus this is the standard generator of the
// third homotopy group of U(2).
inline LaurentMatrix reference_symbol() {
    Matrix e00 = Matrix::Zero(2, 2), e01 = e00, e10 = e00, e11 = e00;
    e00(0, 0) = 1;
    e01(0, 1) = -1;
    e10(1, 0) = 1;
    e11(1, 1) = 1;
    return LaurentMatrix(2, 2, {{{1, 0, 0}, e00}, {{0, -1, 0}, e01}, {{0, 1, 0}, e10}, {{-1, 0, 0}, e11}});
}

inline GluedMap reference_map() { return transplant_map(reference_symbol()); }

// Sphere of the glued space belonging to each corner, as (s_z, s_w): +1 picks
// the inner disk of that variable, -1 the outer one.
inline std::array<int, 2> corner_sphere(char j) {
    static const std::array<std::array<int, 2>, 4> s{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
    return s[corner_slot(j)];
}

// Block of the extended Hamiltonian mapping the +1 eigenspace of Pi to the -1 one,
// restricted to the sphere of corner j.
inline GluedMap extension_block(const ExtendedSymbol& ext, const Matrix& pi, char j) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pi + pi.adjoint()));
    const int n = int(pi.rows());
    int neg = 0;
    while (neg < n && es.eigenvalues()[neg] < 0) ++neg;
    if (2 * neg != n) fail(ErrorKind::SymmetryError, "chiral grading must be balanced");
    Matrix um = es.eigenvectors().leftCols(neg), up = es.eigenvectors().rightCols(n - neg);
    const auto s = corner_sphere(j);
    return [&ext, um, up, s](int patch, Complex disk, double loop) {
        Matrix e = patch == 0
                       ? ext.evaluate(s[0] > 0 ? Patch::ZPlus : Patch::ZMinus, disk, s[1] * loop)
                       : ext.evaluate(s[1] > 0 ? Patch::WPlus : Patch::WMinus, disk, s[0] * loop);
        return Matrix(um.adjoint() * e * up);
    };
}

// Sign relating the winding of the extension block to the corner index; fixed
// once against the truncation computation on the reference models.
inline constexpr int kWindingSign = 1;

struct WindingInvariants {
    BoundaryInvariants invariants;
    std::array<Winding3Result, 4> spheres;
};

inline WindingInvariants winding_invariants(const LaurentMatrix& h, const SymmetryData& sym,
                                            const Winding3Options& opt = {}, const FactorizationOptions& fo = {}) {
    ExtendedSymbol ext(h, fo);
    const Matrix& pi = sym.pi();
    WindingInvariants w;
    std::array<int, 4> v{};
    for (char j : kCorners) {
        const int s = corner_slot(j);
        w.spheres[s] = winding3(extension_block(ext, pi, j), opt);
        v[s] = kWindingSign * w.spheres[s].value;
    }
    w.invariants = make_invariants(v, "winding");
    return w;
}

} // namespace qpi
