// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qpi/laurent.hpp"
#include "qpi/linalg.hpp"
#include "qpi/parallel.hpp"
#include "qpi/wienerhopf.hpp"

namespace qpi {

struct GapOptions {
    int frozen_samples = 64;
    std::vector<int> section_sizes{64, 128, 256};
    double singular_floor = 1e-3;
    double stabilization_band = 0.2;
    double relative_precision = 0.05;
    int theta_samples = 64;
    int circle_grid = 64;  // bulk gap estimate per frozen momentum
    WindingOptions winding{};
};

struct GapEntry {
    int label = 0;
    bool invertible = false;
    bool undecided = false;
    double min_singular = std::numeric_limits<double>::infinity();
    std::vector<int> section_sizes;
    int frozen_samples = 0;
    int theta_samples = 0;
    double worst_momentum = 0;
    double worst_theta = 0;
    std::string note;
};

struct GapReport {
    std::vector<GapEntry> entries;
    bool all_invertible() const {
        return !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const GapEntry& e) { return e.invertible; });
    }
    bool undecided() const {
        return std::any_of(entries.begin(), entries.end(), [](const GapEntry& e) { return e.undecided; });
    }
    const GapEntry& entry(int label) const {
        for (const auto& e : entries)
            if (e.label == label) return e;
        fail(ErrorKind::IndexOutOfRange, "no gap entry for label " + std::to_string(label));
    }
};

// The 1-variable symbol of the half-line operator across edge `label` at frozen
// transverse momentum angle: 1 free z, 2 free w, 3 and 4 the mirrored halves.
inline LaurentMatrix edge_symbol(const LaurentMatrix& h, int label, double angle) {
    if (h.nvars() != 2) fail(ErrorKind::DimensionMismatch, "edge symbols need a 2-variable symbol");
    if (label < 1 || label > 4) fail(ErrorKind::IndexOutOfRange, "edge label must be 1..4");
    const bool zfree = label == 1 || label == 3;
    LaurentMatrix f = h.fix_variable(zfree ? 1 : 0, unit(angle));
    return label >= 3 ? f.flip_variable(0) : f;
}

struct CircleGap {
    double gap = std::numeric_limits<double>::infinity();
    double angle = 0;
    Vector vector;  // eigenvector of the eigenvalue nearest zero at `angle`
};

// Smallest |eigenvalue| of a Hermitian f over a uniform circle grid.
inline CircleGap circle_gap_point(const LaurentMatrix& f, int grid) {
    CircleGap c;
    for (int j = 0; j < grid; ++j) {
        const double a = 2 * std::numbers::pi * j / grid;
        Matrix v = f(unit(a));
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (v + v.adjoint()));
        Eigen::Index k;
        double g = es.eigenvalues().cwiseAbs().minCoeff(&k);
        if (g < c.gap) {
            c.gap = g;
            c.angle = a;
            c.vector = es.eigenvectors().col(k);
        }
    }
    return c;
}

inline double circle_gap(const LaurentMatrix& f, int grid) { return circle_gap_point(f, grid).gap; }

// ||T v|| / ||v|| for a windowed plane wave v; bounds the smallest |eigenvalue|
// of the Hermitian section T_s(f) from above.
inline double plane_wave_bound(const LaurentMatrix& f, int blocks, double angle, const Vector& u) {
    const int n = f.size();
    const Complex z = unit(angle);
    std::vector<Vector> v(blocks);
    double vn = 0;
    for (int j = 0; j < blocks; ++j) {
        v[j] = std::sin(std::numbers::pi * (j + 1) / (blocks + 1)) * ipow(std::conj(z), j) * u;
        vn += v[j].squaredNorm();
    }
    double tn = 0;
    for (int i = 0; i < blocks; ++i) {
        Vector acc = Vector::Zero(n);
        for (const auto& t : f.terms()) {
            const int j = i - t.exp[0];
            if (j >= 0 && j < blocks) acc += t.coeff * v[j];
        }
        tn += acc.squaredNorm();
    }
    return std::sqrt(tn / vn);
}

struct SectionGap {
    std::vector<double> sigma;  // per requested size
    std::vector<int> excluded;  // far-end zero modes left out of sigma
    double bulk = 0;
    bool hermitian = true;
    bool certified = false;  // sigma holds lower bounds from the two-probe certificate
};

namespace detail {

// Smallest |eigenvalue| of the leading sections of a Hermitian block Toeplitz
// matrix, by bisection on inertia counts. `skip[s]` eigenvalues nearest zero are
// ignored for size s.
inline std::vector<double> section_sigmas(const BlockTridiagonal& bt, const std::vector<int>& prefix,
                                          const std::vector<int>& skip, double guess, double upper, double rel,
                                          double floor) {
    const size_t S = prefix.size();
    std::vector<double> lo(S, 0.0), hi(S, std::numeric_limits<double>::infinity());
    auto probe = [&](double a) {
        auto up = bt.counts_below(a), dn = bt.counts_below(-a);
        for (size_t s = 0; s < S; ++s) {
            if (a <= lo[s] || a >= hi[s]) continue;
            int inside = up[prefix[s]] - dn[prefix[s]];
            (inside > skip[s] ? hi[s] : lo[s]) = a;
        }
    };
    if (guess > 0) probe(0.95 * guess);
    for (double a = guess > 0 ? 1.25 * guess : 1e-6 * upper + 1e-300;; a *= 2) {
        probe(a);
        if (std::all_of(hi.begin(), hi.end(), [](double x) { return std::isfinite(x); })) break;
        if (a > 4 * upper) {
            for (size_t s = 0; s < S; ++s)
                if (!std::isfinite(hi[s])) hi[s] = a;
            break;
        }
    }
    for (int it = 0; it < 200; ++it) {
        int worst = -1;
        double width = 0;
        for (size_t s = 0; s < S; ++s) {
            double w = hi[s] - lo[s];
            bool done = w <= rel * hi[s] || hi[s] < 0.5 * floor;
            if (!done && w > width) {
                width = w;
                worst = int(s);
            }
        }
        if (worst < 0) break;
        probe(0.5 * (lo[worst] + hi[worst]));
    }
    return hi;
}

} // namespace detail

// Stabilized smallest |eigenvalue| (singular value for non-Hermitian f) of the
// finite sections of T+_f at the requested sizes. With certify_only a cheap
// bracket replaces the bisection whenever it already proves stability.
inline SectionGap section_gap(const LaurentMatrix& f, const GapOptions& opt, bool certify_only = false) {
    SectionGap out;
    const int n = f.size();
    out.hermitian = check_hermitian_on_torus(f).ok;
    const CircleGap cg = out.hermitian ? circle_gap_point(f, opt.circle_grid) : CircleGap{};
    out.bulk = out.hermitian ? cg.gap : 0.0;
    const auto& sizes = opt.section_sizes;
    out.excluded.assign(sizes.size(), 0);

    if (!out.hermitian) {
        for (int s : sizes) out.sigma.push_back(min_singular_value(Matrix(toeplitz_section(f, s))));
        return out;
    }
    if (f.is_constant()) {
        double g = min_abs_eigenvalue(f.coefficient({0, 0, 0}));
        out.sigma.assign(sizes.size(), g);
        return out;
    }
    const int d = std::max(1, f.hopping_range());
    const int nmax = *std::max_element(sizes.begin(), sizes.end());
    const int blocks = ((nmax + d - 1) / d) * d;
    SparseMatrix t = toeplitz_section(f, blocks);
    BlockTridiagonal bt = BlockTridiagonal::from_sparse(t, n * d);
    std::vector<int> prefix;
    for (int s : sizes) {
        if (s % d) fail(ErrorKind::DimensionMismatch, "section sizes must be multiples of the hopping range");
        prefix.push_back(s / d - 1);
    }
    double upper = 0;
    for (const auto& term : f.terms()) upper += term.coeff.norm();
    if (certify_only && out.bulk > opt.singular_floor) {
        // No eigenvalue in (-lo, lo) plus a plane-wave bound below hi brackets
        // every size inside [lo, hi), which already proves stabilization.
        const double lo = 0.95 * out.bulk, hi = lo / (1 - opt.stabilization_band);
        bool ok = true;
        for (int sz : sizes) ok = ok && plane_wave_bound(f, sz, cg.angle, cg.vector) < hi;
        if (ok) {
            auto a = bt.counts_below(lo), b = bt.counts_below(-lo);
            for (int p : prefix) ok = ok && a[p] == b[p];
        }
        if (ok) {
            out.sigma.assign(sizes.size(), lo);
            out.certified = true;
            return out;
        }
    }
    out.sigma = detail::section_sigmas(bt, prefix, out.excluded, out.bulk, upper, opt.relative_precision,
                                       opt.singular_floor);

    // Near-zero modes at the far end of a section belong to the opposite edge.
    bool small = std::any_of(out.sigma.begin(), out.sigma.end(), [&](double s) { return s < opt.singular_floor; });
    if (!small) return out;
    for (size_t s = 0; s < sizes.size(); ++s) {
        SparseMatrix ts = toeplitz_section(f, sizes[s]);
        BlockTridiagonal b2 = BlockTridiagonal::from_sparse(ts, n * d);
        int m = b2.count_in(-opt.singular_floor, opt.singular_floor);
        if (m == 0) continue;
        Eigenpairs ep = nearest_zero_eigenpairs(ts, m, 1e-3 * opt.singular_floor, 1e-8);
        const int half = (sizes[s] / 2) * n;
        int far = 0;
        for (int j = 0; j < m; ++j)
            if (ep.vectors.col(j).head(half).squaredNorm() < 0.25) ++far;
        out.excluded[s] = far;
    }
    if (std::any_of(out.excluded.begin(), out.excluded.end(), [](int e) { return e > 0; }))
        out.sigma = detail::section_sigmas(bt, prefix, out.excluded, out.bulk, upper, opt.relative_precision,
                                           opt.singular_floor);
    return out;
}

// Verdict for one frozen momentum: 1 invertible, 0 not invertible, -1 undecided.
struct MomentumVerdict {
    int verdict = 0;
    double sigma = 0;
    std::string note;
};

inline MomentumVerdict judge_edge_symbol(const LaurentMatrix& f, const GapOptions& opt, bool certify_only = false) {
    MomentumVerdict v;
    try {
        int w = winding_det(f, opt.winding);
        if (w != 0) {
            v.note = "det winding " + std::to_string(w);
            return v;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularOnCircle) throw;
        v.note = "bulk gap closes";
        return v;
    }
    SectionGap sg = section_gap(f, opt, certify_only);
    if (sg.certified) {
        v.verdict = 1;
        v.sigma = sg.sigma.back();
        return v;
    }
    const size_t S = sg.sigma.size();
    const double a = sg.sigma[S >= 2 ? S - 2 : 0], b = sg.sigma[S - 1];
    v.sigma = b;
    const double fl = opt.singular_floor;
    if (a > fl && b > fl && std::abs(a - b) <= opt.stabilization_band * std::max(a, b)) {
        v.verdict = 1;
    } else if (a <= fl && b <= fl) {
        v.verdict = 0;
        v.note = "zero mode at the boundary";
    } else {
        v.verdict = -1;
        v.note = "finite-section minimum did not stabilize";
    }
    return v;
}

// Certifies the half-plane operator across one edge by sampling the frozen momentum.
inline GapEntry half_plane_gap(const LaurentMatrix& h, int label, const GapOptions& opt = {}) {
    GapEntry e;
    e.label = label;
    e.section_sizes = opt.section_sizes;
    e.frozen_samples = opt.frozen_samples;
    const int M = opt.frozen_samples;
    std::vector<MomentumVerdict> v(M);
    parallel_for(M, [&](int m) { v[m] = judge_edge_symbol(edge_symbol(h, label, 2 * std::numbers::pi * m / M), opt, true); });
    bool any_fail = false, any_undecided = false;
    for (int m = 0; m < M; ++m) {
        const double angle = 2 * std::numbers::pi * m / M;
        if (v[m].sigma < e.min_singular) {
            e.min_singular = v[m].sigma;
            e.worst_momentum = angle;
        }
        if (v[m].verdict == 0 && !any_fail) {
            any_fail = true;
            e.note = v[m].note + " at momentum " + std::to_string(angle);
        }
        if (v[m].verdict == -1 && !any_fail && !any_undecided) e.note = v[m].note + " at momentum " + std::to_string(angle);
        any_undecided = any_undecided || v[m].verdict == -1;
    }
    // the reported minimum comes from a full bisection at the worst momentum
    if (!any_fail && !any_undecided) {
        MomentumVerdict best = judge_edge_symbol(edge_symbol(h, label, e.worst_momentum), opt, false);
        e.min_singular = best.sigma;
        if (best.verdict != 1) {
            any_undecided = best.verdict == -1;
            any_fail = best.verdict == 0;
            e.note = best.note;
        }
    }
    e.invertible = !any_fail && !any_undecided;
    e.undecided = !any_fail && any_undecided;
    return e;
}

inline GapReport assumption_check_2d(const LaurentMatrix& h, const GapOptions& opt = {}) {
    GapReport r;
    for (int label = 1; label <= 4; ++label) r.entries.push_back(half_plane_gap(h, label, opt));
    return r;
}

// Every surface of a family over a theta grid, refined around the worst sample.
inline GapReport assumption_check_3d(const Family3D& fam, const GapOptions& opt = {}) {
    GapReport r;
    const int T = opt.theta_samples;
    std::vector<double> thetas;
    for (int k = 0; k < T; ++k) thetas.push_back(-std::numbers::pi + 2 * std::numbers::pi * k / T);
    std::vector<std::array<GapEntry, 4>> per(T);
    for (int k = 0; k < T; ++k) {
        LaurentMatrix s = fam.slice(thetas[k]);
        for (int l = 0; l < 4; ++l) per[k][l] = half_plane_gap(s, l + 1, opt);
    }
    for (int l = 0; l < 4; ++l) {
        GapEntry agg;
        agg.label = l + 1;
        agg.section_sizes = opt.section_sizes;
        agg.frozen_samples = opt.frozen_samples;
        agg.invertible = true;
        bool any_fail = false, any_undecided = false;
        int worst = 0;
        auto absorb = [&](const GapEntry& e, double theta) {
            if (e.min_singular < agg.min_singular) {
                agg.min_singular = e.min_singular;
                agg.worst_momentum = e.worst_momentum;
                agg.worst_theta = theta;
            }
            if (!e.invertible) {
                agg.invertible = false;
                any_fail = any_fail || !e.undecided;
                any_undecided = any_undecided || e.undecided;
                if (agg.note.empty()) agg.note = e.note + " at theta " + std::to_string(theta);
            }
            ++agg.theta_samples;
        };
        for (int k = 0; k < T; ++k) {
            absorb(per[k][l], thetas[k]);
            if (per[k][l].min_singular < per[worst][l].min_singular) worst = k;
        }
        for (double off : {-0.5, 0.5}) {
            double th = thetas[worst] + off * 2 * std::numbers::pi / T;
            absorb(half_plane_gap(fam.slice(th), l + 1, opt), th);
        }
        // a failure anywhere outranks an undecided sample elsewhere
        agg.undecided = !any_fail && any_undecided;
        r.entries.push_back(agg);
    }
    return r;
}

} // namespace qpi
