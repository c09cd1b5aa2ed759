// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qpi/bulk.hpp"
#include "qpi/gap.hpp"
#include "qpi/laurent.hpp"
#include "qpi/linalg.hpp"
#include "qpi/parallel.hpp"

namespace qpi {

inline constexpr std::array<char, 4> kCorners{'a', 'b', 'c', 'd'};

inline int corner_slot(char j) {
    switch (j) {
    case 'a': return 0;
    case 'b': return 1;
    case 'c': return 2;
    case 'd': return 3;
    }
    fail(ErrorKind::IndexOutOfRange, std::string("corner label must be a, b, c or d, got ") + j);
}

// Symbol seen from corner j with the physical corner moved to the origin:
// b mirrors x, c mirrors both, d mirrors y.
inline LaurentMatrix corner_symbol(const LaurentMatrix& h, char j) {
    switch (corner_slot(j)) {
    case 1: return h.flip_variable(0);
    case 2: return h.flip_variable(0).flip_variable(1);
    case 3: return h.flip_variable(1);
    default: return h;
    }
}

struct QuarterTruncation {
    char corner = 'a';
    int L = 0;
    int n = 0;
    int hopping = 1;
    SparseMatrix matrix;

    int site(int x, int y) const { return x + L * y; }
    int dim() const { return n * L * L; }
    // blocks of whole rows of sites, wide enough for the y hopping
    BlockTridiagonal blocks() const { return BlockTridiagonal::from_sparse(matrix, n * L * hopping); }
};

// Compression of the 2-variable symbol onto an L x L corner of the quadrant.
inline QuarterTruncation truncate(const LaurentMatrix& h, char j, int L) {
    if (h.nvars() != 2) fail(ErrorKind::DimensionMismatch, "quarter truncation needs a 2-variable symbol");
    const int range = h.hopping_range();
    if (4 * range >= L) fail(ErrorKind::RangeTooLarge, "hopping range must stay below L/4");
    QuarterTruncation q;
    q.corner = j;
    q.L = L;
    q.n = h.size();
    q.hopping = std::max(1, range);
    const LaurentMatrix f = corner_symbol(h, j);
    const int n = q.n;
    std::vector<Eigen::Triplet<Complex>> trip;
    for (const auto& t : f.terms()) {
        const int kx = t.exp[0], ky = t.exp[1];
        for (int y = 0; y < L; ++y) {
            const int y2 = y + ky;
            if (y2 < 0 || y2 >= L) continue;
            for (int x = 0; x < L; ++x) {
                const int x2 = x + kx;
                if (x2 < 0 || x2 >= L) continue;
                const int r = q.site(x2, y2) * n, c = q.site(x, y) * n;
                for (int b = 0; b < n; ++b)
                    for (int a = 0; a < n; ++a)
                        if (t.coeff(a, b) != Complex{}) trip.emplace_back(r + a, c + b, t.coeff(a, b));
            }
        }
    }
    q.matrix.resize(q.dim(), q.dim());
    q.matrix.setFromTriplets(trip.begin(), trip.end());
    return q;
}

// Diagonal weights selecting sites within `radius` of the physical corner.
inline Eigen::VectorXd corner_mask(const QuarterTruncation& q, double radius) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(q.dim());
    for (int y = 0; y < q.L; ++y)
        for (int x = 0; x < q.L; ++x)
            if (std::hypot(double(x), double(y)) <= radius) m.segment(q.site(x, y) * q.n, q.n).setOnes();
    return m;
}

// Chiral operator extended over all sites.
inline Eigen::VectorXcd chiral_diagonal(const Matrix& pi, int sites) {
    if (!pi.isDiagonal(1e-12)) fail(ErrorKind::SymmetryError, "chiral operator must be diagonal in the orbital basis");
    Eigen::VectorXcd d(pi.rows() * sites);
    for (int s = 0; s < sites; ++s) d.segment(s * pi.rows(), pi.rows()) = pi.diagonal();
    return d;
}

// Bulk gap over a torus grid.
inline double torus_gap(const LaurentMatrix& h, int grid = 32) {
    double g = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            g = std::min(g, min_abs_eigenvalue(h(unit(2 * std::numbers::pi * (i + 0.5) / grid),
                                                 unit(2 * std::numbers::pi * (j + 0.5) / grid))));
    return g;
}

struct CornerOptions {
    int L = 24;
    int L_step = 8;
    double zero_tol = 1e-4;        // relative to the bulk gap
    double loc_fraction = 0.6;
    double loc_radius = 1.0 / 3;   // in units of L
    double integer_guard = 0.1;
    bool check_stability = true;
};

struct CornerSample {
    int L = 0;
    int kernel_dim = 0;                 // near-zero modes anywhere in the truncation
    std::vector<double> energies;
    std::vector<double> weights;        // corner weight of each mode of the localized frame
    int localized = 0;
    double trace = 0;                   // Tr(Pi) over the localized modes
    int index = 0;
};

struct CornerResult {
    char corner = 'a';
    int index = 0;
    std::vector<CornerSample> samples;
};

namespace detail {

// Splits a set of orthonormal vectors into a corner-localized part and the rest
// by diagonalizing the corner weight within their span.
struct LocalizedFrame {
    Matrix vectors;                   // columns, ordered by decreasing weight
    Eigen::VectorXd weights;
};

inline LocalizedFrame localize(const Matrix& v, const Eigen::VectorXd& mask) {
    LocalizedFrame f;
    if (v.cols() == 0) return f;
    Matrix w = v.adjoint() * mask.asDiagonal() * v;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (w + w.adjoint()));
    const int m = int(v.cols());
    f.vectors.resize(v.rows(), m);
    f.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        f.vectors.col(i) = v * es.eigenvectors().col(m - 1 - i);
        f.weights[i] = es.eigenvalues()[m - 1 - i];
    }
    return f;
}

} // namespace detail

inline CornerSample corner_sample(const LaurentMatrix& h, const Matrix& pi, char j, int L, double gap,
                                  const CornerOptions& opt) {
    CornerSample s;
    s.L = L;
    QuarterTruncation q = truncate(h, j, L);
    const double tol = opt.zero_tol * gap;
    BlockTridiagonal bt = q.blocks();
    s.kernel_dim = bt.count_in(-tol, tol);
    if (s.kernel_dim == 0) return s;
    Eigenpairs ep = nearest_zero_eigenpairs(q.matrix, s.kernel_dim, 0.1 * tol, 1e-9 * std::max(1.0, gap));
    s.energies = ep.values;
    for (double e : ep.values)
        if (std::abs(e) > tol) fail(ErrorKind::UnstableCount, "near-zero eigenpairs disagree with the inertia count");
    auto frame = detail::localize(ep.vectors, corner_mask(q, opt.loc_radius * L));
    Eigen::VectorXcd pd = chiral_diagonal(pi, L * L);
    for (int i = 0; i < frame.weights.size(); ++i) {
        s.weights.push_back(frame.weights[i]);
        if (frame.weights[i] < opt.loc_fraction) continue;
        ++s.localized;
        s.trace += (frame.vectors.col(i).adjoint() * pd.asDiagonal() * frame.vectors.col(i))(0, 0).real();
    }
    // Tr(Pi) on a localized subspace of an exact kernel is an integer
    const double r = std::round(s.trace);
    if (std::abs(s.trace - r) > opt.integer_guard)
        fail(ErrorKind::UnstableCount, "chiral trace " + std::to_string(s.trace) + " is not close to an integer");
    s.index = int(r);
    return s;
}

// Tr(Pi) on the kernel of the quarter-plane operator at corner j.
inline CornerResult corner_index(const LaurentMatrix& h, const SymmetryData& sym, char j, const CornerOptions& opt = {},
                                 const GapReport* gap = nullptr) {
    if (gap && !gap->all_invertible())
        fail(ErrorKind::GapViolation, "half-plane operators are not certified invertible");
    const Matrix& pi = sym.pi();
    const double g = torus_gap(h);
    if (g < 1e-9) fail(ErrorKind::GapViolation, "bulk gap closes");
    CornerResult r;
    r.corner = j;
    r.samples.push_back(corner_sample(h, pi, j, opt.L, g, opt));
    if (opt.check_stability) {
        r.samples.push_back(corner_sample(h, pi, j, opt.L + opt.L_step, g, opt));
        if (r.samples[0].index != r.samples[1].index)
            fail(ErrorKind::UnstableCount, std::string("corner ") + j + " index changes from L=" + std::to_string(opt.L) +
                                               " to L=" + std::to_string(opt.L + opt.L_step));
    }
    r.index = r.samples[0].index;
    return r;
}

struct BoundaryInvariants {
    std::array<int, 4> values{};
    std::array<int, 3> pqr{};
    std::string method;
    bool zero_sum = false;
    bool pairing = false;
    bool pqr_consistent = false;
};

// (p, q, r) with W3(p, q, r) = (p + q, -q + r, -r, -p)
inline BoundaryInvariants make_invariants(const std::array<int, 4>& v, std::string method) {
    BoundaryInvariants b;
    b.values = v;
    b.method = std::move(method);
    const int p = -v[3], q = v[0] + v[3], r = -v[2];
    b.pqr = {p, q, r};
    b.zero_sum = v[0] + v[1] + v[2] + v[3] == 0;
    b.pairing = v[0] == -v[2] && v[1] == -v[3];
    b.pqr_consistent = v[0] == p + q && v[1] == -q + r && v[2] == -r && v[3] == -p;
    return b;
}

struct SpectralFlowOptions {
    int L = 16;
    int theta_samples = 128;
    double window = 0;            // 0: half the smallest certified surface gap, else half the bulk gap
    double min_overlap = 0.7;
    double loc_fraction = 0.6;
    double loc_radius = 1.0 / 3;
    double degeneracy = 1e-8;
    bool reverse = false;         // traverse theta in the opposite direction
};

struct Crossing {
    double theta = 0;             // midpoint of the bracketing samples
    int direction = 0;            // +1 upward
    double weight = 0;            // corner weight of the branch
};

struct SpectralFlowResult {
    char corner = 'a';
    int flow = 0;
    std::vector<Crossing> crossings;
    int theta_samples = 0;
    double window = 0;
    double min_overlap_seen = 1;
};

namespace detail {

struct WindowStates {
    std::vector<double> energies;
    Matrix vectors;
    Eigen::VectorXd weights;
    int below = 0;                // negative eigenvalues of the whole truncation
};

inline WindowStates window_states(const QuarterTruncation& q, double window, const Eigen::VectorXd& mask,
                                  double degeneracy) {
    WindowStates w;
    BlockTridiagonal bt = q.blocks();
    w.below = bt.count_below(0.0);
    const int m = bt.count_in(-window, window);
    if (m == 0) {
        w.vectors.resize(q.dim(), 0);
        return w;
    }
    Eigenpairs ep = nearest_zero_eigenpairs(q.matrix, m, 1e-3 * window, 1e-9);
    w.vectors = ep.vectors;
    w.energies = ep.values;
    // inside degenerate clusters pick the frame that separates corners
    for (int i = 0; i < m;) {
        int k = i + 1;
        while (k < m && w.energies[k] - w.energies[k - 1] < degeneracy) ++k;
        if (k - i > 1) {
            auto f = localize(w.vectors.middleCols(i, k - i), mask);
            w.vectors.middleCols(i, k - i) = f.vectors;
        }
        i = k;
    }
    w.weights.resize(m);
    for (int i = 0; i < m; ++i) w.weights[i] = (mask.asDiagonal() * w.vectors.col(i)).squaredNorm();
    return w;
}

} // namespace detail

// Signed count of corner-localized branches crossing zero as theta runs once
// around the circle; +1 for a branch moving upward.
inline SpectralFlowResult spectral_flow(const Family3D& fam, char j, const SpectralFlowOptions& opt = {},
                                        const GapReport* gap = nullptr) {
    if (gap && !gap->all_invertible())
        fail(ErrorKind::GapViolation, "surface operators are not certified invertible");
    double window = opt.window;
    if (window <= 0) {
        window = gap ? 0.5 * std::min({gap->entries[0].min_singular, gap->entries[1].min_singular,
                                       gap->entries[2].min_singular, gap->entries[3].min_singular})
                     : 0.5 * torus_gap(fam.slice(0.0));
    }
    for (int samples = opt.theta_samples, attempt = 0; attempt < 3; ++attempt, samples *= 2) {
        SpectralFlowResult r;
        r.corner = j;
        r.theta_samples = samples;
        r.window = window;
        std::vector<double> thetas(samples);
        for (int k = 0; k < samples; ++k) {
            double t = -std::numbers::pi + 2 * std::numbers::pi * (k + 0.5) / samples;
            thetas[k] = opt.reverse ? -t : t;
        }
        std::vector<detail::WindowStates> states(samples);
        Eigen::VectorXd mask;
        {
            QuarterTruncation q0 = truncate(fam.slice(thetas[0]), j, opt.L);
            mask = corner_mask(q0, opt.loc_radius * opt.L);
        }
        parallel_for(samples, [&](int k) {
            states[k] = detail::window_states(truncate(fam.slice(thetas[k]), j, opt.L), window, mask, opt.degeneracy);
        });
        bool lost = false;
        for (int k = 0; k < samples && !lost; ++k) {
            const auto& a = states[k];
            const auto& b = states[(k + 1) % samples];
            const int ma = int(a.energies.size()), mb = int(b.energies.size());
            Matrix ov = ma && mb ? Matrix(a.vectors.adjoint() * b.vectors) : Matrix(ma, mb);
            std::vector<bool> used(mb, false);
            int net = 0;
            for (int i = 0; i < ma; ++i) {
                int best = -1;
                double bo = 0;
                for (int c = 0; c < mb; ++c)
                    if (!used[c] && std::norm(ov(i, c)) > bo) {
                        bo = std::norm(ov(i, c));
                        best = c;
                    }
                // branches near the window edge may leave it; inner ones must be followed
                const bool inner = std::abs(a.energies[i]) < 0.5 * window;
                if (best < 0 || bo < opt.min_overlap) {
                    if (inner) lost = true;
                    continue;
                }
                if (inner) r.min_overlap_seen = std::min(r.min_overlap_seen, bo);
                used[best] = true;
                const double e0 = a.energies[i], e1 = b.energies[best];
                if ((e0 < 0) == (e1 < 0)) continue;
                net += e1 > e0 ? 1 : -1;
                const double wgt = std::max(a.weights[i], b.weights[best]);
                if (wgt < opt.loc_fraction) continue;
                double mid = 0.5 * (thetas[k] + thetas[(k + 1) % samples]);
                if (k + 1 == samples) mid = opt.reverse ? -std::numbers::pi : std::numbers::pi;
                r.crossings.push_back({mid, e1 > e0 ? 1 : -1, wgt});
                r.flow += e1 > e0 ? 1 : -1;
            }
            // a branch that jumps across the whole window between samples is
            // invisible to the matching but still moves the inertia
            if (net != a.below - b.below) lost = true;
        }
        if (!lost) return r;
    }
    fail(ErrorKind::TrackingLost, "eigenvalue branches could not be matched after refining the theta grid");
}

} // namespace qpi
