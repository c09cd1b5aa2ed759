// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qpi/laurent.hpp"
#include "qpi/linalg.hpp"

namespace qpi {

struct ParityCount {
    int n_plus = 0;
    int n_minus = 0;
    std::vector<double> occupied;  // negative eigenvalues, ascending
    int rank() const { return n_plus + n_minus; }
};

struct ParityOptions {
    double gap_threshold = 1e-9;
    double commute_tol = 1e-9;
    double rounding_guard = 1e-6;
};

// Even and odd multiplicities of the occupied (negative energy) states of a
// Hermitian matrix commuting with the inversion matrix: (rank P +- Tr I P) / 2.
inline ParityCount parity_counts(const Matrix& hval, const Matrix& inv, const ParityOptions& opt = {}) {
    if (hval.rows() != inv.rows()) fail(ErrorKind::DimensionMismatch, "inversion size differs from Hamiltonian");
    if ((hval * inv - inv * hval).norm() > opt.commute_tol)
        fail(ErrorKind::NonCommuting, "Hamiltonian does not commute with inversion at a fixed point");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hval + hval.adjoint()));
    const auto& ev = es.eigenvalues();
    int rank = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) < opt.gap_threshold) fail(ErrorKind::GaplessAtFixedPoint, "eigenvalue inside the gap");
        if (ev[i] < 0) ++rank;
    }
    const Matrix v = es.eigenvectors().leftCols(rank);
    const double tr = (v.adjoint() * inv * v).trace().real();
    const double plus = 0.5 * (rank + tr), minus = 0.5 * (rank - tr);
    if (std::abs(plus - std::round(plus)) > opt.rounding_guard || std::abs(minus - std::round(minus)) > opt.rounding_guard)
        fail(ErrorKind::NonCommuting, "parity trace is not an integer");
    std::vector<double> occ(ev.data(), ev.data() + rank);
    return {int(std::lround(plus)), int(std::lround(minus)), std::move(occ)};
}

struct FixedPointRow {
    std::vector<int> coordinates;  // +-1 per torus variable, then +-1 for theta = 0 / pi
    std::string label;
    ParityCount counts;
};

struct IndicatorReport {
    std::vector<FixedPointRow> rows;
    int mu = 0;                   // in 0..3
    std::optional<int> half_mu;   // present only when mu is 0 or 2
    std::string diagnostic;

    std::vector<int> n_minus() const {
        std::vector<int> out;
        for (const auto& r : rows) out.push_back(r.counts.n_minus);
        return out;
    }
};

namespace detail {
inline std::string point_label(const std::vector<int>& c) {
    std::string s = "(";
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ")";
}

inline void finish(IndicatorReport& r) {
    int sum = 0;
    for (const auto& row : r.rows) sum += row.counts.n_minus;
    r.mu = ((-sum) % 4 + 4) % 4;
    if (r.mu % 2 == 0)
        r.half_mu = r.mu / 2;
    else
        r.diagnostic = "indicator is odd; the inversion data is inconsistent with this symmetry class";
}

// Fixed points in the order (1,1), (-1,1), (1,-1), (-1,-1).
inline const std::array<std::array<int, 2>, 4>& fixed_points_2d() {
    static const std::array<std::array<int, 2>, 4> pts{{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
    return pts;
}
} // namespace detail

inline IndicatorReport mu2d(const LaurentMatrix& h, const SymmetryData& s, const ParityOptions& opt = {}) {
    if (h.nvars() != 2) fail(ErrorKind::DimensionMismatch, "mu2d needs a 2-variable symbol");
    IndicatorReport r;
    for (const auto& p : detail::fixed_points_2d()) {
        FixedPointRow row;
        row.coordinates = {p[0], p[1]};
        row.label = detail::point_label(row.coordinates);
        row.counts = parity_counts(h(double(p[0]), double(p[1])), s.inversion, opt);
        r.rows.push_back(row);
    }
    detail::finish(r);
    return r;
}

// Eight fixed points: the 2d ones at theta = 0, then at theta = pi.
inline IndicatorReport mu3d(const Family3D& fam, const SymmetryData& s, const ParityOptions& opt = {}) {
    IndicatorReport r;
    for (int t = 0; t < 2; ++t) {
        const LaurentMatrix slice = fam.slice(Family3D::fixed_thetas[t]);
        for (const auto& p : detail::fixed_points_2d()) {
            FixedPointRow row;
            row.coordinates = {p[0], p[1], t == 0 ? 1 : -1};
            row.label = detail::point_label(row.coordinates);
            row.counts = parity_counts(slice(double(p[0]), double(p[1])), s.inversion, opt);
            r.rows.push_back(row);
        }
    }
    detail::finish(r);
    return r;
}

struct HomotopySample {
    double r = 0;
    IndicatorReport report;
};

struct HomotopyScan {
    std::vector<HomotopySample> samples;
    bool constant = true;
};

// Indicator along a path of symbols; any change of mu between samples is flagged.
template <class Path>
HomotopyScan homotopy_scan(Path&& path, const SymmetryData& s, const std::vector<double>& grid,
                           const ParityOptions& opt = {}) {
    HomotopyScan scan;
    for (double r : grid) {
        LaurentMatrix h = path(r);
        if (!check_inversion(h, s).ok)
            fail(ErrorKind::SymmetryError, "path leaves the inversion-symmetric class at r=" + std::to_string(r));
        try {
            scan.samples.push_back({r, mu2d(h, s, opt)});
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " at r=" + std::to_string(r));
        }
        if (scan.samples.front().report.mu != scan.samples.back().report.mu) scan.constant = false;
    }
    return scan;
}

inline std::vector<double> uniform_grid(double a, double b, int count) {
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    return g;
}

} // namespace qpi
