// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qpi/laurent.hpp"
#include "qpi/linalg.hpp"

namespace qpi {

// Finite section T_N(f) with block (i, j) = A_{i-j}.
inline SparseMatrix toeplitz_section(const LaurentMatrix& f, int blocks) {
    if (f.nvars() != 1) fail(ErrorKind::DimensionMismatch, "Toeplitz section needs a 1-variable symbol");
    const int n = f.size();
    std::vector<Eigen::Triplet<Complex>> trip;
    for (const auto& t : f.terms()) {
        const int k = t.exp[0];
        for (int j = 0; j < blocks; ++j) {
            const int i = j + k;
            if (i < 0 || i >= blocks) continue;
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r)
                    if (t.coeff(r, c) != Complex{}) trip.emplace_back(i * n + r, j * n + c, t.coeff(r, c));
        }
    }
    SparseMatrix a(blocks * n, blocks * n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

struct WindingOptions {
    int grid = 1024;
    double det_floor = 1e-10;
    double guard = 0.05;
};

// Winding number of det f around 0 along the unit circle.
inline int winding_det(const LaurentMatrix& f, const WindingOptions& opt = {}) {
    if (f.nvars() != 1) fail(ErrorKind::DimensionMismatch, "winding_det needs a 1-variable symbol");
    const int n = f.size();
    Matrix val(n, n);
    for (int m = opt.grid, attempt = 0; attempt < 2; ++attempt, m *= 2) {
        std::vector<Complex> d(m);
        for (int j = 0; j < m; ++j) {
            const Complex z = unit(2 * std::numbers::pi * j / m);
            val.setZero();
            for (const auto& t : f.terms()) val += ipow(z, t.exp[0]) * t.coeff;
            d[j] = small_determinant(val);
            if (std::abs(d[j]) < opt.det_floor)
                fail(ErrorKind::SingularOnCircle, "det f vanishes near angle " + std::to_string(2 * std::numbers::pi * j / m));
        }
        double total = 0;
        bool jump = false;
        for (int j = 0; j < m; ++j) {
            double inc = std::arg(d[(j + 1) % m] / d[j]);
            if (std::abs(inc) > std::numbers::pi / 2) jump = true;
            total += inc;
        }
        if (jump) continue;
        double raw = total / (2 * std::numbers::pi);
        double r = std::round(raw);
        if (std::abs(raw - r) >= opt.guard) fail(ErrorKind::PhaseJump, "winding not close to an integer");
        return int(r);
    }
    fail(ErrorKind::PhaseJump, "phase increment exceeds pi/2 after refinement");
}

struct FactorizationOptions {
    std::vector<int> schedule{128, 256, 512};
    double residual_tol = 1e-9;
    double decay_ratio = 1e-10;
    // past the schedule, keep doubling while the coefficients visibly decay
    double slow_decay = 1e-3;
    int max_truncation = 4096;
    int residual_grid = 256;
    WindingOptions winding{};
};

// Canonical factorization with coefficient lists. Right: f = minus * plus,
// left: f = plus * minus. plus(z) = sum P_k z^k, minus(z) = sum M_k z^-k.
struct CanonicalFactorization {
    bool left = false;
    std::vector<Matrix> plus_coeffs;
    std::vector<Matrix> minus_coeffs;
    double residual = 0;
    double decay = 0;
    int truncation = 0;

    Matrix plus(Complex z) const { return horner(plus_coeffs, z); }
    Matrix minus(Complex z) const { return horner(minus_coeffs, 1.0 / z); }
    Matrix minus_at_infinity() const { return minus_coeffs.front(); }
    Matrix product(Complex z) const { return left ? Matrix(plus(z) * minus(z)) : Matrix(minus(z) * plus(z)); }

    // Series in the variable of the side that is analytic there: sum c_k x^k.
    static Matrix horner(const std::vector<Matrix>& c, Complex x) {
        Matrix acc = c.back();
        for (int k = int(c.size()) - 2; k >= 0; --k) acc = acc * x + c[k];
        return acc;
    }
};

namespace detail {

inline double max_norm(const std::vector<Matrix>& v) {
    double m = 0;
    for (const auto& a : v) m = std::max(m, a.norm());
    return m;
}

inline void trim_tail(std::vector<Matrix>& v, double rel) {
    const double cut = rel * max_norm(v);
    while (v.size() > 1 && v.back().norm() < cut) v.pop_back();
}

} // namespace detail

inline CanonicalFactorization factorize_right(const LaurentMatrix& f, const FactorizationOptions& opt = {}) {
    if (f.nvars() != 1) fail(ErrorKind::DimensionMismatch, "factorization needs a 1-variable symbol");
    const int n = f.size();
    const int w = winding_det(f, opt.winding);
    if (w != 0) fail(ErrorKind::NonCanonical, "det f has winding number " + std::to_string(w));
    const auto [dlo, dhi] = f.degree_range(0);
    const int dminus = std::max(0, -dlo);

    std::string last_problem = "empty truncation schedule";
    std::vector<int> sizes = opt.schedule;
    double last_decay = 1;
    for (size_t si = 0; si < sizes.size(); ++si) {
        const int N = sizes[si];
        // h = sum X_k z^k solves the half-line equation T X = E_0
        SparseMatrix t = toeplitz_section(f, N);
        BandLU lu(t, 0.0);
        if (lu.singular()) {
            last_problem = "finite section singular at N=" + std::to_string(N);
            continue;
        }
        Matrix rhs = Matrix::Zero(N * n, n);
        rhs.topRows(n).setIdentity();
        lu.solve_in_place(rhs);
        if (!rhs.allFinite()) {
            last_problem = "non-finite solution at N=" + std::to_string(N);
            continue;
        }
        std::vector<Matrix> x(N);
        for (int k = 0; k < N; ++k) x[k] = rhs.middleRows(k * n, n);
        const double x0 = x[0].norm();
        if (x0 == 0 || min_singular_value(x[0]) < 1e-12 * x0) {
            last_problem = "leading coefficient X_0 not invertible";
            continue;
        }
        const double decay = x[N - 1].norm() / x0;
        last_decay = decay;
        if (decay >= opt.decay_ratio) {
            last_problem = "coefficients do not decay at N=" + std::to_string(N);
            if (si + 1 == sizes.size() && decay < opt.slow_decay && 2 * N <= opt.max_truncation) sizes.push_back(2 * N);
            continue;
        }
        detail::trim_tail(x, 1e-16);
        const int K = int(x.size());

        // f h: nonpositive powers give the minus factor, the rest must vanish
        CanonicalFactorization cf;
        cf.truncation = N;
        cf.decay = decay;
        double positive = 0;
        auto fh = [&](int k) {
            Matrix acc = Matrix::Zero(n, n);
            for (const auto& term : f.terms()) {
                int j = k - term.exp[0];
                if (j >= 0 && j < K) acc += term.coeff * x[j];
            }
            return acc;
        };
        for (int k = 0; k <= dminus; ++k) cf.minus_coeffs.push_back(fh(-k));
        for (int k = 1; k < std::min(K, N - dhi); ++k) positive = std::max(positive, fh(k).norm());
        if (positive > opt.residual_tol) {
            last_problem = "positive Fourier coefficients of f h do not vanish";
            continue;
        }
        if (min_singular_value(cf.minus_coeffs[0]) < 1e-12)
            fail(ErrorKind::NonCanonical, "minus factor is singular at infinity");

        // plus factor: Taylor coefficients of h^{-1} by FFT on 4N points
        const int M = 4 * N;
        std::vector<std::vector<Complex>> vals(n * n, std::vector<Complex>(M));
        for (int j = 0; j < M; ++j) {
            Matrix v = CanonicalFactorization::horner(x, unit(2 * std::numbers::pi * j / M)).inverse();
            for (int e = 0; e < n * n; ++e) vals[e][j] = v(e);
        }
        cf.plus_coeffs.assign(N, Matrix::Zero(n, n));
        Eigen::FFT<double> fft;
        std::vector<Complex> spec;
        for (int e = 0; e < n * n; ++e) {
            fft.fwd(spec, vals[e]);
            for (int k = 0; k < N; ++k) cf.plus_coeffs[k](e) = spec[k] / double(M);
        }
        detail::trim_tail(cf.plus_coeffs, 1e-15);

        double res = 0;
        for (int j = 0; j < opt.residual_grid; ++j) {
            Complex z = unit(2 * std::numbers::pi * j / opt.residual_grid);
            res = std::max(res, (f(z) - cf.product(z)).norm());
        }
        cf.residual = res;
        if (res >= opt.residual_tol) {
            last_problem = "residual " + std::to_string(res) + " at N=" + std::to_string(N);
            continue;
        }
        return cf;
    }
    if (last_problem.rfind("residual", 0) == 0 || last_problem.rfind("positive", 0) == 0 ||
        (last_problem.rfind("coefficients", 0) == 0 && last_decay < opt.slow_decay))
        fail(ErrorKind::IllConditioned, last_problem);
    fail(ErrorKind::NonCanonical, last_problem);
}

// Left factorization f = plus * minus, from the right factorization of f(1/z).
inline CanonicalFactorization factorize_left(const LaurentMatrix& f, const FactorizationOptions& opt = {}) {
    CanonicalFactorization g = factorize_right(f.flip_variable(0), opt);
    CanonicalFactorization out;
    out.left = true;
    out.plus_coeffs = g.minus_coeffs;
    out.minus_coeffs = g.plus_coeffs;
    out.residual = g.residual;
    out.decay = g.decay;
    out.truncation = g.truncation;
    return out;
}

// The canonical extension of f off the circle. A right factorization covers
// |z| <= 1, a left one |z| >= 1.
inline Matrix extend_1var(const CanonicalFactorization& cf, Complex z) {
    constexpr double slack = 1e-12;
    if (!cf.left) {
        if (std::abs(z) > 1 + slack) fail(ErrorKind::IndexOutOfRange, "right factorization extends into |z| <= 1 only");
        // minus(1/conj z) = sum M_k conj(z)^k
        return CanonicalFactorization::horner(cf.minus_coeffs, std::conj(z)) * cf.plus(z);
    }
    if (std::abs(z) < 1 - slack) fail(ErrorKind::IndexOutOfRange, "left factorization extends into |z| >= 1 only");
    return cf.plus(1.0 / std::conj(z)) * cf.minus(z);
}

inline Matrix extend_1var_at_infinity(const CanonicalFactorization& cf) {
    if (!cf.left) fail(ErrorKind::IndexOutOfRange, "infinity needs a left factorization");
    return cf.plus_coeffs.front() * cf.minus_coeffs.front();
}

inline Matrix extend_1var(const LaurentMatrix& f, const CanonicalFactorization& cf, Complex z) {
    (void)f;
    return extend_1var(cf, z);
}

struct PartialIndexReport {
    int winding_det = 0;
    int ker_dim = 0;
    int coker_dim = 0;
    bool canonical = false;
};

// Kernel and cokernel of the half-line operator estimated from a finite section:
// near-null singular vectors localized at the start of the section.
inline PartialIndexReport partial_index_report(const LaurentMatrix& f, int blocks = 96, double threshold = 1e-6) {
    PartialIndexReport r;
    r.winding_det = winding_det(f);
    const int n = f.size();
    Matrix t = Matrix(toeplitz_section(f, blocks));
    Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const int half = (blocks / 2) * n;
    for (int i = 0; i < s.size(); ++i) {
        if (s[i] >= threshold) continue;
        if (svd.matrixV().col(i).head(half).squaredNorm() > 0.5) ++r.ker_dim;
        if (svd.matrixU().col(i).head(half).squaredNorm() > 0.5) ++r.coker_dim;
    }
    r.canonical = r.winding_det == 0 && r.ker_dim == 0 && r.coker_dim == 0;
    return r;
}

// Points of the glued space X are addressed by patch, a disk coordinate u with
// |u| <= 1 and the frozen angle of the other variable. Minus patches use u = 1/z
// (resp. 1/w), so u = 0 is the point at infinity.
enum class Patch { ZPlus, ZMinus, WPlus, WMinus };

inline const char* to_string(Patch p) {
    switch (p) {
    case Patch::ZPlus: return "z in D+";
    case Patch::ZMinus: return "z in D-";
    case Patch::WPlus: return "w in D+";
    case Patch::WMinus: return "w in D-";
    }
    return "?";
}

// Evaluator of the canonical extension of a 2-variable symbol over X.
class ExtendedSymbol {
public:
    explicit ExtendedSymbol(LaurentMatrix h, FactorizationOptions opt = {})
        : h_(std::move(h)), opt_(std::move(opt)), cache_(std::make_shared<Cache>()) {
        if (h_.nvars() != 2) fail(ErrorKind::DimensionMismatch, "extension needs a 2-variable symbol");
    }

    const LaurentMatrix& base() const { return h_; }

    Matrix evaluate(Patch p, Complex u, double frozen) const {
        if (std::abs(u) > 1 + 1e-12) fail(ErrorKind::IndexOutOfRange, "disk coordinate outside the unit disk");
        return extend_1var(factorization(p, frozen), u);
    }

    // (z, w) with at least one coordinate on the circle
    Matrix operator()(Complex z, Complex w) const {
        constexpr double on = 1e-12;
        if (std::abs(std::abs(w) - 1) < on) {
            double a = std::arg(w);
            return std::abs(z) <= 1 ? evaluate(Patch::ZPlus, z, a) : evaluate(Patch::ZMinus, 1.0 / z, a);
        }
        if (std::abs(std::abs(z) - 1) < on) {
            double a = std::arg(z);
            return std::abs(w) <= 1 ? evaluate(Patch::WPlus, w, a) : evaluate(Patch::WMinus, 1.0 / w, a);
        }
        fail(ErrorKind::IndexOutOfRange, "point is not in the glued space");
    }

    // Right factorization of the 1-variable restriction belonging to a patch.
    const CanonicalFactorization& factorization(Patch p, double frozen) const {
        Key key{int(p), frozen};
        {
            std::shared_lock lock(cache_->mutex);
            auto it = cache_->map.find(key);
            if (it != cache_->map.end()) return *it->second;
        }
        auto cf = std::make_shared<CanonicalFactorization>(build(p, frozen));
        std::unique_lock lock(cache_->mutex);
        auto [it, inserted] = cache_->map.try_emplace(key, std::move(cf));
        return *it->second;
    }

    LaurentMatrix restriction(Patch p, double frozen) const {
        const bool zfree = p == Patch::ZPlus || p == Patch::ZMinus;
        LaurentMatrix f = h_.fix_variable(zfree ? 1 : 0, unit(frozen));
        return (p == Patch::ZMinus || p == Patch::WMinus) ? f.flip_variable(0) : f;
    }

    size_t cached() const {
        std::shared_lock lock(cache_->mutex);
        return cache_->map.size();
    }

private:
    CanonicalFactorization build(Patch p, double frozen) const {
        try {
            return factorize_right(restriction(p, frozen), opt_);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " [patch " + to_string(p) + ", frozen angle " +
                                      std::to_string(frozen) + "]");
        }
    }

    using Key = std::pair<int, double>;
    struct Cache {
        mutable std::shared_mutex mutex;
        std::map<Key, std::shared_ptr<const CanonicalFactorization>> map;
    };

    LaurentMatrix h_;
    FactorizationOptions opt_;
    std::shared_ptr<Cache> cache_;
};

} // namespace qpi
