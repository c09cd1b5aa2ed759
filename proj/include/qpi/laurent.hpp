// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qpi/errors.hpp"

namespace qpi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kCoeffTol = 1e-12;
inline constexpr double kGridTol = 1e-10;
inline constexpr double kDropTol = 1e-14;

inline Complex unit(double angle) { return std::polar(1.0, angle); }

// z^k for integer k, exact for k = 0 and cheap for small |k|
inline Complex ipow(Complex z, int k) {
    if (k < 0) {
        z = 1.0 / z;
        k = -k;
    }
    Complex r{1.0, 0.0};
    while (k) {
        if (k & 1) r *= z;
        z *= z;
        k >>= 1;
    }
    return r;
}

using Exponent = std::array<int, 3>;

struct Term {
    Exponent exp{0, 0, 0};
    Matrix coeff;
};

// Matrix Laurent polynomial in up to three commuting variables.
// Terms are kept sorted by exponent with zero coefficients removed.
class LaurentMatrix {
public:
    LaurentMatrix() = default;

    LaurentMatrix(int size, int nvars, std::vector<Term> terms = {}) : size_(size), nvars_(nvars) {
        if (size <= 0) fail(ErrorKind::DimensionMismatch, "symbol size must be positive");
        if (nvars < 0 || nvars > 3) fail(ErrorKind::DimensionMismatch, "nvars must be 0..3");
        std::map<Exponent, Matrix> acc;
        for (auto& t : terms) {
            if (t.coeff.rows() != size || t.coeff.cols() != size)
                fail(ErrorKind::DimensionMismatch, "coefficient matrix has wrong shape");
            for (int v = nvars; v < 3; ++v)
                if (t.exp[v] != 0) fail(ErrorKind::DimensionMismatch, "exponent longer than nvars");
            auto it = acc.find(t.exp);
            if (it == acc.end())
                acc.emplace(t.exp, std::move(t.coeff));
            else
                it->second += t.coeff;
        }
        for (auto& [k, a] : acc)
            if (a.norm() >= kDropTol) terms_.push_back({k, std::move(a)});
    }

    static LaurentMatrix constant(const Matrix& a, int nvars) {
        if (a.rows() != a.cols()) fail(ErrorKind::DimensionMismatch, "constant must be square");
        return LaurentMatrix(int(a.rows()), nvars, {{Exponent{0, 0, 0}, a}});
    }

    static LaurentMatrix monomial(const Matrix& a, Exponent k, int nvars) {
        return LaurentMatrix(int(a.rows()), nvars, {{k, a}});
    }

    int size() const { return size_; }
    int nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.exp == Exponent{0, 0, 0}; });
    }

    Matrix coefficient(const Exponent& k) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                   [](const Term& t, const Exponent& e) { return t.exp < e; });
        if (it != terms_.end() && it->exp == k) return it->coeff;
        return Matrix::Zero(size_, size_);
    }

    // smallest and largest exponent of one variable
    std::pair<int, int> degree_range(int var) const {
        check_var(var);
        if (terms_.empty()) return {0, 0};
        int lo = terms_.front().exp[var], hi = lo;
        for (const auto& t : terms_) {
            lo = std::min(lo, t.exp[var]);
            hi = std::max(hi, t.exp[var]);
        }
        return {lo, hi};
    }

    int hopping_range() const {
        int r = 0;
        for (const auto& t : terms_)
            for (int v = 0; v < nvars_; ++v) r = std::max(r, std::abs(t.exp[v]));
        return r;
    }

    // Points need not lie on the torus; extension code evaluates off it.
    Matrix eval(std::span<const Complex> point) const {
        if (int(point.size()) != nvars_) fail(ErrorKind::DimensionMismatch, "point length differs from nvars");
        Matrix out = Matrix::Zero(size_, size_);
        for (const auto& t : terms_) {
            Complex c{1.0, 0.0};
            for (int v = 0; v < nvars_; ++v) c *= ipow(point[v], t.exp[v]);
            out += c * t.coeff;
        }
        return out;
    }
    Matrix eval(std::initializer_list<Complex> point) const {
        return eval(std::span<const Complex>(point.begin(), point.size()));
    }
    Matrix operator()(Complex z) const { return eval({z}); }
    Matrix operator()(Complex z, Complex w) const { return eval({z, w}); }
    Matrix operator()(Complex z, Complex w, Complex t) const { return eval({z, w, t}); }

    // the symbol whose value on the torus is the pointwise adjoint
    LaurentMatrix adjoint() const {
        std::vector<Term> out;
        for (const auto& t : terms_) out.push_back({negate(t.exp), t.coeff.adjoint()});
        return LaurentMatrix(size_, nvars_, std::move(out));
    }

    LaurentMatrix fix_variable(int var, Complex value) const {
        check_var(var);
        if (nvars_ < 1) fail(ErrorKind::IndexOutOfRange, "no variable to fix");
        std::vector<Term> out;
        for (const auto& t : terms_) {
            Exponent e{0, 0, 0};
            for (int v = 0, j = 0; v < nvars_; ++v)
                if (v != var) e[j++] = t.exp[v];
            out.push_back({e, ipow(value, t.exp[var]) * t.coeff});
        }
        return LaurentMatrix(size_, nvars_ - 1, std::move(out));
    }

    LaurentMatrix flip_variable(int var) const {
        check_var(var);
        std::vector<Term> out;
        for (const auto& t : terms_) {
            Exponent e = t.exp;
            e[var] = -e[var];
            out.push_back({e, t.coeff});
        }
        return LaurentMatrix(size_, nvars_, std::move(out));
    }

    // conjugation by a constant matrix: u A_k v for every k
    LaurentMatrix sandwich(const Matrix& u, const Matrix& v) const {
        std::vector<Term> out;
        for (const auto& t : terms_) out.push_back({t.exp, u * t.coeff * v});
        if (out.empty()) return LaurentMatrix(int(u.rows()), nvars_);
        return LaurentMatrix(int(u.rows()), nvars_, std::move(out));
    }

    friend LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b) {
        check_compatible(a, b);
        std::vector<Term> out = a.terms_;
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return LaurentMatrix(a.size_, a.nvars_, std::move(out));
    }
    friend LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b) { return a + (-1.0) * b; }
    friend LaurentMatrix operator*(Complex c, const LaurentMatrix& a) {
        std::vector<Term> out;
        for (const auto& t : a.terms_) out.push_back({t.exp, c * t.coeff});
        return LaurentMatrix(a.size_, a.nvars_, std::move(out));
    }
    friend LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
        check_compatible(a, b);
        std::vector<Term> out;
        out.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& s : a.terms_)
            for (const auto& t : b.terms_)
                out.push_back({Exponent{s.exp[0] + t.exp[0], s.exp[1] + t.exp[1], s.exp[2] + t.exp[2]},
                               s.coeff * t.coeff});
        return LaurentMatrix(a.size_, a.nvars_, std::move(out));
    }

    // exact equality of the stored coefficient data
    friend bool operator==(const LaurentMatrix& a, const LaurentMatrix& b) {
        if (a.size_ != b.size_ || a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].exp != b.terms_[i].exp || a.terms_[i].coeff != b.terms_[i].coeff) return false;
        return true;
    }

    static Exponent negate(const Exponent& e) { return {-e[0], -e[1], -e[2]}; }

private:
    void check_var(int var) const {
        if (var < 0 || var >= nvars_) fail(ErrorKind::IndexOutOfRange, "variable index out of range");
    }
    static void check_compatible(const LaurentMatrix& a, const LaurentMatrix& b) {
        if (a.size_ != b.size_ || a.nvars_ != b.nvars_)
            fail(ErrorKind::DimensionMismatch, "symbols have different shapes");
    }

    int size_ = 1;
    int nvars_ = 0;
    std::vector<Term> terms_;
};

// block [[a, b], [c, d]] assembled termwise; empty operands count as zero
inline LaurentMatrix block2x2(const LaurentMatrix& a, const LaurentMatrix& b, const LaurentMatrix& c,
                              const LaurentMatrix& d) {
    const int n = a.size(), nv = a.nvars();
    std::map<Exponent, Matrix> acc;
    auto put = [&](const LaurentMatrix& m, int r0, int c0) {
        if (m.size() != n || m.nvars() != nv) fail(ErrorKind::DimensionMismatch, "block shapes differ");
        for (const auto& t : m.terms()) {
            auto [it, fresh] = acc.try_emplace(t.exp, Matrix::Zero(2 * n, 2 * n));
            it->second.block(r0, c0, n, n) += t.coeff;
        }
    };
    put(a, 0, 0);
    put(b, 0, n);
    put(c, n, 0);
    put(d, n, n);
    std::vector<Term> terms;
    for (auto& [k, m] : acc) terms.push_back({k, std::move(m)});
    return LaurentMatrix(2 * n, nv, std::move(terms));
}

// [[0, h*], [h, 0]] for a square symbol h
inline LaurentMatrix chiral_hamiltonian(const LaurentMatrix& h) {
    LaurentMatrix zero(h.size(), h.nvars());
    return block2x2(zero, h.adjoint(), h, zero);
}

inline LaurentMatrix direct_sum(const LaurentMatrix& a, const LaurentMatrix& b) {
    if (a.nvars() != b.nvars()) fail(ErrorKind::DimensionMismatch, "direct sum needs equal nvars");
    const int n = a.size() + b.size();
    std::map<Exponent, Matrix> acc;
    for (const auto& t : a.terms()) {
        auto [it, fresh] = acc.try_emplace(t.exp, Matrix::Zero(n, n));
        it->second.topLeftCorner(a.size(), a.size()) = t.coeff;
    }
    for (const auto& t : b.terms()) {
        auto [it, fresh] = acc.try_emplace(t.exp, Matrix::Zero(n, n));
        it->second.bottomRightCorner(b.size(), b.size()) = t.coeff;
    }
    std::vector<Term> terms;
    for (auto& [k, m] : acc) terms.push_back({k, std::move(m)});
    return LaurentMatrix(n, a.nvars(), std::move(terms));
}

inline Matrix direct_sum(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

struct CheckResult {
    bool ok = true;
    double defect = 0.0;
    std::string worst;  // exponent of the worst coefficient, for messages
};

inline std::string exponent_string(const Exponent& e, int nvars) {
    std::string s = "(";
    for (int v = 0; v < nvars; ++v) s += (v ? "," : "") + std::to_string(e[v]);
    return s + ")";
}

namespace detail {
inline void note(CheckResult& r, double d, const Exponent& e, int nvars) {
    if (d > r.defect) {
        r.defect = d;
        r.worst = exponent_string(e, nvars);
    }
}

// visit every exponent present in m or in its mirror image
template <class F>
void for_each_pair(const LaurentMatrix& m, F&& f) {
    std::vector<Exponent> keys;
    for (const auto& t : m.terms()) {
        keys.push_back(t.exp);
        keys.push_back(LaurentMatrix::negate(t.exp));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& k : keys) f(k, m.coefficient(k), m.coefficient(LaurentMatrix::negate(k)));
}
} // namespace detail

inline CheckResult check_hermitian_on_torus(const LaurentMatrix& m, double tol = kCoeffTol) {
    CheckResult r;
    detail::for_each_pair(m, [&](const Exponent& k, const Matrix& a, const Matrix& am) {
        detail::note(r, (am - a.adjoint()).norm(), k, m.nvars());
    });
    r.ok = r.defect <= tol;
    return r;
}

inline bool is_hermitian(const Matrix& a, double tol = kCoeffTol) { return (a - a.adjoint()).norm() <= tol; }

inline bool is_hermitian_unitary(const Matrix& a, double tol = kCoeffTol) {
    return a.rows() == a.cols() && is_hermitian(a, tol) &&
           (a * a - Matrix::Identity(a.rows(), a.cols())).norm() <= tol;
}

struct SymmetryData {
    Matrix inversion;
    std::optional<Matrix> chiral;

    SymmetryData() = default;
    SymmetryData(Matrix i, std::optional<Matrix> p = std::nullopt) : inversion(std::move(i)), chiral(std::move(p)) {
        validate();
    }

    void validate() const {
        if (!is_hermitian_unitary(inversion)) fail(ErrorKind::SymmetryError, "inversion is not Hermitian unitary");
        if (chiral) {
            if (chiral->rows() != inversion.rows())
                fail(ErrorKind::DimensionMismatch, "chiral and inversion sizes differ");
            if (!is_hermitian_unitary(*chiral)) fail(ErrorKind::SymmetryError, "chiral is not Hermitian unitary");
            if ((*chiral * inversion + inversion * *chiral).norm() > kCoeffTol)
                fail(ErrorKind::SymmetryError, "chiral and inversion do not anticommute");
        }
    }

    const Matrix& pi() const {
        if (!chiral) fail(ErrorKind::MissingChiral, "model has no chiral symmetry");
        return *chiral;
    }
};

inline CheckResult check_inversion(const LaurentMatrix& m, const SymmetryData& s, double tol = kCoeffTol) {
    if (s.inversion.rows() != m.size()) fail(ErrorKind::DimensionMismatch, "inversion size differs from symbol");
    CheckResult r;
    const Matrix& I = s.inversion;
    detail::for_each_pair(m, [&](const Exponent& k, const Matrix& a, const Matrix& am) {
        detail::note(r, (I * a * I.adjoint() - am).norm(), k, m.nvars());
    });
    r.ok = r.defect <= tol;
    return r;
}

inline CheckResult check_chiral(const LaurentMatrix& m, const SymmetryData& s, double tol = kCoeffTol) {
    const Matrix& P = s.pi();
    if (P.rows() != m.size()) fail(ErrorKind::DimensionMismatch, "chiral size differs from symbol");
    CheckResult r;
    for (const auto& t : m.terms()) detail::note(r, (P * t.coeff * P.adjoint() + t.coeff).norm(), t.exp, m.nvars());
    r.ok = r.defect <= tol;
    return r;
}

// One-parameter family of 2-variable symbols over the hinge angle.
class Family3D {
public:
    enum class Kind { Laurent3, Suspension };

    static Family3D laurent3(LaurentMatrix h) {
        if (h.nvars() != 3) fail(ErrorKind::DimensionMismatch, "laurent3 family needs a 3-variable symbol");
        Family3D f;
        f.kind_ = Kind::Laurent3;
        f.h_ = std::move(h);
        return f;
    }

    Kind kind() const { return kind_; }
    int size() const { return h_.size(); }
    const LaurentMatrix& base() const { return h_; }
    const LaurentMatrix& epsilon() const { return eps_; }
    const Matrix& pi() const { return pi_; }

    // H cos(theta) - Pi sin(theta) on |theta| <= pi/2, eps cos(theta) - Pi sin(theta) elsewhere
    LaurentMatrix slice(double theta) const {
        if (kind_ == Kind::Laurent3) return h_.fix_variable(2, unit(theta));
        double th = std::remainder(theta, 2 * std::numbers::pi);
        double c = std::cos(th), s = std::sin(th);
        const LaurentMatrix& top = std::abs(th) <= std::numbers::pi / 2 ? h_ : eps_;
        return c * top - LaurentMatrix::constant(s * pi_, 2);
    }

    static constexpr std::array<double, 2> fixed_thetas{0.0, std::numbers::pi};

    friend Family3D suspend(const LaurentMatrix& h, const SymmetryData& s, const LaurentMatrix& eps);

private:
    Kind kind_ = Kind::Laurent3;
    LaurentMatrix h_, eps_;
    Matrix pi_;
};

inline Family3D suspend(const LaurentMatrix& h, const SymmetryData& s, const LaurentMatrix& eps) {
    if (h.nvars() != 2) fail(ErrorKind::DimensionMismatch, "suspension needs a 2-variable symbol");
    if (!eps.is_constant()) fail(ErrorKind::SymmetryError, "epsilon must be constant");
    if (eps.size() != h.size()) fail(ErrorKind::DimensionMismatch, "epsilon size differs from symbol");
    const Matrix& P = s.pi();
    LaurentMatrix e2 = LaurentMatrix::constant(eps.coefficient({0, 0, 0}), 2);
    if (!check_chiral(h, s).ok) fail(ErrorKind::SymmetryError, "symbol does not anticommute with chiral");
    if (!check_chiral(e2, s).ok) fail(ErrorKind::SymmetryError, "epsilon does not anticommute with chiral");
    Eigen::JacobiSVD<Matrix> svd(e2.coefficient({0, 0, 0}));
    if (svd.singularValues().minCoeff() < 1e-9) fail(ErrorKind::SymmetryError, "epsilon is singular");
    Family3D f;
    f.kind_ = Family3D::Kind::Suspension;
    f.h_ = h;
    f.eps_ = e2;
    f.pi_ = P;
    return f;
}

// pointwise comparison on a grid; used to cross-check the coefficient tests
inline double grid_inversion_defect(const LaurentMatrix& m, const Matrix& I, int n = 32) {
    double worst = 0;
    const double step = 2 * std::numbers::pi / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Complex z = unit(i * step), w = unit(j * step);
            Matrix a = m(z, w), b = m(std::conj(z), std::conj(w));
            worst = std::max(worst, (I * a * I.adjoint() - b).norm());
        }
    return worst;
}

} // namespace qpi
