// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#ifndef lapack_complex_double
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qpi/errors.hpp"
#include "qpi/laurent.hpp"

namespace qpi {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

inline int bandwidth(const SparseMatrix& a) {
    int kd = 0;
    for (int j = 0; j < a.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) kd = std::max(kd, int(std::abs(it.row() - j)));
    return kd;
}

inline double hermitian_defect(const SparseMatrix& a) {
    SparseMatrix d = a - SparseMatrix(a.adjoint());
    double m = 0;
    for (int j = 0; j < d.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(d, j); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

// LU of a general band matrix a - shift*1, kept in LAPACK band storage.
class BandLU {
public:
    BandLU(const SparseMatrix& a, Complex shift) : n_(int(a.rows())), k_(bandwidth(a)) {
        ldab_ = 3 * k_ + 1;
        ab_.assign(size_t(ldab_) * n_, Complex{});
        for (int j = 0; j < a.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(a, j); it; ++it) at(int(it.row()), j) += it.value();
        for (int j = 0; j < n_; ++j) at(j, j) -= shift;
        piv_.resize(n_);
        int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, k_, k_, ab_.data(), ldab_, piv_.data());
        if (info < 0) fail(ErrorKind::IllConditioned, "zgbtrf rejected its arguments");
        singular_ = info > 0;
    }

    bool singular() const { return singular_; }

    void solve_in_place(Matrix& rhs) const {
        if (singular_) fail(ErrorKind::IllConditioned, "band factorization is singular");
        int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, k_, k_, int(rhs.cols()), ab_.data(), ldab_, piv_.data(),
                                  rhs.data(), n_);
        if (info != 0) fail(ErrorKind::IllConditioned, "zgbtrs failed");
    }

private:
    Complex& at(int i, int j) { return ab_[size_t(2 * k_ + i - j) + size_t(j) * ldab_]; }

    int n_, k_, ldab_;
    std::vector<Complex> ab_;
    std::vector<lapack_int> piv_;
    bool singular_ = false;
};

// Hermitian block tridiagonal matrix; diag[k] and sub[k] = block (k+1, k).
struct BlockTridiagonal {
    std::vector<Matrix> diag;
    std::vector<Matrix> sub;

    int dim() const {
        int n = 0;
        for (const auto& d : diag) n += int(d.rows());
        return n;
    }

    // Partition a Hermitian matrix into blocks of size b; every entry must lie in
    // a diagonal or neighbouring block.
    static BlockTridiagonal from_sparse(const SparseMatrix& a, int b) {
        const int n = int(a.rows());
        const int nb = (n + b - 1) / b;
        BlockTridiagonal t;
        for (int k = 0; k < nb; ++k) {
            int sz = std::min(b, n - k * b);
            t.diag.push_back(Matrix::Zero(sz, sz));
            if (k + 1 < nb) t.sub.push_back(Matrix::Zero(std::min(b, n - (k + 1) * b), sz));
        }
        for (int j = 0; j < a.outerSize(); ++j)
            for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
                int i = int(it.row()), bi = i / b, bj = j / b;
                if (bi == bj)
                    t.diag[bi](i - bi * b, j - bj * b) = it.value();
                else if (bi == bj + 1)
                    t.sub[bj](i - bi * b, j - bj * b) = it.value();
                else if (bj != bi + 1)
                    fail(ErrorKind::DimensionMismatch, "matrix is not block tridiagonal for this block size");
            }
        return t;
    }

    // Number of eigenvalues below sigma, by Sylvester inertia of the block LDL* recursion.
    // Each Schur complement is factored with Bunch-Kaufman pivoting.
    // counts[k] holds the count for the leading k+1 blocks.
    std::vector<int> counts_below(double sigma) const {
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<int> out;
            if (sweep(sigma, out)) return out;
            sigma += std::max(1e-13, std::abs(sigma) * 1e-11);
        }
        fail(ErrorKind::IllConditioned, "inertia sweep hit exact singularity repeatedly");
    }

    int count_below(double sigma) const { return counts_below(sigma).back(); }

    int count_in(double lo, double hi) const { return count_below(hi) - count_below(lo); }

private:
    bool sweep(double sigma, std::vector<int>& out) const {
        int neg = 0;
        Matrix f, x;
        std::vector<lapack_int> ipiv;
        std::vector<Complex> work;
        for (size_t k = 0; k < diag.size(); ++k) {
            const int m = int(diag[k].rows());
            if (k == 0) {
                f = diag[0];
            } else {
                // x = S_{k-1}^{-1} C^*, then S_k = D_k - C x
                x = sub[k - 1].adjoint();
                int info = LAPACKE_zhetrs_work(LAPACK_COL_MAJOR, 'L', int(f.rows()), int(x.cols()), f.data(),
                                               int(f.rows()), ipiv.data(), x.data(), int(x.rows()));
                if (info != 0) return false;
                f.resize(m, m);
                f.noalias() = diag[k];
                f.noalias() -= sub[k - 1] * x;
            }
            f.diagonal().array() -= sigma;
            ipiv.assign(m, 0);
            const int lwork = std::max(1, m * 32);
            work.resize(lwork);
            // only the lower triangle is read
            int info = LAPACKE_zhetrf_work(LAPACK_COL_MAJOR, 'L', m, f.data(), m, ipiv.data(), work.data(), lwork);
            if (info != 0) return false;
            neg += negatives(f, ipiv);
            out.push_back(neg);
        }
        return true;
    }

    static int negatives(const Matrix& f, const std::vector<lapack_int>& ipiv) {
        int neg = 0;
        const int m = int(f.rows());
        for (int k = 0; k < m;) {
            if (ipiv[k] > 0) {
                if (f(k, k).real() < 0) ++neg;
                ++k;
            } else {
                double a = f(k, k).real(), c = f(k + 1, k + 1).real();
                double det = a * c - std::norm(f(k + 1, k));
                if (det < 0)
                    ++neg;
                else if (a + c < 0)
                    neg += 2;
                k += 2;
            }
        }
        return neg;
    }

};

inline Matrix orthonormalize(const Matrix& v) {
    Eigen::HouseholderQR<Matrix> qr(v);
    return qr.householderQ() * Matrix::Identity(v.rows(), v.cols());
}

struct Eigenpairs {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns match values
    std::vector<double> residuals;
    int iterations = 0;
};

// Eigenpairs of a sparse Hermitian matrix closest to zero: block inverse iteration
// with (a - i*delta)^{-1} and Rayleigh-Ritz on a itself. Returns `want` pairs from a
// subspace of dimension want + guard.
inline Eigenpairs nearest_zero_eigenpairs(const SparseMatrix& a, int want, double delta, double res_tol,
                                          int max_iter = 200, unsigned seed = 12345, int guard = 6) {
    const int n = int(a.rows());
    const int p = std::min(n, want + guard);
    want = std::min(want, p);
    BandLU lu(a, Complex(0.0, delta));
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    Matrix v(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) v(i, j) = Complex(nd(gen), nd(gen));
    v = orthonormalize(v);

    Eigenpairs out;
    for (int it = 1; it <= max_iter; ++it) {
        lu.solve_in_place(v);
        v = orthonormalize(v);
        Matrix av = a * v;
        Matrix k = v.adjoint() * av;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.adjoint()));
        v = v * es.eigenvectors();
        av = av * es.eigenvectors();
        // sort by |value| so the first `want` are the ones requested
        std::vector<int> order(p);
        for (int j = 0; j < p; ++j) order[j] = j;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            return std::abs(es.eigenvalues()[x]) < std::abs(es.eigenvalues()[y]);
        });
        bool done = true;
        std::vector<double> res(p);
        for (int j = 0; j < p; ++j) {
            res[j] = (av.col(j) - es.eigenvalues()[j] * v.col(j)).norm();
        }
        for (int j = 0; j < want; ++j) done = done && res[order[j]] < res_tol;
        if (done || it == max_iter) {
            std::vector<int> keep(order.begin(), order.begin() + want);
            std::sort(keep.begin(), keep.end(),
                      [&](int x, int y) { return es.eigenvalues()[x] < es.eigenvalues()[y]; });
            out.vectors.resize(n, want);
            for (int j = 0; j < want; ++j) {
                out.values.push_back(es.eigenvalues()[keep[j]]);
                out.vectors.col(j) = v.col(keep[j]);
                out.residuals.push_back(res[keep[j]]);
            }
            out.iterations = it;
            if (!done) fail(ErrorKind::IllConditioned, "subspace iteration did not converge");
            return out;
        }
    }
    return out;
}

// Determinant by Gaussian elimination with partial pivoting, for small matrices
// where the blocked LU overhead dominates.
inline Complex small_determinant(Matrix a) {
    const int n = int(a.rows());
    Complex det{1.0, 0.0};
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (a(p, k) == Complex{}) return Complex{};
        if (p != k) {
            a.row(p).swap(a.row(k));
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const Complex m = a(i, k) / a(k, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
        }
    }
    return det;
}

// Dense Hermitian helper: eigenvalues ascending
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_abs_eigenvalue(const Matrix& a) { return hermitian_eigenvalues(a).cwiseAbs().minCoeff(); }

inline double min_singular_value(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().minCoeff();
}

} // namespace qpi
