#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "stt/errors.hpp"
#include "stt/tensor.hpp"

// Dense matrix kernels for the decomposition: Householder QR with column
// pivoting, row-vector Kronecker products, a one-sided Jacobi SVD used as a
// cross-check, and flop-count estimators.

namespace stt {

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw shape_error("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (index_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

// a * b^T
inline Matrix matmul_abt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw shape_error("matmul_abt: inner dimensions differ");
    Matrix c(a.rows(), b.rows());
    for (index_t i = 0; i < a.rows(); ++i)
        for (index_t j = 0; j < b.rows(); ++j) {
            double sum = 0.0;
            for (index_t k = 0; k < a.cols(); ++k)
                sum += a(i, k) * b(j, k);
            c(i, j) = sum;
        }
    return c;
}

// a^T * b
inline Matrix matmul_atb(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw shape_error("matmul_atb: inner dimensions differ");
    Matrix c(a.cols(), b.cols());
    for (index_t k = 0; k < a.rows(); ++k)
        for (index_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0)
                continue;
            for (index_t j = 0; j < b.cols(); ++j)
                c(i, j) += aki * b(k, j);
        }
    return c;
}

namespace detail {

// Fill columns [from, cols) of q with a deterministic orthonormal
// completion of the leading columns. Each new column is the canonical axis
// with the largest residual after projecting out everything accepted so far
// (ties toward the lowest axis index); that residual norm is always at
// least sqrt((m-j)/m), so the completion never degenerates, and it depends
// only on the span of the leading columns. The residual mass of axis i is
// 1 minus the mass of row i over the accepted columns, so selection is one
// row-norm table kept up to date incrementally.
inline void fill_orthonormal_tail(Matrix& q, index_t from) {
    const index_t m = q.rows();
    const index_t cols = q.cols();
    if (from >= cols)
        return;
    std::vector<double> rowmass(static_cast<std::size_t>(m), 0.0);
    for (index_t i = 0; i < m; ++i)
        for (index_t c = 0; c < from; ++c)
            rowmass[static_cast<std::size_t>(i)] += q(i, c) * q(i, c);

    // Selection compares masses on a coarse grid so that rounding-level
    // differences (empty rows all carry O(eps^2) mass, in arbitrary order)
    // cannot steer the pick; ties go to the lowest axis index. Any axis
    // within a grid step of the minimum has residual within that step of
    // the maximum, which keeps the normalization safely conditioned.
    auto bucket = [](double mass) { return std::floor(mass * 0x1.0p12); };
    std::vector<double> w(static_cast<std::size_t>(m));
    for (index_t j = from; j < cols; ++j) {
        index_t pick = 0;
        for (index_t i = 1; i < m; ++i)
            if (bucket(rowmass[static_cast<std::size_t>(i)]) <
                bucket(rowmass[static_cast<std::size_t>(pick)]))
                pick = i;

        // Two Gram-Schmidt passes of the picked axis against the accepted
        // columns; one pass leaves O(eps) components behind.
        std::fill(w.begin(), w.end(), 0.0);
        w[static_cast<std::size_t>(pick)] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (index_t c = 0; c < j; ++c) {
                double dot = 0.0;
                for (index_t i = 0; i < m; ++i)
                    dot += q(i, c) * w[static_cast<std::size_t>(i)];
                for (index_t i = 0; i < m; ++i)
                    w[static_cast<std::size_t>(i)] -= dot * q(i, c);
            }
        double wn = 0.0;
        for (double x : w)
            wn += x * x;
        wn = std::sqrt(wn);
        for (index_t i = 0; i < m; ++i) {
            q(i, j) = w[static_cast<std::size_t>(i)] / wn;
            rowmass[static_cast<std::size_t>(i)] += q(i, j) * q(i, j);
        }
    }
}

// Copy an orthonormal basis and append deterministic completion columns.
inline Matrix extend_orthonormal(const Matrix& basis, index_t k) {
    const index_t m = basis.rows();
    if (k > m)
        throw rank_error("extend_orthonormal: " + std::to_string(k) +
                         " columns from dimension " + std::to_string(m));
    Matrix out(m, k);
    for (index_t i = 0; i < m; ++i)
        for (index_t j = 0; j < basis.cols(); ++j)
            out(i, j) = basis(i, j);
    fill_orthonormal_tail(out, basis.cols());
    return out;
}

} // namespace detail

// Result of QR with column pivoting, A*P = Q*R:
//   q     m-by-n with orthonormal columns
//   r     n-by-n upper triangular, diag(r) >= 0 and non-increasing in magnitude
//   perm  perm[j] is the 0-based original column of A pivoted into position j
struct QrpResult {
    Matrix q;
    Matrix r;
    std::vector<index_t> perm;
};

struct SvdResult {
    Matrix u;              // m-by-n, orthonormal columns
    std::vector<double> s; // singular values, descending
    Matrix v;              // n-by-n orthogonal
};

namespace detail {

// Householder QR with column pivoting; q is accumulated only for the first
// want_cols columns (callers that keep k << n columns skip the rest).
inline QrpResult qrp_impl(const Matrix& a, index_t want_cols) {
    const index_t m = a.rows();
    const index_t n = a.cols();
    if (m < n)
        throw shape_error("qrp: matrix is " + std::to_string(m) + "x" + std::to_string(n) +
                          "; rows must be >= cols (use gram_qrp for fat input)");

    Matrix w = a;
    std::vector<index_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), index_t{0});

    // Squared partial column norms (rows j..m-1) and their value at the last
    // recompute, for the downdating guard.
    std::vector<double> norm2(static_cast<std::size_t>(n), 0.0);
    std::vector<double> base2(static_cast<std::size_t>(n), 0.0);
    double max_init2 = 0.0;
    for (index_t c = 0; c < n; ++c) {
        double sum = 0.0;
        for (index_t i = 0; i < m; ++i)
            sum += w(i, c) * w(i, c);
        norm2[static_cast<std::size_t>(c)] = base2[static_cast<std::size_t>(c)] = sum;
        max_init2 = std::max(max_init2, sum);
    }

    const double eps = std::numeric_limits<double>::epsilon();
    const double zero_tol = 8.0 * static_cast<double>(std::max(m, n)) * eps * std::sqrt(max_init2);
    const double zero_tol2 = zero_tol * zero_tol;

    std::vector<std::vector<double>> reflectors;
    reflectors.reserve(static_cast<std::size_t>(n));
    index_t rank = 0;

    for (index_t j = 0; j < n; ++j) {
        index_t piv = j;
        for (index_t c = j + 1; c < n; ++c) {
            const double nc = norm2[static_cast<std::size_t>(c)];
            const double np = norm2[static_cast<std::size_t>(piv)];
            if (nc > np || (nc == np && perm[static_cast<std::size_t>(c)] < perm[static_cast<std::size_t>(piv)]))
                piv = c;
        }
        if (!(norm2[static_cast<std::size_t>(piv)] > zero_tol2))
            break; // remaining block is numerically zero

        if (piv != j) {
            for (index_t i = 0; i < m; ++i)
                std::swap(w(i, j), w(i, piv));
            std::swap(norm2[static_cast<std::size_t>(j)], norm2[static_cast<std::size_t>(piv)]);
            std::swap(base2[static_cast<std::size_t>(j)], base2[static_cast<std::size_t>(piv)]);
            std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(piv)]);
        }

        // Exact partial norm of the pivot column for the reflector.
        double nrm2 = 0.0;
        for (index_t i = j; i < m; ++i)
            nrm2 += w(i, j) * w(i, j);
        const double nrm = std::sqrt(nrm2);
        const double sign = (w(j, j) >= 0.0) ? 1.0 : -1.0;

        std::vector<double> u(static_cast<std::size_t>(m - j));
        for (index_t i = j; i < m; ++i)
            u[static_cast<std::size_t>(i - j)] = w(i, j);
        u[0] += sign * nrm;
        double unorm = 0.0;
        for (double x : u)
            unorm += x * x;
        unorm = std::sqrt(unorm);
        for (double& x : u)
            x /= unorm;

        for (index_t c = j + 1; c < n; ++c) {
            double dot = 0.0;
            for (index_t i = j; i < m; ++i)
                dot += u[static_cast<std::size_t>(i - j)] * w(i, c);
            dot *= 2.0;
            for (index_t i = j; i < m; ++i)
                w(i, c) -= dot * u[static_cast<std::size_t>(i - j)];
        }
        w(j, j) = -sign * nrm;
        for (index_t i = j + 1; i < m; ++i)
            w(i, j) = 0.0;

        reflectors.push_back(std::move(u));
        ++rank;

        for (index_t c = j + 1; c < n; ++c) {
            auto& n2 = norm2[static_cast<std::size_t>(c)];
            n2 -= w(j, c) * w(j, c);
            if (n2 < 0.0)
                n2 = 0.0;
            if (n2 <= base2[static_cast<std::size_t>(c)] * 0x1.0p-26) {
                double sum = 0.0;
                for (index_t i = j + 1; i < m; ++i)
                    sum += w(i, c) * w(i, c);
                n2 = base2[static_cast<std::size_t>(c)] = sum;
            }
        }
    }

    Matrix r(n, n);
    for (index_t i = 0; i < rank; ++i)
        for (index_t c = i; c < n; ++c)
            r(i, c) = w(i, c);

    // Accumulate Q = H_0 ... H_{rank-1} applied to the leading identity columns.
    const index_t lead = std::min(rank, want_cols);
    Matrix q(m, want_cols);
    for (index_t j = 0; j < lead; ++j)
        q(j, j) = 1.0;
    for (index_t j = rank - 1; j >= 0; --j) {
        const auto& u = reflectors[static_cast<std::size_t>(j)];
        for (index_t c = 0; c < lead; ++c) {
            double dot = 0.0;
            for (index_t i = j; i < m; ++i)
                dot += u[static_cast<std::size_t>(i - j)] * q(i, c);
            if (dot == 0.0)
                continue;
            dot *= 2.0;
            for (index_t i = j; i < m; ++i)
                q(i, c) -= dot * u[static_cast<std::size_t>(i - j)];
        }
    }

    // Columns past the numerical rank are unconstrained (their R rows are
    // zero). Reflected identity columns would inherit noise-driven reflector
    // signs, so complete canonically instead; this depends only on the
    // leading span.
    fill_orthonormal_tail(q, lead);

    for (index_t j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) {
            for (index_t c = j; c < n; ++c)
                r(j, c) = -r(j, c);
            if (j < want_cols)
                for (index_t i = 0; i < m; ++i)
                    q(i, j) = -q(i, j);
        }
    }

    return QrpResult{std::move(q), std::move(r), std::move(perm)};
}

} // namespace detail

// Householder QR with column pivoting.
//
// At step j the remaining column of largest partial norm is swapped into
// position j (ties broken toward the lowest original column index) and
// eliminated with the reflector built from v = a_j + sign(a_jj)*||a_j||*e1,
// with sign(0) = +1. Partial column norms are downdated after each
// reflection and recomputed from scratch once a downdated value has lost
// more than half its bits (relative 2^-26 guard). Columns whose remaining
// norm falls below the numerical-rank cutoff are not reflected; they leave
// exact zeros on the trailing diagonal of R. Q and R rows are sign-flipped
// afterwards so that diag(R) >= 0.
inline QrpResult qrp(const Matrix& a) { return detail::qrp_impl(a, a.cols()); }

// First k columns of Q from the pivoted QR of the Gram matrix a*a^T; the
// fat-unfolding route, which works on the small m-by-m square instead.
inline Matrix gram_qrp(const Matrix& a, index_t k) {
    if (k < 1 || k > a.rows())
        throw rank_error("gram_qrp: rank " + std::to_string(k) + " exceeds " +
                         std::to_string(a.rows()) + " rows");
    const Matrix gram = matmul_abt(a, a);
    return detail::qrp_impl(gram, k).q;
}

// Leading-k orthonormal basis from pivoted QR; fat inputs route through the
// Gram trick.
inline Matrix qrp_leading(const Matrix& a, index_t k) {
    if (a.rows() < a.cols())
        return gram_qrp(a, k);
    if (k < 1 || k > a.cols())
        throw rank_error("qrp_leading: rank " + std::to_string(k) + " exceeds " +
                         std::to_string(a.cols()) + " columns");
    return detail::qrp_impl(a, k).q;
}

// Kronecker product of two row vectors: c[q*i + j] = a[i] * b[j].
inline std::vector<double> kron_rows(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw shape_error("kron_rows: operands must be non-empty");
    std::vector<double> c(a.size() * b.size());
    std::size_t pos = 0;
    for (const double ai : a)
        for (const double bj : b)
            c[pos++] = ai * bj;
    return c;
}

// Kronecker product of several row vectors given in ascending mode order.
// The fold runs in descending mode order (left fold over the reversed list),
// so the first vector varies fastest and the element layout matches the
// unfolding column index of unfold_col_index.
inline std::vector<double> kron_rows_multi(const std::vector<std::span<const double>>& vs) {
    if (vs.empty())
        throw shape_error("kron_rows_multi: need at least one vector");
    std::vector<double> acc(vs.back().begin(), vs.back().end());
    for (std::size_t k = vs.size() - 1; k-- > 0;)
        acc = kron_rows(acc, vs[k]);
    return acc;
}

// One-sided Jacobi SVD, cyclic-by-rows sweeps. Columns of the working copy
// are pairwise rotated until every normalized off-diagonal inner product
// |<a_i,a_j>| / (||a_i|| ||a_j||) is at or below 1e-12, capped at 60 sweeps.
// Singular values are the final column norms, sorted descending; numerically
// zero columns are replaced by an orthonormal completion so U always has
// orthonormal columns.
inline SvdResult jacobi_svd(const Matrix& a) {
    const index_t m = a.rows();
    const index_t n = a.cols();
    if (m < n)
        throw shape_error("jacobi_svd: matrix is " + std::to_string(m) + "x" +
                          std::to_string(n) + "; rows must be >= cols");

    constexpr double tol = 1e-12;
    constexpr int max_sweeps = 60;

    Matrix u = a;
    Matrix v = Matrix::identity(n);

    // Columns whose norm is negligible against the matrix scale are left to
    // the completion step below; rotating them against each other is noise.
    const double fnorm = frobenius_norm(a);
    const double col_floor = std::numeric_limits<double>::epsilon() * fnorm;
    const double col_floor2 = col_floor * col_floor;

    double off = 0.0;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        off = 0.0;
        for (index_t i = 0; i + 1 < n; ++i) {
            for (index_t j = i + 1; j < n; ++j) {
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (index_t k = 0; k < m; ++k) {
                    const double x = u(k, i);
                    const double y = u(k, j);
                    aii += x * x;
                    ajj += y * y;
                    aij += x * y;
                }
                if (aii <= col_floor2 || ajj <= col_floor2 || aij == 0.0)
                    continue;
                const double rel = std::abs(aij) / (std::sqrt(aii) * std::sqrt(ajj));
                off = std::max(off, rel);
                if (rel <= tol)
                    continue;

                const double zeta = (ajj - aii) / (2.0 * aij);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (index_t k = 0; k < m; ++k) {
                    const double x = u(k, i);
                    const double y = u(k, j);
                    u(k, i) = cs * x - sn * y;
                    u(k, j) = sn * x + cs * y;
                }
                for (index_t k = 0; k < n; ++k) {
                    const double x = v(k, i);
                    const double y = v(k, j);
                    v(k, i) = cs * x - sn * y;
                    v(k, j) = sn * x + cs * y;
                }
            }
        }
        converged = off <= tol;
    }
    if (!converged)
        throw convergence_error("jacobi_svd: off-diagonal residual " + std::to_string(off) +
                                    " above tolerance after " + std::to_string(max_sweeps) +
                                    " sweeps",
                                off);

    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    for (index_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (index_t i = 0; i < m; ++i)
            sum += u(i, j) * u(i, j);
        s[static_cast<std::size_t>(j)] = std::sqrt(sum);
    }

    std::vector<index_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), index_t{0});
    std::stable_sort(order.begin(), order.end(), [&](index_t x, index_t y) {
        return s[static_cast<std::size_t>(x)] > s[static_cast<std::size_t>(y)];
    });

    Matrix us(m, n);
    Matrix vs(n, n);
    std::vector<double> ss(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
        const index_t src = order[static_cast<std::size_t>(j)];
        ss[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(src)];
        for (index_t i = 0; i < m; ++i)
            us(i, j) = u(i, src);
        for (index_t i = 0; i < n; ++i)
            vs(i, j) = v(i, src);
    }

    const double eps = std::numeric_limits<double>::epsilon();
    const double smax = ss.empty() ? 0.0 : ss[0];
    const double tiny = static_cast<double>(std::max(m, n)) * eps * smax;
    index_t kept = 0;
    while (kept < n && ss[static_cast<std::size_t>(kept)] > tiny) {
        const double inv = 1.0 / ss[static_cast<std::size_t>(kept)];
        for (index_t i = 0; i < m; ++i)
            us(i, kept) *= inv;
        ++kept;
    }
    // Numerically zero columns (a contiguous tail after the sort) get a
    // deterministic orthonormal completion instead of a 0/0 normalization.
    detail::fill_orthonormal_tail(us, kept);

    return SvdResult{std::move(us), std::move(ss), std::move(vs)};
}

// Closed-form operation-count estimates for an m-by-n factorization, m >= n.
inline double qrp_flops(double m, double n) { return 2.0 * m * n * n - 2.0 * n * n * n / 3.0; }
inline double svd_flops(double m, double n) { return 2.0 * m * n * n + 11.0 * n * n * n; }

} // namespace stt
