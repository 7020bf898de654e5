#pragma once

#include <string>
#include <vector>

#include "stt/errors.hpp"
#include "stt/tensor.hpp"

// Tensor-times-matrix kernels. ttm_blocked mirrors the batched loop nest of
// an accelerator implementation, reinterpreting the batch dimension as cache
// blocking; the batch buffer here is the software analogue of an on-chip
// accumulator tile (hardware designs additionally reshape the operand arrays
// cyclically and pin them to single-ported RAM, which has no software
// equivalent). ttm_naive is the reference mode-n product.

namespace stt {

// Blocking plan for the last-mode product G = Y * U^T on the unfolded view.
struct TtmPlan {
    index_t batch_rows = 32;  // rows of Y processed per batch (b)
    index_t unfolded_rows = 0; // l = prod of the leading mode sizes
    index_t inner_dim = 0;     // contracted dimension (I_N)
    index_t out_cols = 0;      // output columns (R_N)
};

// G[i,k] = sum_t Y[i,t] * U[k,t], computed batch by batch with a local
// batch_rows-by-out_cols accumulator. The loop nest is batch -> k -> row ->
// t followed by a writeback, so per-element summation order is independent
// of the batch size and a trailing partial batch changes nothing but the
// writeback grouping.
inline Matrix ttm_blocked(const Matrix& y, const Matrix& u, const TtmPlan& plan) {
    if (plan.batch_rows < 1)
        throw shape_error("ttm_blocked: batch_rows must be >= 1");
    if (y.rows() != plan.unfolded_rows || y.cols() != plan.inner_dim)
        throw shape_error("ttm_blocked: Y is " + std::to_string(y.rows()) + "x" +
                          std::to_string(y.cols()) + ", plan expects " +
                          std::to_string(plan.unfolded_rows) + "x" +
                          std::to_string(plan.inner_dim));
    if (u.rows() != plan.out_cols || u.cols() != plan.inner_dim)
        throw shape_error("ttm_blocked: U is " + std::to_string(u.rows()) + "x" +
                          std::to_string(u.cols()) + ", plan expects " +
                          std::to_string(plan.out_cols) + "x" +
                          std::to_string(plan.inner_dim));

    const index_t l = plan.unfolded_rows;
    const index_t b = plan.batch_rows;
    const index_t inner = plan.inner_dim;
    const index_t out = plan.out_cols;

    Matrix g(l, out);
    std::vector<double> tmp(static_cast<std::size_t>(b * out));
    for (index_t ib = 0; ib < l; ib += b) {
        const index_t rows = std::min(b, l - ib); // final batch may be short
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (index_t k = 0; k < out; ++k)
            for (index_t io = 0; io < rows; ++io) {
                double acc = 0.0;
                for (index_t t = 0; t < inner; ++t)
                    acc += y(ib + io, t) * u(k, t);
                tmp[static_cast<std::size_t>(io * out + k)] = acc;
            }
        for (index_t k = 0; k < out; ++k)
            for (index_t io = 0; io < rows; ++io)
                g(ib + io, k) = tmp[static_cast<std::size_t>(io * out + k)];
    }
    return g;
}

// Reference mode-n product: g_{i1..j..iN} = sum_{i_n} x_{i1..iN} u_{j,i_n},
// realized as fold(u * unfold(x, n), n).
inline DenseTensor ttm_naive(const DenseTensor& x, const Matrix& u, int mode1) {
    detail::check_mode(x.shape(), mode1, "ttm_naive");
    const int mode0 = mode1 - 1;
    if (u.cols() != x.shape().dim(mode0))
        throw shape_error("ttm_naive: U has " + std::to_string(u.cols()) +
                          " columns, mode " + std::to_string(mode1) + " has size " +
                          std::to_string(x.shape().dim(mode0)));
    std::vector<index_t> dims = x.shape().dims();
    dims[static_cast<std::size_t>(mode0)] = u.rows();
    return fold(matmul(u, unfold(x, mode1)), mode1, Shape(dims));
}

// Core assembly G = Y x_N U_N^T for Y of shape R_1 x .. x R_{N-1} x I_N.
// Row-major storage makes the reshape of Y to an l-by-I_N matrix (and of the
// result back to a tensor) a pure reinterpretation, so the contraction runs
// through ttm_blocked.
inline DenseTensor core_from_last_mode(const DenseTensor& y, const Matrix& u_n,
                                       const TtmPlan& plan) {
    const Shape& s = y.shape();
    const int last = s.order() - 1;
    if (u_n.rows() != s.dim(last))
        throw shape_error("core_from_last_mode: U_N has " + std::to_string(u_n.rows()) +
                          " rows, last mode has size " + std::to_string(s.dim(last)));
    const index_t l = s.total() / s.dim(last);
    if (plan.unfolded_rows != l || plan.inner_dim != s.dim(last) ||
        plan.out_cols != u_n.cols())
        throw shape_error("core_from_last_mode: plan does not match operands");

    const Matrix ymat(l, s.dim(last), y.data());
    Matrix g = ttm_blocked(ymat, u_n.transposed(), plan);

    std::vector<index_t> dims = s.dims();
    dims[static_cast<std::size_t>(last)] = u_n.cols();
    return DenseTensor(Shape(dims), std::move(g.data()));
}

} // namespace stt
