#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stt/errors.hpp"
#include "stt/linalg.hpp"
#include "stt/rng.hpp"
#include "stt/tensor.hpp"
#include "stt/ttm.hpp"

// Tucker decomposition drivers: the nonzero-driven HOOI (per-mode Kronecker
// accumulation + pivoted-QR factor extraction), the dense HOOI used as its
// correctness oracle, model reconstruction, and error metrics.

namespace stt {

struct Ranks {
    std::vector<index_t> r;

    Ranks() = default;
    explicit Ranks(std::vector<index_t> ranks) : r(std::move(ranks)) {}

    int order() const { return static_cast<int>(r.size()); }
    index_t rank(int k) const { return r[static_cast<std::size_t>(k)]; } // 0-based k

    index_t product() const {
        index_t p = 1;
        for (index_t v : r)
            p *= v;
        return p;
    }

    // Product of all ranks except mode k (0-based).
    index_t product_excluding(int k) const {
        index_t p = 1;
        for (int t = 0; t < order(); ++t)
            if (t != k)
                p *= r[static_cast<std::size_t>(t)];
        return p;
    }

    void validate(const Shape& shape) const {
        if (order() != shape.order())
            throw rank_error("Ranks: " + std::to_string(order()) + " ranks for an order-" +
                             std::to_string(shape.order()) + " tensor");
        for (int k = 0; k < order(); ++k)
            if (r[static_cast<std::size_t>(k)] < 1 || r[static_cast<std::size_t>(k)] > shape.dim(k))
                throw rank_error("Ranks: mode " + std::to_string(k + 1) + " rank " +
                                 std::to_string(r[static_cast<std::size_t>(k)]) +
                                 " outside [1, " + std::to_string(shape.dim(k)) + "]");
    }
};

// Core tensor plus per-mode factor matrices with orthonormal columns;
// factor n is I_n-by-R_n.
struct TuckerModel {
    DenseTensor core;
    std::vector<Matrix> factors;
};

enum class Solver {
    qrp,        // pivoted-QR factor extraction
    svd_oracle, // leading left singular vectors via jacobi_svd
};

struct DecompConfig {
    Ranks ranks;
    int max_iters = 50;
    double tol = 1e-6;       // relative fit-change threshold; 0 disables early stop
    std::uint64_t seed = 0;
    Solver solver = Solver::qrp;
    index_t batch_rows = 32; // blocking for the core TTM
    bool reuse_kron = true;  // share Kronecker products across nonzeros with equal off-mode indices
};

struct DecompReport {
    int iterations = 0;
    std::vector<double> fits; // fit = ||G||_F / ||X||_F after each sweep
    double final_relative_error = std::numeric_limits<double>::quiet_NaN();
    std::int64_t kron_calls = 0; // one per nonzero per mode pass (orders >= 3)
    std::int64_t qrp_calls = 0;  // factor extractions, any solver
    double seconds_init = 0.0;
    double seconds_power = 0.0;
    double seconds_factor = 0.0;
    double seconds_core = 0.0;
    double seconds_error = 0.0;
    double seconds_total = 0.0;
};

// N random matrices I_n-by-R_n with orthonormal columns: pivoted QR of
// seeded standard-normal draws. Bit-reproducible for a given seed.
inline std::vector<Matrix> init_factors(const Shape& shape, const Ranks& ranks,
                                        std::uint64_t seed) {
    ranks.validate(shape);
    rng stream(seed);
    std::vector<Matrix> factors;
    factors.reserve(static_cast<std::size_t>(shape.order()));
    for (int n = 0; n < shape.order(); ++n) {
        Matrix g(shape.dim(n), ranks.rank(n));
        for (double& v : g.data())
            v = stream.normal();
        factors.push_back(qrp_leading(g, ranks.rank(n)));
    }
    return factors;
}

// Nonzero-driven mode-n power iteration:
//   Y_(n)(i_n, :) += x_{i_1..i_N} * kron of the off-mode factor rows
// With reuse_shared, nonzeros are grouped by their off-mode index tuple and
// one Kronecker product serves the whole group.
inline Matrix sparse_power_iteration(const CooTensor& x, const std::vector<Matrix>& factors,
                                     int mode1, bool reuse_shared = true) {
    const Shape& shape = x.shape();
    detail::check_mode(shape, mode1, "sparse_power_iteration");
    const int order = shape.order();
    if (static_cast<int>(factors.size()) != order)
        throw shape_error("sparse_power_iteration: " + std::to_string(factors.size()) +
                          " factors for an order-" + std::to_string(order) + " tensor");
    for (int k = 0; k < order; ++k)
        if (factors[static_cast<std::size_t>(k)].rows() != shape.dim(k))
            throw shape_error("sparse_power_iteration: factor " + std::to_string(k + 1) +
                              " has " + std::to_string(factors[static_cast<std::size_t>(k)].rows()) +
                              " rows, mode size is " + std::to_string(shape.dim(k)));

    const int mode0 = mode1 - 1;
    std::vector<int> off_modes;
    for (int t = 0; t < order; ++t)
        if (t != mode0)
            off_modes.push_back(t);

    index_t cols = 1;
    for (int t : off_modes)
        cols *= factors[static_cast<std::size_t>(t)].cols();

    Matrix y(shape.dim(mode0), cols);
    if (x.nnz() == 0)
        return y;

    if (off_modes.empty()) { // order-1 tensor: the unfolding is a column
        for (index_t e = 0; e < x.nnz(); ++e)
            y(x.index(e, mode0), 0) += x.value(e);
        return y;
    }

    auto accumulate = [&](index_t entry, std::span<const double> kron) {
        const index_t row = x.index(entry, mode0);
        const double v = x.value(entry);
        double* dst = y.row(row).data();
        for (index_t c = 0; c < cols; ++c)
            dst[c] += v * kron[static_cast<std::size_t>(c)];
    };
    auto kron_for = [&](index_t entry) {
        std::vector<std::span<const double>> rows;
        rows.reserve(off_modes.size());
        for (int t : off_modes)
            rows.push_back(factors[static_cast<std::size_t>(t)].row(x.index(entry, t)));
        return kron_rows_multi(rows);
    };

    if (!reuse_shared) {
        for (index_t e = 0; e < x.nnz(); ++e)
            accumulate(e, kron_for(e));
        return y;
    }

    // Group nonzeros sharing the same off-mode coordinates.
    std::vector<index_t> ord(static_cast<std::size_t>(x.nnz()));
    std::iota(ord.begin(), ord.end(), index_t{0});
    auto off_less = [&](index_t a, index_t b) {
        for (int t : off_modes) {
            const index_t ca = x.index(a, t);
            const index_t cb = x.index(b, t);
            if (ca != cb)
                return ca < cb;
        }
        return false;
    };
    std::sort(ord.begin(), ord.end(), off_less);

    std::size_t e = 0;
    while (e < ord.size()) {
        std::size_t f = e + 1;
        while (f < ord.size() && !off_less(ord[e], ord[f]))
            ++f;
        const std::vector<double> kron = kron_for(ord[e]);
        for (std::size_t g = e; g < f; ++g)
            accumulate(ord[g], kron);
        e = f;
    }
    return y;
}

// Extract an I_n-by-rank orthonormal factor from the mode-n unfolding. Tall
// unfoldings go through qrp (or jacobi_svd for the svd_oracle solver); fat
// unfoldings use the Gram-matrix route. A rank above the unfolding's column
// count (possible when one mode's rank exceeds the product of the others,
// as in a 2-way decomposition with uneven ranks) is served by deterministic
// orthonormal completion of the extracted basis.
inline Matrix factor_update(const Matrix& y_unfold, index_t rank,
                            Solver solver = Solver::qrp) {
    if (rank < 1 || rank > y_unfold.rows())
        throw rank_error("factor_update: rank " + std::to_string(rank) + " exceeds " +
                         std::to_string(y_unfold.rows()) + " rows");

    if (y_unfold.rows() < y_unfold.cols()) { // fat: Gram route, full rank available
        if (solver == Solver::qrp)
            return gram_qrp(y_unfold, rank);
        const SvdResult svd = jacobi_svd(y_unfold.transposed());
        Matrix out(y_unfold.rows(), rank);
        for (index_t i = 0; i < y_unfold.rows(); ++i)
            for (index_t j = 0; j < rank; ++j)
                out(i, j) = svd.v(i, j); // left vectors of A = V of A^T
        return out;
    }

    const index_t avail = std::min(rank, y_unfold.cols());
    Matrix basis(y_unfold.rows(), avail);
    if (solver == Solver::qrp) {
        basis = qrp_leading(y_unfold, avail);
    } else {
        const SvdResult svd = jacobi_svd(y_unfold);
        for (index_t i = 0; i < y_unfold.rows(); ++i)
            for (index_t j = 0; j < avail; ++j)
                basis(i, j) = svd.u(i, j);
    }
    return avail == rank ? basis : detail::extend_orthonormal(basis, rank);
}

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Shared HOOI sweep loop. build_y(factors, mode1) produces the mode-n
// unfolding of the current power iterate; everything else (initialization,
// factor extraction, core assembly, fit tracking, stopping) is identical for
// the sparse and dense drivers, which keeps the two paths comparable.
template <class BuildY, class ErrorFn>
std::pair<TuckerModel, DecompReport>
hooi_driver(const Shape& shape, double x_norm, const DecompConfig& cfg, BuildY&& build_y,
            ErrorFn&& error_fn, index_t nnz_per_mode_pass) {
    cfg.ranks.validate(shape);
    if (cfg.max_iters < 1)
        throw value_error("hooi: max_iters must be >= 1");
    if (cfg.tol < 0.0)
        throw value_error("hooi: tol must be >= 0");

    const int order = shape.order();
    DecompReport report;
    const double t_start = now_seconds();

    double t0 = now_seconds();
    std::vector<Matrix> factors = init_factors(shape, cfg.ranks, cfg.seed);
    report.seconds_init += now_seconds() - t0;

    // Shape of the power iterate after the mode-N pass: R_1 x .. x R_{N-1} x I_N.
    std::vector<index_t> ydims = cfg.ranks.r;
    ydims[static_cast<std::size_t>(order - 1)] = shape.dim(order - 1);
    const Shape yshape(ydims);
    const TtmPlan plan{cfg.batch_rows, yshape.total() / shape.dim(order - 1),
                       shape.dim(order - 1), cfg.ranks.rank(order - 1)};

    std::vector<index_t> core_dims = cfg.ranks.r;
    DenseTensor core{Shape(core_dims)};
    double prev_fit = 0.0;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        Matrix y_last(1, 1);
        for (int n = 1; n <= order; ++n) {
            t0 = now_seconds();
            Matrix y = build_y(factors, n);
            report.kron_calls += (order >= 3) ? nnz_per_mode_pass : 0;
            report.seconds_power += now_seconds() - t0;

            t0 = now_seconds();
            factors[static_cast<std::size_t>(n - 1)] =
                factor_update(y, cfg.ranks.rank(n - 1), cfg.solver);
            ++report.qrp_calls;
            report.seconds_factor += now_seconds() - t0;

            if (n == order)
                y_last = std::move(y);
        }

        t0 = now_seconds();
        core = core_from_last_mode(fold(y_last, order, yshape),
                                   factors[static_cast<std::size_t>(order - 1)], plan);
        report.seconds_core += now_seconds() - t0;

        const double fit = (x_norm == 0.0) ? 0.0 : frobenius_norm(core) / x_norm;
        if (!std::isfinite(fit))
            throw numerical_error("hooi: non-finite fit at sweep " + std::to_string(it), it);
        report.fits.push_back(fit);
        report.iterations = it;

        if (it >= 2 && cfg.tol > 0.0) {
            const double change = std::abs(fit - prev_fit) / std::max(prev_fit, 1e-300);
            if (change < cfg.tol)
                break;
        }
        prev_fit = fit;
    }

    TuckerModel model{std::move(core), std::move(factors)};

    t0 = now_seconds();
    report.final_relative_error = error_fn(model);
    report.seconds_error += now_seconds() - t0;

    report.seconds_total = now_seconds() - t_start;
    return {std::move(model), std::move(report)};
}

} // namespace detail

// Reconstruction G x_1 U_1 x_2 U_2 ... x_N U_N.
inline DenseTensor reconstruct(const TuckerModel& model) {
    const int order = model.core.shape().order();
    if (static_cast<int>(model.factors.size()) != order)
        throw shape_error("reconstruct: factor count does not match core order");
    DenseTensor x = model.core;
    for (int n = 1; n <= order; ++n) {
        const Matrix& u = model.factors[static_cast<std::size_t>(n - 1)];
        if (u.cols() != model.core.shape().dim(n - 1))
            throw shape_error("reconstruct: factor " + std::to_string(n) +
                              " has " + std::to_string(u.cols()) + " columns, core mode has " +
                              std::to_string(model.core.shape().dim(n - 1)));
        x = ttm_naive(x, u, n);
    }
    return x;
}

inline double relative_error(const DenseTensor& x, const TuckerModel& model) {
    const DenseTensor recon = reconstruct(model);
    if (recon.shape() != x.shape())
        throw shape_error("relative_error: model reconstructs a different shape");
    const double xn = frobenius_norm(x);
    if (xn == 0.0)
        throw value_error("relative_error: zero-norm reference tensor");
    double sum = 0.0;
    for (index_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - recon[i];
        sum += d * d;
    }
    return std::sqrt(sum) / xn;
}

// COO variant: streams the reconstruction once against the sorted nonzeros
// (canonical order equals row-major flat order) without forming X-hat minus X.
inline double relative_error(const CooTensor& x, const TuckerModel& model) {
    const DenseTensor recon = reconstruct(model);
    if (recon.shape() != x.shape())
        throw shape_error("relative_error: model reconstructs a different shape");
    const double xn = frobenius_norm(x);
    if (xn == 0.0)
        throw value_error("relative_error: zero-norm reference tensor");

    const int order = x.shape().order();
    double sum = 0.0;
    index_t e = 0;
    index_t next_flat = -1;
    if (x.nnz() > 0) {
        next_flat = 0;
        for (int k = 0; k < order; ++k)
            next_flat = next_flat * x.shape().dim(k) + x.index(0, k);
    }
    for (index_t flat = 0; flat < recon.size(); ++flat) {
        double xv = 0.0;
        if (flat == next_flat) {
            xv = x.value(e);
            if (++e < x.nnz()) {
                next_flat = 0;
                for (int k = 0; k < order; ++k)
                    next_flat = next_flat * x.shape().dim(k) + x.index(e, k);
            } else {
                next_flat = -1;
            }
        }
        const double d = xv - recon[flat];
        sum += d * d;
    }
    return std::sqrt(sum) / xn;
}

// Nonzero-driven HOOI: per mode, Kronecker-accumulate the unfolding of the
// power iterate over the nonzeros, extract the factor, and after the last
// mode assemble the core with the blocked TTM. Stops when the relative fit
// change drops below cfg.tol or after cfg.max_iters sweeps.
inline std::pair<TuckerModel, DecompReport> hooi_sparse(const CooTensor& x,
                                                        const DecompConfig& cfg) {
    auto build_y = [&](const std::vector<Matrix>& factors, int mode1) {
        return sparse_power_iteration(x, factors, mode1, cfg.reuse_kron);
    };
    auto error_fn = [&](const TuckerModel& model) { return x.nnz() == 0 ? 0.0 : relative_error(x, model); };
    return detail::hooi_driver(x.shape(), frobenius_norm(x), cfg, build_y, error_fn,
                               x.nnz());
}

// Dense HOOI: the power iterate is the full TTM chain over all modes except
// n. Identical initialization, factor extraction, core assembly, and
// stopping logic to hooi_sparse, which it serves as the reference for.
inline std::pair<TuckerModel, DecompReport> hooi_dense(const DenseTensor& x,
                                                       const DecompConfig& cfg) {
    auto build_y = [&](const std::vector<Matrix>& factors, int mode1) {
        DenseTensor y = x;
        for (int t = 1; t <= x.shape().order(); ++t) {
            if (t == mode1)
                continue;
            y = ttm_naive(y, factors[static_cast<std::size_t>(t - 1)].transposed(), t);
        }
        return unfold(y, mode1);
    };
    auto error_fn = [&](const TuckerModel& model) {
        const double xn = frobenius_norm(x);
        return xn == 0.0 ? 0.0 : relative_error(x, model);
    };
    return detail::hooi_driver(x.shape(), frobenius_norm(x), cfg, build_y, error_fn, 0);
}

} // namespace stt
