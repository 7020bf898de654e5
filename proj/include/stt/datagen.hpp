#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "stt/errors.hpp"
#include "stt/rng.hpp"
#include "stt/tensor.hpp"
#include "stt/tucker.hpp"

// Synthetic tensor generators for benchmarks and tests.

namespace stt {

struct GenSpec {
    Shape shape;
    std::optional<double> target_sparsity; // nnz fraction in (0, 1]
    std::optional<index_t> exact_nnz;      // takes precedence when set
    enum class ValueDist { uniform01, unit } value_dist = ValueDist::uniform01;
    std::uint64_t seed = 0;

    // Requested nonzero count: exact_nnz, or round-half-up of
    // target_sparsity * element count, floored at 1.
    index_t resolve_nnz() const {
        if (exact_nnz)
            return *exact_nnz;
        if (!target_sparsity)
            throw spec_error("GenSpec: neither sparsity nor nnz given");
        if (!(*target_sparsity > 0.0) || *target_sparsity > 1.0)
            throw spec_error("GenSpec: sparsity " + std::to_string(*target_sparsity) +
                             " outside (0, 1]");
        const double want = *target_sparsity * static_cast<double>(shape.total());
        return std::max<index_t>(1, static_cast<index_t>(std::floor(want + 0.5)));
    }
};

// Exactly nnz distinct cells drawn uniformly without replacement (Floyd's
// sampling), with values per the requested distribution. Deterministic for a
// given seed.
inline CooTensor gen_uniform_sparse(const GenSpec& spec) {
    const index_t total = spec.shape.total();
    const index_t nnz = spec.resolve_nnz();
    if (nnz < 1 || nnz > total)
        throw spec_error("gen_uniform_sparse: nnz " + std::to_string(nnz) +
                         " outside [1, " + std::to_string(total) + "]");

    rng stream(spec.seed);
    std::unordered_set<index_t> cells;
    cells.reserve(static_cast<std::size_t>(nnz) * 2);
    for (index_t j = total - nnz; j < total; ++j) {
        const index_t t = static_cast<index_t>(stream.below(static_cast<std::uint64_t>(j) + 1));
        if (!cells.insert(t).second)
            cells.insert(j);
    }

    std::vector<index_t> flat(cells.begin(), cells.end());
    std::sort(flat.begin(), flat.end());

    const int order = spec.shape.order();
    std::vector<index_t> indices;
    indices.reserve(flat.size() * static_cast<std::size_t>(order));
    std::vector<double> values;
    values.reserve(flat.size());
    std::vector<index_t> coords(static_cast<std::size_t>(order));
    for (index_t cell : flat) {
        index_t rem = cell;
        for (int k = order - 1; k >= 0; --k) {
            coords[static_cast<std::size_t>(k)] = rem % spec.shape.dim(k);
            rem /= spec.shape.dim(k);
        }
        indices.insert(indices.end(), coords.begin(), coords.end());
        values.push_back(spec.value_dist == GenSpec::ValueDist::unit
                             ? 1.0
                             : stream.uniform01_open());
    }
    // Sorted flat cells give canonical (lexicographic) coordinate order.
    return CooTensor::adopt_canonical(spec.shape, std::move(indices), std::move(values));
}

// Dense tensor of exact multilinear rank <= ranks: a random normal core
// expanded through random orthonormal factors.
inline DenseTensor gen_exact_lowrank(const Shape& shape, const Ranks& ranks,
                                     std::uint64_t seed) {
    ranks.validate(shape);
    rng stream(seed);
    DenseTensor core{Shape(ranks.r)};
    for (double& v : core.data())
        v = stream.normal();

    std::vector<Matrix> factors;
    factors.reserve(static_cast<std::size_t>(shape.order()));
    for (int n = 0; n < shape.order(); ++n) {
        Matrix g(shape.dim(n), ranks.rank(n));
        for (double& v : g.data())
            v = stream.normal();
        factors.push_back(qrp_leading(g, ranks.rank(n)));
    }
    return reconstruct(TuckerModel{std::move(core), std::move(factors)});
}

// Binary 3-way tensor encoding the classical m-by-k times k-by-n matrix
// multiply: shape (mk, kn, mn) with x[i1,i2,i3] = 1 whenever A-entry i1
// (row-major) times B-entry i2 (row-major) contributes to C-entry i3
// (column-major). nnz = m*k*n.
inline CooTensor gen_matmul_tensor(index_t m, index_t k, index_t n) {
    if (m < 1 || k < 1 || n < 1)
        throw spec_error("gen_matmul_tensor: dimensions must be >= 1");
    const Shape shape({m * k, k * n, m * n});
    std::vector<CooEntry> entries;
    entries.reserve(static_cast<std::size_t>(m * k * n));
    for (index_t i = 1; i <= m; ++i)
        for (index_t p = 1; p <= k; ++p)
            for (index_t j = 1; j <= n; ++j)
                entries.push_back(CooEntry{{(i - 1) * k + p,  // A(i,p), row-major
                                            (p - 1) * n + j,  // B(p,j), row-major
                                            (j - 1) * m + i}, // C(i,j), column-major
                                           1.0});
    return coo_from_triples(shape, entries);
}

// Raw element count over Tucker parameter count (core + factors).
inline double compression_ratio(const Shape& shape, const Ranks& ranks) {
    ranks.validate(shape);
    double params = static_cast<double>(ranks.product());
    for (int k = 0; k < shape.order(); ++k)
        params += static_cast<double>(shape.dim(k)) * static_cast<double>(ranks.rank(k));
    return static_cast<double>(shape.total()) / params;
}

} // namespace stt
