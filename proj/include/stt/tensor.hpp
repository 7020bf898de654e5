#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stt/errors.hpp"

// Sparse and dense tensor containers plus the reshaping and norm primitives
// everything else is built on.
//
// Index conventions: modes and coordinates are 1-based at API boundaries
// (files, constructors taking user coordinates, mode arguments), matching the
// usual tensor-literature notation. Internal storage is 0-based. Dense data
// is row-major with the last mode fastest.

namespace stt {

using index_t = std::int64_t;

class Shape {
  public:
    explicit Shape(std::vector<index_t> dims) : dims_(std::move(dims)) {
        if (dims_.empty())
            throw shape_error("Shape: order must be >= 1");
        index_t total = 1;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            const index_t d = dims_[k];
            if (d < 1)
                throw shape_error("Shape: dim " + std::to_string(k + 1) +
                                  " is " + std::to_string(d) + ", must be >= 1");
            if (total > std::numeric_limits<index_t>::max() / d)
                throw shape_error("Shape: element count overflows index type");
            total *= d;
        }
        total_ = total;
    }

    Shape(std::initializer_list<index_t> dims) : Shape(std::vector<index_t>(dims)) {}

    int order() const { return static_cast<int>(dims_.size()); }
    index_t dim(int k) const { return dims_[static_cast<std::size_t>(k)]; } // 0-based k
    const std::vector<index_t>& dims() const { return dims_; }
    index_t total() const { return total_; }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }
    bool operator!=(const Shape& other) const { return !(*this == other); }

  private:
    std::vector<index_t> dims_;
    index_t total_ = 1;
};

class Matrix {
  public:
    Matrix() = default;
    Matrix(index_t rows, index_t cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows * cols), 0.0) {
        if (rows < 1 || cols < 1)
            throw shape_error("Matrix: dimensions must be positive");
    }
    Matrix(index_t rows, index_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows < 1 || cols < 1)
            throw shape_error("Matrix: dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(rows * cols))
            throw shape_error("Matrix: data length " + std::to_string(data_.size()) +
                              " != rows*cols " + std::to_string(rows * cols));
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    double& operator()(index_t i, index_t j) {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }
    double operator()(index_t i, index_t j) const {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }

    std::span<double> row(index_t i) {
        return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(index_t i) const {
        return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    static Matrix identity(index_t n) {
        Matrix m(n, n);
        for (index_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (index_t i = 0; i < rows_; ++i)
            for (index_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

class DenseTensor {
  public:
    explicit DenseTensor(Shape shape)
        : shape_(std::move(shape)),
          data_(static_cast<std::size_t>(shape_.total()), 0.0) {}

    DenseTensor(Shape shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != static_cast<std::size_t>(shape_.total()))
            throw shape_error("DenseTensor: data length " + std::to_string(data_.size()) +
                              " != element count " + std::to_string(shape_.total()));
    }

    const Shape& shape() const { return shape_; }
    index_t size() const { return shape_.total(); }

    double operator[](index_t flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](index_t flat) { return data_[static_cast<std::size_t>(flat)]; }

    // 0-based multi-index access.
    index_t flat_index(std::span<const index_t> coords) const {
        index_t flat = 0;
        for (int k = 0; k < shape_.order(); ++k)
            flat = flat * shape_.dim(k) + coords[static_cast<std::size_t>(k)];
        return flat;
    }
    double at(std::span<const index_t> coords) const { return data_[static_cast<std::size_t>(flat_index(coords))]; }
    double& at(std::span<const index_t> coords) { return data_[static_cast<std::size_t>(flat_index(coords))]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const DenseTensor& o) const {
        return shape_ == o.shape_ && data_ == o.data_;
    }

  private:
    Shape shape_;
    std::vector<double> data_;
};

// Sparse tensor in coordinate format. Always canonical: entries sorted
// lexicographically by coordinate, no duplicates, no stored zeros.
// Coordinates are stored 0-based in a flat nnz-by-order array.
class CooTensor {
  public:
    explicit CooTensor(Shape shape) : shape_(std::move(shape)) {}

    const Shape& shape() const { return shape_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    // 0-based coordinate of entry e along mode k (0-based k).
    index_t index(index_t e, int k) const {
        return indices_[static_cast<std::size_t>(e * shape_.order() + k)];
    }
    std::span<const index_t> coords(index_t e) const {
        return {indices_.data() + e * shape_.order(),
                static_cast<std::size_t>(shape_.order())};
    }
    double value(index_t e) const { return values_[static_cast<std::size_t>(e)]; }

    const std::vector<index_t>& indices() const { return indices_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const CooTensor& o) const {
        return shape_ == o.shape_ && indices_ == o.indices_ && values_ == o.values_;
    }

    // Internal: adopt pre-canonicalized storage. Callers must guarantee the
    // canonical invariants; coo_from_triples is the checked path.
    static CooTensor adopt_canonical(Shape shape, std::vector<index_t> indices,
                                     std::vector<double> values) {
        CooTensor t(std::move(shape));
        t.indices_ = std::move(indices);
        t.values_ = std::move(values);
        return t;
    }

  private:
    Shape shape_;
    std::vector<index_t> indices_;
    std::vector<double> values_;
};

// One (coordinates, value) assembly entry; coordinates are 1-based.
struct CooEntry {
    std::vector<index_t> coords;
    double value = 0.0;
};

// Assemble a canonical CooTensor from 1-based (coords, value) entries:
// out-of-range coordinates are rejected, duplicates are summed, and entries
// whose accumulated value is exactly zero are dropped.
inline CooTensor coo_from_triples(const Shape& shape, const std::vector<CooEntry>& entries) {
    const int order = shape.order();
    std::vector<index_t> idx;
    std::vector<double> val;
    idx.reserve(entries.size() * static_cast<std::size_t>(order));
    val.reserve(entries.size());

    for (const CooEntry& e : entries) {
        if (static_cast<int>(e.coords.size()) != order)
            throw shape_error("coo_from_triples: coordinate tuple has " +
                              std::to_string(e.coords.size()) + " components, expected " +
                              std::to_string(order));
        if (!std::isfinite(e.value))
            throw value_error("coo_from_triples: non-finite value " +
                              std::to_string(e.value));
        for (int k = 0; k < order; ++k) {
            const index_t c = e.coords[static_cast<std::size_t>(k)];
            if (c < 1 || c > shape.dim(k))
                throw bounds_error("coo_from_triples: coordinate " + std::to_string(c) +
                                       " out of bounds [1, " + std::to_string(shape.dim(k)) +
                                       "] in mode " + std::to_string(k + 1),
                                   k + 1);
            idx.push_back(c - 1);
        }
        val.push_back(e.value);
    }

    // Sort entries lexicographically by coordinate tuple.
    const index_t n = static_cast<index_t>(val.size());
    std::vector<index_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), index_t{0});
    auto tuple_less = [&](index_t a, index_t b) {
        for (int k = 0; k < order; ++k) {
            const index_t ca = idx[static_cast<std::size_t>(a * order + k)];
            const index_t cb = idx[static_cast<std::size_t>(b * order + k)];
            if (ca != cb)
                return ca < cb;
        }
        return false;
    };
    std::sort(perm.begin(), perm.end(), tuple_less);

    std::vector<index_t> out_idx;
    std::vector<double> out_val;
    out_idx.reserve(idx.size());
    out_val.reserve(val.size());
    index_t e = 0;
    while (e < n) {
        index_t f = e + 1;
        double sum = val[static_cast<std::size_t>(perm[static_cast<std::size_t>(e)])];
        while (f < n && !tuple_less(perm[static_cast<std::size_t>(e)], perm[static_cast<std::size_t>(f)]))
            sum += val[static_cast<std::size_t>(perm[static_cast<std::size_t>(f++)])];
        if (sum != 0.0) {
            const index_t src = perm[static_cast<std::size_t>(e)];
            for (int k = 0; k < order; ++k)
                out_idx.push_back(idx[static_cast<std::size_t>(src * order + k)]);
            out_val.push_back(sum);
        }
        e = f;
    }
    return CooTensor::adopt_canonical(shape, std::move(out_idx), std::move(out_val));
}

namespace detail {

// Visit all 0-based coordinate tuples of `shape` in row-major order (last
// mode fastest); f(coords, flat) is called once per element.
template <class F>
void for_each_index(const Shape& shape, F&& f) {
    const int order = shape.order();
    std::vector<index_t> coords(static_cast<std::size_t>(order), 0);
    const index_t total = shape.total();
    for (index_t flat = 0; flat < total; ++flat) {
        f(std::span<const index_t>(coords.data(), static_cast<std::size_t>(order)), flat);
        for (int k = order - 1; k >= 0; --k) {
            auto& c = coords[static_cast<std::size_t>(k)];
            if (++c < shape.dim(k))
                break;
            c = 0;
        }
    }
}

// 0-based unfolding column index: the lowest off-mode index varies fastest.
inline index_t unfold_col_index0(const Shape& shape, int mode0,
                                 std::span<const index_t> coords) {
    index_t j = 0;
    index_t stride = 1;
    for (int k = 0; k < shape.order(); ++k) {
        if (k == mode0)
            continue;
        j += coords[static_cast<std::size_t>(k)] * stride;
        stride *= shape.dim(k);
    }
    return j;
}

inline void check_mode(const Shape& shape, int mode1, const char* where) {
    if (mode1 < 1 || mode1 > shape.order())
        throw shape_error(std::string(where) + ": mode " + std::to_string(mode1) +
                          " out of range [1, " + std::to_string(shape.order()) + "]");
}

} // namespace detail

// Column index of the mode-n unfolding for a 1-based coordinate tuple:
//   j = 1 + sum_{k != n} (i_k - 1) * prod_{m < k, m != n} I_m
// Both the mode and the returned index are 1-based.
inline index_t unfold_col_index(const Shape& shape, int mode1,
                                std::span<const index_t> coords1) {
    detail::check_mode(shape, mode1, "unfold_col_index");
    index_t j = 1;
    index_t stride = 1;
    for (int k = 0; k < shape.order(); ++k) {
        if (k == mode1 - 1)
            continue;
        j += (coords1[static_cast<std::size_t>(k)] - 1) * stride;
        stride *= shape.dim(k);
    }
    return j;
}

// Mode-n matricization: I_n rows by prod_{k != n} I_k columns.
inline Matrix unfold(const DenseTensor& x, int mode1) {
    detail::check_mode(x.shape(), mode1, "unfold");
    const int mode0 = mode1 - 1;
    const Shape& s = x.shape();
    Matrix m(s.dim(mode0), s.total() / s.dim(mode0));
    detail::for_each_index(s, [&](std::span<const index_t> coords, index_t flat) {
        m(coords[static_cast<std::size_t>(mode0)],
          detail::unfold_col_index0(s, mode0, coords)) = x[flat];
    });
    return m;
}

// Inverse of unfold: rebuild the tensor of the given shape from its mode-n
// matricization. Pure storage permutation, so unfold(fold(m)) == m bitwise.
inline DenseTensor fold(const Matrix& m, int mode1, const Shape& shape) {
    detail::check_mode(shape, mode1, "fold");
    const int mode0 = mode1 - 1;
    if (m.rows() != shape.dim(mode0) || m.cols() != shape.total() / shape.dim(mode0))
        throw shape_error("fold: matrix is " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " +
                          std::to_string(shape.dim(mode0)) + "x" +
                          std::to_string(shape.total() / shape.dim(mode0)));
    DenseTensor x(shape);
    detail::for_each_index(shape, [&](std::span<const index_t> coords, index_t flat) {
        x[flat] = m(coords[static_cast<std::size_t>(mode0)],
                    detail::unfold_col_index0(shape, mode0, coords));
    });
    return x;
}

inline double inner_product(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape())
        throw shape_error("inner_product: shape mismatch");
    double sum = 0.0;
    for (index_t i = 0; i < x.size(); ++i)
        sum += x[i] * y[i];
    return sum;
}

// Sparse-dense inner product; touches only the nonzeros of x.
inline double inner_product(const CooTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape())
        throw shape_error("inner_product: shape mismatch");
    double sum = 0.0;
    for (index_t e = 0; e < x.nnz(); ++e)
        sum += x.value(e) * y.at(x.coords(e));
    return sum;
}

inline double inner_product(const DenseTensor& x, const CooTensor& y) {
    return inner_product(y, x);
}

inline double frobenius_norm(const DenseTensor& x) {
    return std::sqrt(inner_product(x, x));
}

inline double frobenius_norm(const CooTensor& x) {
    double sum = 0.0;
    for (double v : x.values())
        sum += v * v;
    return std::sqrt(sum);
}

inline double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double v : m.data())
        sum += v * v;
    return std::sqrt(sum);
}

// Fraction of cells holding a nonzero, in [0, 1].
inline double sparsity(const CooTensor& x) {
    return static_cast<double>(x.nnz()) / static_cast<double>(x.shape().total());
}

inline DenseTensor densify(const CooTensor& x) {
    DenseTensor d(x.shape());
    for (index_t e = 0; e < x.nnz(); ++e)
        d.at(x.coords(e)) = x.value(e);
    return d;
}

} // namespace stt
