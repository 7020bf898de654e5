#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stt/errors.hpp"
#include "stt/tensor.hpp"

// Text-format tensor I/O.
//
// .tns grammar (one tensor per file):
//   - '#' starts a comment; comment and blank lines are allowed anywhere
//   - first data line is the header:  N I_1 ... I_N nnz
//   - exactly nnz entry lines follow: N 1-based integer coordinates, then
//     the value
// Values are written with 17 significant digits, so write/read round-trips
// are bit-exact. Duplicate coordinates in a file are summed on read.
//
// PGM: P2 (ASCII) and P5 (binary) are read, maxval up to 65535 (P5 stores
// two big-endian bytes per pixel above 255). Pixels are scaled to [0, 1] and
// zeros dropped. Writing clamps to [0, 1], quantizes to maxval 255, and
// always emits binary P5.

namespace stt {

namespace detail {

inline bool parse_int(const std::string& tok, index_t& out) {
    if (tok.empty())
        return false;
    std::size_t pos = 0;
    try {
        out = std::stoll(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

inline bool parse_real(const std::string& tok, double& out) {
    if (tok.empty())
        return false;
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream in(line);
    std::string t;
    while (in >> t)
        toks.push_back(t);
    return toks;
}

inline bool data_line(const std::string& line) {
    for (char c : line) {
        if (c == '#')
            return false;
        if (!std::isspace(static_cast<unsigned char>(c)))
            return true;
    }
    return false;
}

} // namespace detail

inline CooTensor read_tns(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("read_tns: cannot open " + path);

    std::string line;
    long lineno = 0;

    // Header.
    std::vector<index_t> dims;
    index_t declared_nnz = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::data_line(line))
            continue;
        const auto toks = detail::split_ws(line);
        index_t order = 0;
        if (!detail::parse_int(toks[0], order) || order < 1)
            throw parse_error("read_tns: bad order in header at line " +
                                  std::to_string(lineno),
                              lineno);
        if (static_cast<index_t>(toks.size()) != order + 2)
            throw parse_error("read_tns: header at line " + std::to_string(lineno) +
                                  " has " + std::to_string(toks.size()) +
                                  " fields, expected " + std::to_string(order + 2),
                              lineno);
        for (index_t k = 0; k < order; ++k) {
            index_t d = 0;
            if (!detail::parse_int(toks[static_cast<std::size_t>(1 + k)], d))
                throw parse_error("read_tns: bad dimension at line " +
                                      std::to_string(lineno),
                                  lineno);
            dims.push_back(d);
        }
        if (!detail::parse_int(toks.back(), declared_nnz) || declared_nnz < 0)
            throw parse_error("read_tns: bad nnz count at line " + std::to_string(lineno),
                              lineno);
        break;
    }
    if (declared_nnz < 0)
        throw format_error("read_tns: " + path + " has no header line");

    Shape shape{[&] {
        try {
            return Shape(dims);
        } catch (const shape_error& e) {
            throw format_error(std::string("read_tns: invalid header shape: ") + e.what());
        }
    }()};

    std::vector<CooEntry> entries;
    entries.reserve(static_cast<std::size_t>(declared_nnz));
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::data_line(line))
            continue;
        const auto toks = detail::split_ws(line);
        if (static_cast<int>(toks.size()) != shape.order() + 1)
            throw parse_error("read_tns: line " + std::to_string(lineno) + " has " +
                                  std::to_string(toks.size()) + " fields, expected " +
                                  std::to_string(shape.order() + 1),
                              lineno);
        CooEntry e;
        e.coords.resize(static_cast<std::size_t>(shape.order()));
        for (int k = 0; k < shape.order(); ++k)
            if (!detail::parse_int(toks[static_cast<std::size_t>(k)],
                                   e.coords[static_cast<std::size_t>(k)]))
                throw parse_error("read_tns: bad coordinate at line " +
                                      std::to_string(lineno),
                                  lineno);
        if (!detail::parse_real(toks.back(), e.value))
            throw parse_error("read_tns: bad value at line " + std::to_string(lineno),
                              lineno);
        for (int k = 0; k < shape.order(); ++k) {
            const index_t c = e.coords[static_cast<std::size_t>(k)];
            if (c < 1 || c > shape.dim(k))
                throw parse_error("read_tns: coordinate " + std::to_string(c) +
                                      " out of bounds [1, " + std::to_string(shape.dim(k)) +
                                      "] in mode " + std::to_string(k + 1) + " at line " +
                                      std::to_string(lineno),
                                  lineno);
        }
        entries.push_back(std::move(e));
    }
    if (static_cast<index_t>(entries.size()) != declared_nnz)
        throw format_error("read_tns: header declares " + std::to_string(declared_nnz) +
                           " entries, file has " + std::to_string(entries.size()));
    return coo_from_triples(shape, entries);
}

inline void write_tns(const CooTensor& t, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("write_tns: cannot open " + path);
    const int order = t.shape().order();
    out << order;
    for (int k = 0; k < order; ++k)
        out << ' ' << t.shape().dim(k);
    out << ' ' << t.nnz() << '\n';
    char buf[64];
    for (index_t e = 0; e < t.nnz(); ++e) {
        for (int k = 0; k < order; ++k)
            out << t.index(e, k) + 1 << ' ';
        std::snprintf(buf, sizeof(buf), "%.17g", t.value(e));
        out << buf << '\n';
    }
    if (!out)
        throw io_error("write_tns: failed writing " + path);
}

namespace detail {

// Next whitespace-separated token of a PGM header, skipping '#' comments.
inline std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c))
            continue;
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
            tok.push_back(static_cast<char>(in.get()));
        return tok;
    }
    return tok;
}

} // namespace detail

// Grayscale image as a 2-way sparse tensor (rows, cols); pixel values are
// scaled to [0, 1] and black pixels dropped.
inline CooTensor read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("read_pgm: cannot open " + path);

    const std::string magic = detail::pgm_token(in);
    if (magic != "P2" && magic != "P5")
        throw format_error("read_pgm: unsupported magic number '" + magic + "' in " + path);

    index_t width = 0, height = 0, maxval = 0;
    if (!detail::parse_int(detail::pgm_token(in), width) ||
        !detail::parse_int(detail::pgm_token(in), height) ||
        !detail::parse_int(detail::pgm_token(in), maxval))
        throw format_error("read_pgm: malformed header in " + path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 65535)
        throw format_error("read_pgm: unsupported dimensions or maxval in " + path);

    const Shape shape({height, width});
    std::vector<index_t> indices;
    std::vector<double> values;

    auto push = [&](index_t r, index_t c, index_t pixel) {
        if (pixel == 0)
            return;
        indices.push_back(r);
        indices.push_back(c);
        values.push_back(static_cast<double>(pixel) / static_cast<double>(maxval));
    };

    if (magic == "P2") {
        for (index_t r = 0; r < height; ++r)
            for (index_t c = 0; c < width; ++c) {
                index_t pixel = 0;
                const std::string tok = detail::pgm_token(in);
                if (!detail::parse_int(tok, pixel) || pixel < 0 || pixel > maxval)
                    throw format_error("read_pgm: bad pixel value in " + path);
                push(r, c, pixel);
            }
    } else {
        in.get(); // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        for (index_t r = 0; r < height; ++r)
            for (index_t c = 0; c < width; ++c) {
                int hi = in.get();
                int lo = bytes == 2 ? in.get() : 0;
                if (hi == EOF || (bytes == 2 && lo == EOF))
                    throw format_error("read_pgm: truncated pixel data in " + path);
                const index_t pixel = bytes == 2 ? (static_cast<index_t>(hi) << 8) | lo
                                                 : static_cast<index_t>(hi);
                if (pixel > maxval)
                    throw format_error("read_pgm: pixel above maxval in " + path);
                push(r, c, pixel);
            }
    }
    // Row-major scan order is already canonical.
    return CooTensor::adopt_canonical(shape, std::move(indices), std::move(values));
}

inline void write_pgm(const DenseTensor& t, const std::string& path) {
    if (t.shape().order() != 2)
        throw shape_error("write_pgm: tensor must be 2-way");
    const index_t height = t.shape().dim(0);
    const index_t width = t.shape().dim(1);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("write_pgm: cannot open " + path);
    out << "P5\n" << width << ' ' << height << "\n255\n";
    for (index_t i = 0; i < t.size(); ++i) {
        double v = t[i];
        v = std::min(1.0, std::max(0.0, v));
        out.put(static_cast<char>(static_cast<int>(std::lround(v * 255.0))));
    }
    if (!out)
        throw io_error("write_pgm: failed writing " + path);
}

} // namespace stt
