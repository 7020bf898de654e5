#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stt/datagen.hpp"
#include "stt/io.hpp"
#include "stt/linalg.hpp"
#include "stt/rng.hpp"
#include "stt/tensor.hpp"
#include "stt/tucker.hpp"

using namespace stt;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

CooTensor random_coo(const Shape& shape, index_t nnz, std::uint64_t seed) {
    GenSpec spec{shape, std::nullopt, nnz, GenSpec::ValueDist::uniform01, seed};
    return gen_uniform_sparse(spec);
}

} // namespace

TEST_CASE("gen_uniform_sparse hits the requested sparsity exactly") {
    GenSpec spec{Shape({200, 200, 200}), 1e-4, std::nullopt,
                 GenSpec::ValueDist::uniform01, 5};
    const CooTensor t = gen_uniform_sparse(spec);
    CHECK(t.nnz() == 800);
    CHECK(sparsity(t) == Catch::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("gen_uniform_sparse with sparsity one fills every cell") {
    GenSpec spec{Shape({2, 2}), 1.0, std::nullopt, GenSpec::ValueDist::uniform01, 6};
    const CooTensor t = gen_uniform_sparse(spec);
    CHECK(t.nnz() == 4);
}

TEST_CASE("gen_uniform_sparse is deterministic per seed") {
    GenSpec spec{Shape({10, 12, 9}), std::nullopt, 50, GenSpec::ValueDist::uniform01, 7};
    const CooTensor a = gen_uniform_sparse(spec);
    const CooTensor b = gen_uniform_sparse(spec);
    CHECK(a == b);
    spec.seed = 8;
    CHECK(!(gen_uniform_sparse(spec) == a));
}

TEST_CASE("gen_uniform_sparse respects value distributions and bounds") {
    GenSpec unit{Shape({4, 4}), std::nullopt, 7, GenSpec::ValueDist::unit, 9};
    const CooTensor t = gen_uniform_sparse(unit);
    for (index_t e = 0; e < t.nnz(); ++e)
        CHECK(t.value(e) == 1.0);

    GenSpec too_many{Shape({2, 2}), std::nullopt, 5, GenSpec::ValueDist::unit, 9};
    CHECK_THROWS_AS(gen_uniform_sparse(too_many), spec_error);

    // Round-half-up with a floor of one entry.
    GenSpec tiny{Shape({10, 10}), 1e-6, std::nullopt, GenSpec::ValueDist::unit, 9};
    CHECK(gen_uniform_sparse(tiny).nnz() == 1);
}

TEST_CASE("gen_exact_lowrank of all-ones ranks is an outer product") {
    const DenseTensor t = gen_exact_lowrank(Shape({4, 5, 3}), Ranks({1, 1, 1}), 10);
    // Every 2x2 minor of every unfolding vanishes for a rank-1 tensor.
    for (int mode = 1; mode <= 3; ++mode) {
        const Matrix m = unfold(t, mode);
        const SvdResult svd = jacobi_svd(m.rows() >= m.cols() ? m : m.transposed());
        CHECK(svd.s[1] <= 1e-12 * svd.s[0]);
    }
}

TEST_CASE("gen_exact_lowrank unfoldings have numerical rank at most R_n") {
    const Ranks ranks({2, 3, 2});
    const DenseTensor t = gen_exact_lowrank(Shape({6, 7, 5}), ranks, 11);
    for (int mode = 1; mode <= 3; ++mode) {
        const Matrix m = unfold(t, mode);
        const SvdResult svd = jacobi_svd(m.rows() >= m.cols() ? m : m.transposed());
        const index_t r = ranks.rank(mode - 1);
        CHECK(svd.s[static_cast<std::size_t>(r)] <= 1e-10 * svd.s[0]);
        CHECK(svd.s[static_cast<std::size_t>(r - 1)] > 1e-10 * svd.s[0]);
    }
}

TEST_CASE("hooi recovers gen_exact_lowrank at the construction ranks") {
    const Shape shape({8, 6, 7});
    const Ranks ranks({3, 2, 3});
    const DenseTensor t = gen_exact_lowrank(shape, ranks, 12);
    DecompConfig cfg;
    cfg.ranks = ranks;
    cfg.max_iters = 30;
    cfg.tol = 1e-12;
    cfg.seed = 13;
    const auto [model, report] = hooi_dense(t, cfg);
    CHECK(report.final_relative_error <= 1e-8);
}

TEST_CASE("gen_matmul_tensor shape and counts") {
    const CooTensor t = gen_matmul_tensor(5, 5, 5);
    CHECK(t.shape() == Shape({25, 25, 25}));
    CHECK(t.nnz() == 125);
    CHECK(sparsity(t) == Catch::Approx(8e-3).epsilon(1e-12));

    const CooTensor unit = gen_matmul_tensor(1, 1, 1);
    CHECK(unit.shape() == Shape({1, 1, 1}));
    REQUIRE(unit.nnz() == 1);
    CHECK(unit.value(0) == 1.0);
}

TEST_CASE("gen_matmul_tensor satisfies the contraction identity") {
    // sum_{i1,i2} x[i1,i2,i3] * vecrow(A)[i1] * vecrow(B)[i2] = veccol(A*B)[i3]
    rng stream(14);
    for (index_t m = 1; m <= 4; ++m)
        for (index_t k = 1; k <= 4; ++k)
            for (index_t n = 1; n <= 4; ++n) {
                const CooTensor x = gen_matmul_tensor(m, k, n);
                Matrix a(m, k), b(k, n);
                for (double& v : a.data())
                    v = stream.normal();
                for (double& v : b.data())
                    v = stream.normal();
                const Matrix c = matmul(a, b);

                std::vector<double> lhs(static_cast<std::size_t>(m * n), 0.0);
                for (index_t e = 0; e < x.nnz(); ++e) {
                    const index_t i1 = x.index(e, 0);
                    const index_t i2 = x.index(e, 1);
                    const index_t i3 = x.index(e, 2);
                    lhs[static_cast<std::size_t>(i3)] +=
                        x.value(e) * a.data()[static_cast<std::size_t>(i1)] *
                        b.data()[static_cast<std::size_t>(i2)];
                }
                for (index_t col = 0; col < n; ++col)
                    for (index_t row = 0; row < m; ++row)
                        CHECK(lhs[static_cast<std::size_t>(col * m + row)] ==
                              Catch::Approx(c(row, col)).epsilon(1e-12).margin(1e-12));
            }
}

TEST_CASE("compression_ratio formula") {
    // Full ranks store strictly more than the raw tensor.
    CHECK(compression_ratio(Shape({6, 7}), Ranks({6, 7})) < 1.0);

    CHECK(compression_ratio(Shape({130, 150}), Ranks({30, 35})) ==
          Catch::Approx(19500.0 / 10200.0).epsilon(1e-12));

    // Closed form for rank-(1,1) on an n-by-n matrix.
    const double n = 24;
    CHECK(compression_ratio(Shape({24, 24}), Ranks({1, 1})) ==
          Catch::Approx(n * n / (1.0 + 2.0 * n)).epsilon(1e-12));
}

TEST_CASE("tns reader parses the documented layout") {
    const auto path = temp_file("stt_parse.tns");
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "4 5 5 5 5 4\n";
        out << "\n";
        out << "1 1 1 1 2.0\n";
        out << "1 1 1 5 7.5\n";
        out << "1 1 3 5 4\n";
        out << "2 2 2 4 5\n";
    }
    const CooTensor t = read_tns(path.string());
    CHECK(t.shape() == Shape({5, 5, 5, 5}));
    REQUIRE(t.nnz() == 4);
    CHECK(t.value(0) == 2.0);
    CHECK(t.value(1) == 7.5);
    CHECK(t.index(3, 3) == 3);
    std::filesystem::remove(path);
}

TEST_CASE("tns write-read round trip is exact") {
    const auto path = temp_file("stt_roundtrip.tns");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CooTensor t = random_coo(Shape({7, 9, 5}), 30, 900 + seed);
        write_tns(t, path.string());
        const CooTensor back = read_tns(path.string());
        CHECK(back == t); // bitwise, full-precision values
    }
    std::filesystem::remove(path);
}

TEST_CASE("tns empty body") {
    const auto path = temp_file("stt_empty.tns");
    {
        std::ofstream out(path);
        out << "3 4 5 6 0\n";
    }
    const CooTensor t = read_tns(path.string());
    CHECK(t.nnz() == 0);
    CHECK(t.shape() == Shape({4, 5, 6}));
    std::filesystem::remove(path);
}

TEST_CASE("tns error reporting") {
    const auto path = temp_file("stt_bad.tns");

    {
        std::ofstream out(path);
        out << "2 3 3 1\n1 2\n";
    }
    try {
        read_tns(path.string());
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line == 2);
    }

    {
        std::ofstream out(path);
        out << "2 3 3 2\n1 2 1.5\n";
    }
    CHECK_THROWS_AS(read_tns(path.string()), format_error); // nnz mismatch

    {
        std::ofstream out(path);
        out << "2 3 3 1\n1 4 1.5\n";
    }
    CHECK_THROWS_AS(read_tns(path.string()), parse_error); // out of bounds

    {
        std::ofstream out(path);
        out << "2 3 3 1\n1 x 1.5\n";
    }
    CHECK_THROWS_AS(read_tns(path.string()), parse_error);

    CHECK_THROWS_AS(read_tns("/nonexistent/file.tns"), io_error);
    std::filesystem::remove(path);
}

TEST_CASE("pgm reading drops black pixels and scales to unit range") {
    const auto path = temp_file("stt_black.pgm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n4 3\n255\n";
        for (int i = 0; i < 12; ++i)
            out.put('\0');
    }
    const CooTensor black = read_pgm(path.string());
    CHECK(black.nnz() == 0);
    CHECK(black.shape() == Shape({3, 4}));

    {
        std::ofstream out(path, std::ios::binary);
        out << "P2\n4 3\n255\n";
        out << "0 0 0 0\n0 255 0 0\n0 0 0 0\n";
    }
    const CooTensor single = read_pgm(path.string());
    REQUIRE(single.nnz() == 1);
    CHECK(single.value(0) == 1.0);
    CHECK(single.index(0, 0) == 1);
    CHECK(single.index(0, 1) == 1);
    std::filesystem::remove(path);
}

TEST_CASE("pgm round trip stays within one quantization step") {
    const auto path = temp_file("stt_quant.pgm");
    const Shape shape({6, 8});
    rng stream(15);
    DenseTensor img(shape);
    for (double& v : img.data())
        v = stream.uniform01();

    write_pgm(img, path.string());
    const CooTensor back = read_pgm(path.string());
    const DenseTensor dense = densify(back);
    for (index_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(dense[i] - img[i]) <= 1.0 / 255.0 + 1e-12);

    // Second write-read cycle is stable: quantization is idempotent.
    write_pgm(dense, path.string());
    const DenseTensor dense2 = densify(read_pgm(path.string()));
    for (index_t i = 0; i < img.size(); ++i)
        CHECK(dense2[i] == dense[i]);
    std::filesystem::remove(path);
}

TEST_CASE("pgm 16-bit input and clamping on write") {
    const auto path = temp_file("stt_16bit.pgm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 1\n65535\n";
        out.put(static_cast<char>(0xFF));
        out.put(static_cast<char>(0xFF)); // 65535 -> 1.0
        out.put(static_cast<char>(0x00));
        out.put(static_cast<char>(0x01)); // 1 -> 1/65535
    }
    const CooTensor t = read_pgm(path.string());
    REQUIRE(t.nnz() == 2);
    CHECK(t.value(0) == 1.0);
    CHECK(t.value(1) == Catch::Approx(1.0 / 65535.0).epsilon(1e-12));

    DenseTensor over(Shape({1, 2}));
    over[0] = 1.5;  // clamps to 255
    over[1] = -0.5; // clamps to 0
    write_pgm(over, path.string());
    const CooTensor back = read_pgm(path.string());
    REQUIRE(back.nnz() == 1);
    CHECK(back.value(0) == 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("pgm rejects unsupported magic numbers") {
    const auto path = temp_file("stt_magic.pgm");
    {
        std::ofstream out(path, std::ios::binary);
        out << "P6\n2 2\n255\n";
        for (int i = 0; i < 12; ++i)
            out.put('\7');
    }
    CHECK_THROWS_AS(read_pgm(path.string()), format_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_pgm("/nonexistent/file.pgm"), io_error);
}

TEST_CASE("write_pgm requires a 2-way tensor") {
    CHECK_THROWS_AS(write_pgm(DenseTensor(Shape({2, 2, 2})), temp_file("x.pgm").string()),
                    shape_error);
}
