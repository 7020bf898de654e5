// Command-line front end: decompose, generate, bench, and compress-image.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
// Every command is deterministic for a fixed --seed except the timing
// fields of its report. STT_THREADS caps bench parallelism (0 = auto,
// unset = sequential).

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stt/stt.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

stt::Solver parse_solver(const std::string& name) {
    if (name == "qrp")
        return stt::Solver::qrp;
    if (name == "svd")
        return stt::Solver::svd_oracle;
    throw UsageError("unknown solver '" + name + "' (expected qrp or svd)");
}

std::string solver_name(stt::Solver s) {
    return s == stt::Solver::qrp ? "qrp" : "svd";
}

// Analytic footprint of one decomposition: input, factors, core, and the
// largest per-mode work buffers.
std::int64_t peak_memory_estimate(const stt::Shape& shape, const stt::Ranks& ranks,
                                  std::int64_t nnz) {
    const int order = shape.order();
    std::int64_t bytes = nnz * (8 * order + 8);
    std::int64_t y_max = 0;
    for (int n = 0; n < order; ++n) {
        bytes += 8 * shape.dim(n) * ranks.rank(n);
        y_max = std::max(y_max, shape.dim(n) * ranks.product_excluding(n));
    }
    bytes += 8 * ranks.product();
    bytes += 8 * y_max;
    bytes += 8 * ranks.product_excluding(order - 1) * shape.dim(order - 1);
    return bytes;
}

json report_json(const json& input, const stt::DecompConfig& cfg,
                 const stt::DecompReport& rep, const stt::Shape& shape,
                 std::int64_t nnz) {
    json j;
    j["input"] = input;
    json config;
    config["ranks"] = cfg.ranks.r;
    config["max_iters"] = cfg.max_iters;
    config["tol"] = cfg.tol;
    config["seed"] = cfg.seed;
    config["solver"] = solver_name(cfg.solver);
    config["batch_rows"] = cfg.batch_rows;
    j["config"] = config;
    j["iterations"] = rep.iterations;
    j["fits"] = rep.fits;
    j["relative_error"] = rep.final_relative_error;
    j["compression_ratio"] = stt::compression_ratio(shape, cfg.ranks);
    j["kron_calls"] = rep.kron_calls;
    j["qrp_calls"] = rep.qrp_calls;
    j["peak_memory_estimate_bytes"] = peak_memory_estimate(shape, cfg.ranks, nnz);
    json timing;
    timing["init"] = rep.seconds_init;
    timing["power"] = rep.seconds_power;
    timing["factor"] = rep.seconds_factor;
    timing["core"] = rep.seconds_core;
    timing["error"] = rep.seconds_error;
    timing["total"] = rep.seconds_total;
    j["timing_s"] = timing;
    return j;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out)
        throw stt::io_error("cannot open " + path);
    out << body;
    if (!out)
        throw stt::io_error("failed writing " + path);
}

void write_report(const json& j, const std::string& path, const std::string& format) {
    if (format == "json") {
        write_text(path, j.dump(2) + "\n");
        return;
    }
    // Flat single-row CSV with the scalar fields.
    std::string header = "iterations,final_fit,relative_error,compression_ratio,"
                         "kron_calls,qrp_calls,peak_memory_estimate_bytes,seconds_total";
    char buf[512];
    const double final_fit = j["fits"].empty() ? 0.0 : j["fits"].back().get<double>();
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%lld,%lld,%lld,%.6f",
                  j["iterations"].get<int>(), final_fit,
                  j["relative_error"].get<double>(), j["compression_ratio"].get<double>(),
                  static_cast<long long>(j["kron_calls"].get<std::int64_t>()),
                  static_cast<long long>(j["qrp_calls"].get<std::int64_t>()),
                  static_cast<long long>(j["peak_memory_estimate_bytes"].get<std::int64_t>()),
                  j["timing_s"]["total"].get<double>());
    write_text(path, header + "\n" + buf + "\n");
}

// Core as a .tns-style dense dump: every element, 1-based coordinates.
void write_core_dump(const stt::DenseTensor& core, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw stt::io_error("cannot open " + path);
    out << core.shape().order();
    for (int k = 0; k < core.shape().order(); ++k)
        out << ' ' << core.shape().dim(k);
    out << ' ' << core.size() << '\n';
    char buf[64];
    stt::detail::for_each_index(core.shape(), [&](std::span<const stt::index_t> c,
                                                  stt::index_t flat) {
        for (std::size_t k = 0; k < c.size(); ++k)
            out << c[k] + 1 << ' ';
        std::snprintf(buf, sizeof(buf), "%.17g", core[flat]);
        out << buf << '\n';
    });
    if (!out)
        throw stt::io_error("failed writing " + path);
}

void write_factor(const stt::Matrix& u, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw stt::io_error("cannot open " + path);
    char buf[64];
    for (stt::index_t i = 0; i < u.rows(); ++i) {
        for (stt::index_t j = 0; j < u.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", u(i, j));
            out << buf << (j + 1 < u.cols() ? " " : "");
        }
        out << '\n';
    }
    if (!out)
        throw stt::io_error("failed writing " + path);
}

stt::Ranks make_ranks(const std::vector<stt::index_t>& ranks, const stt::Shape& shape) {
    if (static_cast<int>(ranks.size()) != shape.order())
        throw UsageError("--ranks has " + std::to_string(ranks.size()) +
                         " entries, tensor order is " + std::to_string(shape.order()));
    stt::Ranks r(ranks);
    try {
        r.validate(shape);
    } catch (const stt::rank_error& e) {
        throw UsageError(e.what());
    }
    return r;
}

std::string default_prefix(const std::string& input) {
    const fs::path p(input);
    return (p.parent_path() / p.stem()).string();
}

int worker_threads() {
    const char* env = std::getenv("STT_THREADS");
    if (env == nullptr || *env == '\0')
        return 1;
    const long v = std::strtol(env, nullptr, 10);
    if (v == 0)
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return static_cast<int>(std::max(1l, v));
}

// ---- decompose ------------------------------------------------------------

int cmd_decompose(const std::string& input, const std::vector<stt::index_t>& ranks,
                  int iters, double tol, std::uint64_t seed, const std::string& solver,
                  stt::index_t batch_rows, std::string output, const std::string& format) {
    const bool is_pgm = fs::path(input).extension() == ".pgm";
    const stt::CooTensor x = is_pgm ? stt::read_pgm(input) : stt::read_tns(input);

    stt::DecompConfig cfg;
    cfg.ranks = make_ranks(ranks, x.shape());
    cfg.max_iters = iters;
    cfg.tol = tol;
    cfg.seed = seed;
    cfg.solver = parse_solver(solver);
    cfg.batch_rows = batch_rows;

    const auto [model, rep] = stt::hooi_sparse(x, cfg);

    if (output.empty())
        output = default_prefix(input);
    write_core_dump(model.core, output + ".core.tns");
    for (std::size_t n = 0; n < model.factors.size(); ++n)
        write_factor(model.factors[n], output + ".factor" + std::to_string(n + 1) + ".txt");

    json input_desc;
    input_desc["kind"] = is_pgm ? "pgm" : "tns";
    input_desc["path"] = input;
    input_desc["shape"] = x.shape().dims();
    input_desc["nnz"] = x.nnz();
    input_desc["sparsity"] = stt::sparsity(x);
    const json j = report_json(input_desc, cfg, rep, x.shape(), x.nnz());
    write_report(j, output + ".report." + format, format);
    std::cout << j.dump(2) << '\n';
    return 0;
}

// ---- generate ---------------------------------------------------------------

int cmd_generate_uniform(const std::vector<stt::index_t>& shape_dims,
                         std::optional<double> sparsity_opt,
                         std::optional<stt::index_t> nnz_opt, const std::string& dist,
                         std::uint64_t seed, const std::string& output) {
    stt::GenSpec spec{stt::Shape(shape_dims), sparsity_opt, nnz_opt,
                      dist == "unit" ? stt::GenSpec::ValueDist::unit
                                     : stt::GenSpec::ValueDist::uniform01,
                      seed};
    if (dist != "unit" && dist != "uniform")
        throw UsageError("unknown value distribution '" + dist + "'");
    if (!sparsity_opt && !nnz_opt)
        throw UsageError("generate uniform needs --sparsity or --nnz");
    stt::write_tns(stt::gen_uniform_sparse(spec), output);
    return 0;
}

int cmd_generate_lowrank(const std::vector<stt::index_t>& shape_dims,
                         const std::vector<stt::index_t>& ranks, std::uint64_t seed,
                         const std::string& output) {
    const stt::Shape shape(shape_dims);
    const stt::Ranks r = make_ranks(ranks, shape);
    const stt::DenseTensor t = stt::gen_exact_lowrank(shape, r, seed);
    // Dense tensor as COO: keep the nonzero cells (generic draws have no zeros).
    std::vector<stt::CooEntry> entries;
    entries.reserve(static_cast<std::size_t>(t.size()));
    stt::detail::for_each_index(shape, [&](std::span<const stt::index_t> c,
                                           stt::index_t flat) {
        if (t[flat] == 0.0)
            return;
        stt::CooEntry e;
        for (stt::index_t v : c)
            e.coords.push_back(v + 1);
        e.value = t[flat];
        entries.push_back(std::move(e));
    });
    stt::write_tns(stt::coo_from_triples(shape, entries), output);
    return 0;
}

int cmd_generate_matmul(stt::index_t m, stt::index_t k, stt::index_t n,
                        const std::string& output) {
    stt::write_tns(stt::gen_matmul_tensor(m, k, n), output);
    return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchRow {
    double sparsity = 0.0;
    std::string solver;
    std::uint64_t seed = 0;
    stt::index_t nnz = 0;
    int iterations = 0;
    double seconds_total = 0.0;
    double seconds_per_sweep = 0.0;
    double fit = 0.0;
    std::int64_t kron_calls = 0;
    std::int64_t qrp_calls = 0;
    double qrp_flops_model = 0.0;
    double svd_flops_model = 0.0;
};

// Modeled factor-extraction cost of one full sweep over all modes.
void sweep_flop_models(const stt::Shape& shape, const stt::Ranks& ranks, double& qrp_f,
                       double& svd_f) {
    qrp_f = 0.0;
    svd_f = 0.0;
    for (int n = 0; n < shape.order(); ++n) {
        const double m = static_cast<double>(shape.dim(n));
        const double c = static_cast<double>(ranks.product_excluding(n));
        if (m >= c) {
            qrp_f += stt::qrp_flops(m, c);
            svd_f += stt::svd_flops(m, c);
        } else {
            qrp_f += m * m * c + stt::qrp_flops(m, m); // Gram assembly + square QRP
            svd_f += stt::svd_flops(c, m);
        }
    }
}

int cmd_bench(const std::vector<stt::index_t>& shape_dims,
              const std::vector<stt::index_t>& ranks, std::vector<double> sparsities,
              std::vector<std::uint64_t> seeds, std::vector<std::string> solvers,
              int iters, double tol, stt::index_t batch_rows, const std::string& output,
              const std::string& format) {
    const stt::Shape shape(shape_dims);
    const stt::Ranks r = make_ranks(ranks, shape);
    if (seeds.empty())
        seeds = {0};
    if (solvers.empty())
        solvers = {"qrp"};
    for (const auto& s : solvers)
        parse_solver(s); // validate early

    double qrp_model = 0.0, svd_model = 0.0;
    sweep_flop_models(shape, r, qrp_model, svd_model);

    struct Job {
        double sparsity;
        std::string solver;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double sp : sparsities)
        for (const auto& so : solvers)
            for (std::uint64_t se : seeds)
                jobs.push_back(Job{sp, so, se});

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto run_jobs = [&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
            const Job& job = jobs[i];
            stt::GenSpec spec{shape, job.sparsity, std::nullopt,
                              stt::GenSpec::ValueDist::uniform01, job.seed};
            const stt::CooTensor x = stt::gen_uniform_sparse(spec);
            stt::DecompConfig cfg;
            cfg.ranks = r;
            cfg.max_iters = iters;
            cfg.tol = tol;
            cfg.seed = job.seed;
            cfg.solver = parse_solver(job.solver);
            cfg.batch_rows = batch_rows;
            const auto [model, rep] = stt::hooi_sparse(x, cfg);

            BenchRow row;
            row.sparsity = job.sparsity;
            row.solver = job.solver;
            row.seed = job.seed;
            row.nnz = x.nnz();
            row.iterations = rep.iterations;
            row.seconds_total = rep.seconds_total;
            row.seconds_per_sweep =
                (rep.seconds_power + rep.seconds_factor + rep.seconds_core) /
                std::max(1, rep.iterations);
            row.fit = rep.fits.empty() ? 0.0 : rep.fits.back();
            row.kron_calls = rep.kron_calls;
            row.qrp_calls = rep.qrp_calls;
            row.qrp_flops_model = qrp_model;
            row.svd_flops_model = svd_model;
            rows[i] = row;
        }
    };

    const int threads = std::min<int>(worker_threads(), static_cast<int>(jobs.size()) + 1);
    if (threads <= 1 || jobs.size() <= 1) {
        run_jobs();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(run_jobs);
        for (auto& th : pool)
            th.join();
    }

    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        if (a.sparsity != b.sparsity)
            return a.sparsity < b.sparsity;
        if (a.solver != b.solver)
            return a.solver < b.solver;
        return a.seed < b.seed;
    });

    std::string body;
    if (format == "json") {
        json arr = json::array();
        for (const BenchRow& row : rows) {
            json j;
            j["sparsity"] = row.sparsity;
            j["solver"] = row.solver;
            j["seed"] = row.seed;
            j["nnz"] = row.nnz;
            j["iterations"] = row.iterations;
            j["seconds_total"] = row.seconds_total;
            j["seconds_per_sweep"] = row.seconds_per_sweep;
            j["fit"] = row.fit;
            j["kron_calls"] = row.kron_calls;
            j["qrp_calls"] = row.qrp_calls;
            j["qrp_flops_model"] = row.qrp_flops_model;
            j["svd_flops_model"] = row.svd_flops_model;
            arr.push_back(j);
        }
        body = arr.dump(2) + "\n";
    } else {
        body = "sparsity,solver,seed,nnz,iterations,seconds_total,seconds_per_sweep,"
               "fit,kron_calls,qrp_calls,qrp_flops_model,svd_flops_model\n";
        char buf[512];
        for (const BenchRow& row : rows) {
            std::snprintf(buf, sizeof(buf),
                          "%.17g,%s,%llu,%lld,%d,%.6f,%.6f,%.17g,%lld,%lld,%.17g,%.17g\n",
                          row.sparsity, row.solver.c_str(),
                          static_cast<unsigned long long>(row.seed),
                          static_cast<long long>(row.nnz), row.iterations,
                          row.seconds_total, row.seconds_per_sweep, row.fit,
                          static_cast<long long>(row.kron_calls),
                          static_cast<long long>(row.qrp_calls), row.qrp_flops_model,
                          row.svd_flops_model);
            body += buf;
        }
    }
    if (output.empty())
        std::cout << body;
    else
        write_text(output, body);
    return 0;
}

// ---- compress-image ---------------------------------------------------------

int cmd_compress_image(const std::string& input, const std::vector<stt::index_t>& ranks,
                       int iters, double tol, std::uint64_t seed,
                       const std::string& solver, stt::index_t batch_rows,
                       std::string output) {
    const stt::CooTensor img = stt::read_pgm(input);
    if (ranks.size() != 2)
        throw UsageError("compress-image expects exactly two ranks");

    stt::DecompConfig cfg;
    cfg.ranks = make_ranks(ranks, img.shape());
    cfg.max_iters = iters;
    cfg.tol = tol;
    cfg.seed = seed;
    cfg.solver = parse_solver(solver);
    cfg.batch_rows = batch_rows;

    const auto [model, rep] = stt::hooi_sparse(img, cfg);
    const stt::DenseTensor recon = stt::reconstruct(model);

    if (output.empty())
        output = default_prefix(input) + ".recon";
    stt::write_pgm(recon, output + ".pgm");

    json input_desc;
    input_desc["kind"] = "pgm";
    input_desc["path"] = input;
    input_desc["shape"] = img.shape().dims();
    input_desc["nnz"] = img.nnz();
    input_desc["sparsity"] = stt::sparsity(img);
    const json j = report_json(input_desc, cfg, rep, img.shape(), img.nnz());
    write_report(j, output + ".report.json", "json");
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse Tucker decomposition toolkit"};
    app.require_subcommand(1);

    // decompose
    auto* dec = app.add_subcommand("decompose", "Decompose a .tns or .pgm tensor");
    std::string dec_input;
    std::vector<stt::index_t> dec_ranks;
    int dec_iters = 50;
    double dec_tol = 1e-6;
    std::uint64_t dec_seed = 0;
    std::string dec_solver = "qrp";
    stt::index_t dec_batch = 32;
    std::string dec_output;
    std::string dec_format = "json";
    dec->add_option("input", dec_input, "input tensor (.tns or .pgm)")->required();
    dec->add_option("--ranks", dec_ranks, "target multilinear rank, e.g. 8,8,8")
        ->required()
        ->delimiter(',');
    dec->add_option("--iters", dec_iters, "maximum sweeps");
    dec->add_option("--tol", dec_tol, "relative fit-change stop (0 disables)");
    dec->add_option("--seed", dec_seed, "initialization seed");
    dec->add_option("--solver", dec_solver, "qrp or svd");
    dec->add_option("--batch-rows", dec_batch, "TTM batch rows");
    dec->add_option("--output", dec_output, "output prefix");
    dec->add_option("--format", dec_format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // generate
    auto* gen = app.add_subcommand("generate", "Write synthetic tensors");
    gen->require_subcommand(1);

    auto* gu = gen->add_subcommand("uniform", "uniformly scattered nonzeros");
    std::vector<stt::index_t> gu_shape;
    double gu_sparsity = -1.0;
    stt::index_t gu_nnz = -1;
    std::string gu_dist = "uniform";
    std::uint64_t gu_seed = 0;
    std::string gu_output;
    gu->add_option("--shape", gu_shape, "mode sizes, e.g. 50,50,50")
        ->required()
        ->delimiter(',');
    gu->add_option("--sparsity", gu_sparsity, "nnz fraction in (0,1]");
    gu->add_option("--nnz", gu_nnz, "exact nonzero count");
    gu->add_option("--dist", gu_dist, "value distribution: uniform or unit");
    gu->add_option("--seed", gu_seed, "generator seed");
    gu->add_option("--output", gu_output, "output .tns path")->required();

    auto* gl = gen->add_subcommand("lowrank", "exact low multilinear rank");
    std::vector<stt::index_t> gl_shape, gl_ranks;
    std::uint64_t gl_seed = 0;
    std::string gl_output;
    gl->add_option("--shape", gl_shape, "mode sizes")->required()->delimiter(',');
    gl->add_option("--ranks", gl_ranks, "construction ranks")->required()->delimiter(',');
    gl->add_option("--seed", gl_seed, "generator seed");
    gl->add_option("--output", gl_output, "output .tns path")->required();

    auto* gm = gen->add_subcommand("matmul", "matrix-multiplication binary tensor");
    stt::index_t gm_m = 0, gm_k = 0, gm_n = 0;
    std::string gm_output;
    gm->add_option("m", gm_m, "rows of A")->required();
    gm->add_option("k", gm_k, "cols of A / rows of B")->required();
    gm->add_option("n", gm_n, "cols of B")->required();
    gm->add_option("--output", gm_output, "output .tns path")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "sparsity sweep benchmark");
    std::vector<stt::index_t> be_shape, be_ranks;
    std::vector<double> be_sparsities;
    std::vector<std::uint64_t> be_seeds;
    std::vector<std::string> be_solvers;
    int be_iters = 5;
    double be_tol = 0.0;
    stt::index_t be_batch = 32;
    std::string be_output;
    std::string be_format = "csv";
    bench->add_option("--shape", be_shape, "mode sizes")->required()->delimiter(',');
    bench->add_option("--ranks", be_ranks, "decomposition ranks")->required()->delimiter(',');
    bench->add_option("--sparsities", be_sparsities, "sparsity points, e.g. 1e-4,1e-3")
        ->delimiter(',');
    bench->add_option("--seeds", be_seeds, "seeds per point")->delimiter(',');
    bench->add_option("--solvers", be_solvers, "solvers to compare (qrp,svd)")
        ->delimiter(',');
    bench->add_option("--iters", be_iters, "sweeps per run");
    bench->add_option("--tol", be_tol, "stop tolerance (default 0: fixed sweeps)");
    bench->add_option("--batch-rows", be_batch, "TTM batch rows");
    bench->add_option("--output", be_output, "CSV/JSON path (default stdout)");
    bench->add_option("--format", be_format, "csv or json")
        ->check(CLI::IsMember({"json", "csv"}));

    // compress-image
    auto* ci = app.add_subcommand("compress-image", "2-way decomposition of a PGM image");
    std::string ci_input;
    std::vector<stt::index_t> ci_ranks;
    int ci_iters = 12;
    double ci_tol = 0.0;
    std::uint64_t ci_seed = 0;
    std::string ci_solver = "qrp";
    stt::index_t ci_batch = 32;
    std::string ci_output;
    ci->add_option("input", ci_input, "input .pgm image")->required();
    ci->add_option("--ranks", ci_ranks, "two ranks, e.g. 30,35")->required()->delimiter(',');
    ci->add_option("--iters", ci_iters, "sweeps");
    ci->add_option("--tol", ci_tol, "stop tolerance (default 0: fixed sweeps)");
    ci->add_option("--seed", ci_seed, "initialization seed");
    ci->add_option("--solver", ci_solver, "qrp or svd");
    ci->add_option("--batch-rows", ci_batch, "TTM batch rows");
    ci->add_option("--output", ci_output, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (dec->parsed())
            return cmd_decompose(dec_input, dec_ranks, dec_iters, dec_tol, dec_seed,
                                 dec_solver, dec_batch, dec_output, dec_format);
        if (gu->parsed())
            return cmd_generate_uniform(
                gu_shape,
                gu_sparsity >= 0.0 ? std::optional<double>(gu_sparsity) : std::nullopt,
                gu_nnz >= 0 ? std::optional<stt::index_t>(gu_nnz) : std::nullopt, gu_dist,
                gu_seed, gu_output);
        if (gl->parsed())
            return cmd_generate_lowrank(gl_shape, gl_ranks, gl_seed, gl_output);
        if (gm->parsed())
            return cmd_generate_matmul(gm_m, gm_k, gm_n, gm_output);
        if (bench->parsed())
            return cmd_bench(be_shape, be_ranks, be_sparsities, be_seeds, be_solvers,
                             be_iters, be_tol, be_batch, be_output, be_format);
        if (ci->parsed())
            return cmd_compress_image(ci_input, ci_ranks, ci_iters, ci_tol, ci_seed,
                                      ci_solver, ci_batch, ci_output);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const stt::rank_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const stt::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
