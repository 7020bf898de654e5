// End-to-end tests of the stt binary: exit codes, file outputs, report
// schema, and determinism of repeated runs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string cli = STT_CLI_BIN;
const fs::path schema_path = fs::path(STT_SOURCE_DIR) / "schema/run_report.schema.json";

struct RunResult {
    int exit_code;
    std::string out;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "stt_cli_tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const std::string cmd = cli + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    return RunResult{WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Minimal checker for the JSON-schema subset the report schema uses:
// type tags, required lists, and per-property recursion.
bool validates(const json& schema, const json& value, std::string& why) {
    const std::string type = schema.value("type", "");
    if (type == "object") {
        if (!value.is_object()) {
            why = "expected object";
            return false;
        }
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>())) {
                    why = "missing required field " + key.get<std::string>();
                    return false;
                }
        if (schema.contains("properties"))
            for (const auto& [key, sub] : schema["properties"].items())
                if (value.contains(key) && !validates(sub, value[key], why)) {
                    why = key + ": " + why;
                    return false;
                }
        return true;
    }
    if (type == "array") {
        if (!value.is_array()) {
            why = "expected array";
            return false;
        }
        if (schema.contains("items"))
            for (const auto& item : value)
                if (!validates(schema["items"], item, why))
                    return false;
        return true;
    }
    if (type == "integer") {
        if (!value.is_number_integer() && !value.is_number_unsigned()) {
            why = "expected integer";
            return false;
        }
        return true;
    }
    if (type == "number") {
        if (!value.is_number()) {
            why = "expected number";
            return false;
        }
        return true;
    }
    if (type == "string") {
        if (!value.is_string()) {
            why = "expected string";
            return false;
        }
        return true;
    }
    why = "unknown schema type " + type;
    return false;
}

json scrub_timing(json j) {
    j.erase("timing_s");
    return j;
}

} // namespace

TEST_CASE("generate matmul writes the documented header") {
    const fs::path out = work_dir() / "mm.tns";
    const RunResult r = run("generate matmul 5 5 5 --output " + out.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "3 25 25 25 125");
}

TEST_CASE("generate uniform with sparsity one fills the tensor") {
    const fs::path out = work_dir() / "full.tns";
    const RunResult r =
        run("generate uniform --shape 2,2,2 --sparsity 1 --seed 3 --output " + out.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "3 2 2 2 8");
}

TEST_CASE("generate is byte-deterministic per seed") {
    const fs::path a = work_dir() / "gen_a.tns";
    const fs::path b = work_dir() / "gen_b.tns";
    REQUIRE(run("generate uniform --shape 9,8,7 --nnz 40 --seed 11 --output " + a.string())
                .exit_code == 0);
    REQUIRE(run("generate uniform --shape 9,8,7 --nnz 40 --seed 11 --output " + b.string())
                .exit_code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("decompose reports the expected counters on the matmul tensor") {
    const fs::path tns = work_dir() / "mm555.tns";
    REQUIRE(run("generate matmul 5 5 5 --output " + tns.string()).exit_code == 0);
    const fs::path prefix = work_dir() / "mm555";
    const RunResult r = run("decompose " + tns.string() +
                            " --ranks 5,5,5 --iters 3 --seed 1 --output " + prefix.string());
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(fs::path(prefix.string() + ".report.json")));
    CHECK(report["iterations"] == 3);
    CHECK(report["kron_calls"] == 1125); // 3 sweeps x 3 modes x 125 nonzeros
    CHECK(report["input"]["nnz"] == 125);
    CHECK(fs::exists(prefix.string() + ".core.tns"));
    CHECK(fs::exists(prefix.string() + ".factor1.txt"));
    CHECK(fs::exists(prefix.string() + ".factor3.txt"));
}

TEST_CASE("decompose at full ranks reaches machine-precision error") {
    const fs::path tns = work_dir() / "mmfull.tns";
    REQUIRE(run("generate matmul 3 3 3 --output " + tns.string()).exit_code == 0);
    const fs::path prefix = work_dir() / "mmfull";
    const RunResult r = run("decompose " + tns.string() +
                            " --ranks 9,9,9 --iters 4 --seed 2 --output " + prefix.string());
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(fs::path(prefix.string() + ".report.json")));
    CHECK(report["relative_error"].get<double>() <= 1e-10);
}

TEST_CASE("decompose reports are deterministic modulo timing") {
    const fs::path tns = work_dir() / "det.tns";
    REQUIRE(run("generate uniform --shape 8,9,10 --nnz 60 --seed 4 --output " + tns.string())
                .exit_code == 0);
    const fs::path p1 = work_dir() / "det_run1";
    const fs::path p2 = work_dir() / "det_run2";
    const std::string args = " --ranks 3,3,3 --iters 5 --seed 5 --output ";
    REQUIRE(run("decompose " + tns.string() + args + p1.string()).exit_code == 0);
    REQUIRE(run("decompose " + tns.string() + args + p2.string()).exit_code == 0);
    const json r1 = json::parse(slurp(fs::path(p1.string() + ".report.json")));
    const json r2 = json::parse(slurp(fs::path(p2.string() + ".report.json")));
    CHECK(scrub_timing(r1).dump() == scrub_timing(r2).dump());
    CHECK(slurp(fs::path(p1.string() + ".core.tns")) ==
          slurp(fs::path(p2.string() + ".core.tns")));
    CHECK(slurp(fs::path(p1.string() + ".factor2.txt")) ==
          slurp(fs::path(p2.string() + ".factor2.txt")));
}

TEST_CASE("reports validate against the shipped schema and reload exactly") {
    const fs::path tns = work_dir() / "schema.tns";
    REQUIRE(run("generate uniform --shape 6,7,8 --nnz 30 --seed 6 --output " + tns.string())
                .exit_code == 0);
    const fs::path prefix = work_dir() / "schema_run";
    REQUIRE(run("decompose " + tns.string() + " --ranks 2,2,2 --seed 7 --output " +
                prefix.string())
                .exit_code == 0);

    const json schema = json::parse(slurp(schema_path));
    const std::string text = slurp(fs::path(prefix.string() + ".report.json"));
    const json report = json::parse(text);
    std::string why;
    const bool ok = validates(schema, report, why);
    INFO(why);
    CHECK(ok);
    // Reload-reserialize fidelity.
    CHECK(json::parse(report.dump()) == report);
}

TEST_CASE("usage and runtime failures map to exit codes 2 and 1") {
    const fs::path tns = work_dir() / "codes.tns";
    REQUIRE(run("generate matmul 2 2 2 --output " + tns.string()).exit_code == 0);

    CHECK(run("decompose " + tns.string() + " --ranks 2,2").exit_code == 2); // arity
    CHECK(run("decompose " + tns.string() + " --ranks 9,9,9").exit_code == 2); // too big
    CHECK(run("decompose " + tns.string()).exit_code == 2); // missing --ranks
    CHECK(run("decompose /nonexistent.tns --ranks 2,2,2").exit_code == 1);
    CHECK(run("compress-image /nonexistent.pgm --ranks 2,2").exit_code == 1);
    CHECK(run("nonsense").exit_code == 2);
}

TEST_CASE("bench emits the fixed CSV layout") {
    const fs::path out = work_dir() / "bench.csv";
    const RunResult r = run("bench --shape 12,12,12 --ranks 3,3,3 "
                            "--sparsities 0.001,0.01 --seeds 1 --solvers qrp,svd "
                            "--iters 2 --output " + out.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "sparsity,solver,seed,nnz,iterations,seconds_total,"
                    "seconds_per_sweep,fit,kron_calls,qrp_calls,qrp_flops_model,"
                    "svd_flops_model");
    int rows = 0;
    std::string line;
    double prev_sparsity = 0.0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        REQUIRE(fields.size() == 12);
        const double sparsity = std::stod(fields[0]);
        CHECK(sparsity >= prev_sparsity); // sorted rows
        prev_sparsity = sparsity;
        CHECK(std::stod(fields[10]) < std::stod(fields[11])); // qrp model < svd model
    }
    CHECK(rows == 4);
}

TEST_CASE("bench rows are deterministic under worker parallelism") {
    const std::string args = "bench --shape 10,11,12 --ranks 2,3,2 "
                             "--sparsities 0.002,0.02 --seeds 3,4 --iters 2";
    auto stable_fields = [](const std::string& csv) {
        // Strip the two wall-clock columns (5 and 6, 0-based) from each row.
        std::stringstream ss(csv);
        std::string line, out;
        while (std::getline(ss, line)) {
            std::stringstream ls(line);
            std::string field;
            int idx = 0;
            while (std::getline(ls, field, ',')) {
                if (idx != 5 && idx != 6)
                    out += field + ",";
                ++idx;
            }
            out += "\n";
        }
        return out;
    };
    const fs::path seq_env = work_dir() / "bench_seq.csv";
    const fs::path par_env = work_dir() / "bench_par.csv";
    REQUIRE(std::system((cli + " " + args + " --output " + seq_env.string()).c_str()) == 0);
    REQUIRE(std::system(("STT_THREADS=3 " + cli + " " + args + " --output " +
                         par_env.string())
                            .c_str()) == 0);
    CHECK(stable_fields(slurp(seq_env)) == stable_fields(slurp(par_env)));
}

TEST_CASE("bench with no sparsity points prints only the header") {
    const RunResult r = run("bench --shape 10,10,10 --ranks 2,2,2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "sparsity,solver,seed,nnz,iterations,seconds_total,"
                   "seconds_per_sweep,fit,kron_calls,qrp_calls,qrp_flops_model,"
                   "svd_flops_model\n");
}

TEST_CASE("compress-image recovers a rank-1 image at rank (1,1)") {
    // Integer product pixels make the stored image exactly rank one, so the
    // decomposition error (measured before requantization) is tiny.
    const fs::path img = work_dir() / "rank1.pgm";
    {
        std::ofstream out(img, std::ios::binary);
        out << "P5\n24 16\n255\n";
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 24; ++c)
                out.put(static_cast<char>((r % 5 + 1) * (c % 8 + 1))); // <= 40
    }
    const fs::path prefix = work_dir() / "rank1_out";
    const RunResult r = run("compress-image " + img.string() +
                            " --ranks 1,1 --iters 8 --tol 0 --seed 1 --output " +
                            prefix.string());
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(slurp(fs::path(prefix.string() + ".report.json")));
    CHECK(report["relative_error"].get<double>() <= 1e-6);
    CHECK(report["kron_calls"] == 0); // 2-way runs need no Kronecker products
    CHECK(report["qrp_calls"] == 16);
    CHECK(fs::exists(prefix.string() + ".pgm"));

    CHECK(run("compress-image " + img.string() + " --ranks 20,20").exit_code == 2);
}

TEST_CASE("compress-image at full ranks reproduces the input bytes") {
    const fs::path img = work_dir() / "full_ranks.pgm";
    {
        std::ofstream out(img, std::ios::binary);
        out << "P5\n9 7\n255\n";
        for (int i = 0; i < 63; ++i)
            out.put(static_cast<char>((i * 37) % 251));
    }
    const fs::path prefix = work_dir() / "full_ranks_out";
    const RunResult r = run("compress-image " + img.string() +
                            " --ranks 7,9 --iters 4 --tol 0 --seed 2 --output " +
                            prefix.string());
    REQUIRE(r.exit_code == 0);
    // Identical pixel bytes after requantization of the exact reconstruction.
    CHECK(slurp(fs::path(prefix.string() + ".pgm")) == slurp(img));
}

TEST_CASE("decompose accepts pgm input and csv reports") {
    const fs::path img = work_dir() / "gradient.pgm";
    {
        std::ofstream out(img, std::ios::binary);
        out << "P5\n12 10\n255\n";
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < 12; ++c)
                out.put(static_cast<char>(10 + 2 * r + c));
    }
    const fs::path prefix = work_dir() / "gradient_out";
    const RunResult r = run("decompose " + img.string() +
                            " --ranks 2,2 --iters 6 --format csv --output " +
                            prefix.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(fs::path(prefix.string() + ".report.csv"));
    CHECK(csv.find("iterations,final_fit,relative_error") == 0);
}
