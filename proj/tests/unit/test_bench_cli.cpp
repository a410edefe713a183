#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bench.hpp"
#include "fk/errors.hpp"
#include "fk/problems.hpp"

#ifndef FK_TEST_DATA_DIR
#error "FK_TEST_DATA_DIR must be defined"
#endif

using namespace fk;
using namespace fk::bench;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Drops the timing column of every history row (and the header).
std::vector<std::string> without_column(const std::vector<std::string>& lines, std::size_t col) {
    std::vector<std::string> out;
    for (const std::string& l : lines) {
        auto f = fields(l);
        if (f.size() > col) f.erase(f.begin() + static_cast<long>(col));
        std::string joined;
        for (std::size_t i = 0; i < f.size(); ++i) joined += (i ? "," : "") + f[i];
        out.push_back(joined);
    }
    return out;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("method list parsing") {
    CHECK(parse_methods("rfks,ac") == std::vector<Method>{Method::RFKS, Method::AC});
    CHECK(parse_methods("rfks,,ac").size() == 2);
    CHECK_THROWS_AS(parse_methods(""), Error);
    CHECK_THROWS_AS(parse_methods("qr"), Error);
}

TEST_CASE("AC takes its own cycle length") {
    BenchSpec spec;
    spec.n_r = 40;
    spec.n_r_ac = 20;
    CHECK(solver_config(spec, Method::AC).n_r == 20);
    CHECK(solver_config(spec, Method::RFKS).n_r == 40);
}

TEST_CASE("run writes histories and a summary") {
    TempDir dir("fk_bench_run");
    BenchSpec spec;
    spec.problem = "case1";
    spec.n_grid = 8;
    spec.m = 8;
    spec.n_r = 12;
    spec.out_dir = dir.path;
    std::ostringstream log;
    const RunOutcome out = cmd_run(spec, log);
    CHECK(out.exit_code() == 0);
    REQUIRE(out.runs.size() == 4);

    for (const MethodOutcome& run : out.runs) {
        std::string name(to_string(run.method));
        for (char& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        const auto lines = lines_of(dir.path / (name + "_history.csv"));
        REQUIRE(!lines.empty());
        CHECK(lines[0] == kHistoryHeader);
        CHECK(lines.size() == run.result.history.size() + 1);
        for (std::size_t i = 1; i < lines.size(); ++i) CHECK(fields(lines[i]).size() == 11);
    }

    const auto summary = lines_of(dir.path / "summary.csv");
    REQUIRE(summary.size() == 5);
    CHECK(summary[0] == kSummaryHeader);
    const double fro = assemble_pde({PdeCaseKind::CaseI, 8}).frobenius_norm();
    for (std::size_t i = 1; i < summary.size(); ++i) {
        const auto f = fields(summary[i]);
        REQUIRE(f.size() == 11);
        CHECK(f[1] == "case1");
        CHECK(f[2] == "8");
        CHECK(f[10] == "true");
        if (f[0] == "AC") CHECK(std::stoull(f[6]) == std::stoull(f[5]) * (12 + 8));
    }
    for (const auto& x : out.runs)
        for (const auto& y : out.runs) CHECK(std::abs(x.result.eigenvalue - y.result.eigenvalue) <= 1e-6 * fro);

    // A second run appends rows without repeating the header.
    cmd_run(spec, log);
    CHECK(lines_of(dir.path / "summary.csv").size() == 9);
}

TEST_CASE("runs are deterministic apart from timing") {
    TempDir a("fk_bench_det_a"), b("fk_bench_det_b");
    BenchSpec spec;
    spec.problem = "case2";
    spec.n_grid = 6;
    spec.m = 6;
    spec.n_r = 10;
    std::ostringstream log;
    spec.out_dir = a.path;
    cmd_run(spec, log);
    spec.out_dir = b.path;
    cmd_run(spec, log);
    for (const char* f : {"rfks_history.csv", "fks_history.csv", "cd_history.csv", "ac_history.csv"}) {
        CAPTURE(f);
        CHECK(without_column(lines_of(a.path / f), 6) == without_column(lines_of(b.path / f), 6));
    }
    CHECK(without_column(lines_of(a.path / "summary.csv"), 7) == without_column(lines_of(b.path / "summary.csv"), 7));
}

TEST_CASE("identity from a Matrix Market file converges at once") {
    TempDir dir("fk_bench_mm");
    BenchSpec spec;
    spec.problem = std::string("mm:") + FK_TEST_DATA_DIR + "/identity2.mtx";
    spec.methods = {Method::RFKS};
    spec.out_dir = dir.path;
    std::ostringstream log;
    const RunOutcome out = cmd_run(spec, log);
    CHECK(out.exit_code() == 0);
    REQUIRE(out.runs.size() == 1);
    const SolveResult& r = out.runs[0].result;
    CHECK(r.iterations() == 1);
    CHECK(std::abs(r.eigenvalue - 1.0) <= 1e-15);
    CHECK(r.history[0].res_norm <= 1e-15);
    const auto f = fields(lines_of(dir.path / "summary.csv").at(1));
    CHECK(f[2].empty());
}

TEST_CASE("nonconvergence gives exit code 2 and a summary row") {
    TempDir dir("fk_bench_nc");
    BenchSpec spec;
    spec.n_grid = 10;
    spec.methods = {Method::CD};
    spec.max_outer = 2;
    spec.out_dir = dir.path;
    std::ostringstream log;
    const RunOutcome out = cmd_run(spec, log);
    CHECK(out.exit_code() == 2);
    const auto f = fields(lines_of(dir.path / "summary.csv").at(1));
    CHECK(f[10] == "false");
}

TEST_CASE("unknown problems are rejected") {
    BenchSpec spec;
    spec.problem = "case9";
    CHECK_THROWS_AS(build_problem(spec), Error);
    spec.problem = "mm:/no/such/file.mtx";
    CHECK_THROWS_AS(build_problem(spec), ParseError);
}

TEST_CASE("verify passes and catches an injected branch fault") {
    std::ostringstream ok;
    CHECK(cmd_verify(100, 1, false, ok) == 0);
    CHECK(ok.str().find("FAIL") == std::string::npos);

    std::ostringstream bad;
    CHECK(cmd_verify(100, 1, true, bad) == 1);
    const std::string text = bad.str();
    CHECK(text.find("FAIL  roots") != std::string::npos);
    CHECK(!testing::branch_fault());
}
