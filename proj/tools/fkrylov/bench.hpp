#pragma once

// The `run` and `verify` commands, kept apart from argument parsing so the
// tests can drive them directly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fk/solvers.hpp"

namespace fk::bench {

struct BenchSpec {
    std::string problem = "case1";  ///< case1 | case2 | mm:<path>
    int n_grid = 20;
    std::vector<Method> methods{Method::RFKS, Method::FKS, Method::CD, Method::AC};
    int m = 20;
    int n_r = 40;
    std::optional<int> n_r_ac;  ///< Arnoldi cycle length for AC; defaults to n_r
    double tol = 1e-10;
    int max_outer = 20000;
    SStrategy s_strategy = SStrategy::refined();
    double zeta_fraction = 0.5;
    int arnoldi_warmup = 20;
    std::uint64_t seed = 20240611;
    std::filesystem::path out_dir = "results";
};

struct MethodOutcome {
    Method method;
    SolveResult result;
};

struct RunOutcome {
    std::vector<MethodOutcome> runs;
    bool all_converged = true;

    int exit_code() const { return all_converged ? 0 : 2; }
};

/// Splits "rfks,fks" into methods.
std::vector<Method> parse_methods(const std::string& list);

/// Builds the matrix named by spec.problem.
CsrMatrix build_problem(const BenchSpec& spec);

/// Solver settings for one method of the spec.
SolverConfig solver_config(const BenchSpec& spec, Method method);

/// Runs every requested method from the normalized all-ones vector, writing
/// <out>/<method>_history.csv and appending to <out>/summary.csv.
RunOutcome cmd_run(const BenchSpec& spec, std::ostream& log);

void write_history_csv(const SolveResult& result, const std::filesystem::path& path);
void append_summary_row(const std::filesystem::path& path, const BenchSpec& spec, Method method,
                        const SolveResult& result);

inline constexpr const char* kHistoryHeader =
    "step,theta_re,theta_im,resnorm,relresnorm,mv_total,elapsed_s,restarted,filter_d,filter_a,filter_m";
inline constexpr const char* kSummaryHeader = "method,case,N,m,n_r,IT,MV,CPU_s,lambda_re,lambda_im,converged";

/// Runs all property suites; prints one line per suite and the first
/// counterexample of any failure. Returns 0 iff all pass, else 1.
int cmd_verify(std::size_t samples, std::uint64_t seed, bool inject_branch_fault, std::ostream& out);

}  // namespace fk::bench
