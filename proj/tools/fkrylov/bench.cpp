#include "bench.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fk/chebyshev.hpp"
#include "fk/errors.hpp"
#include "fk/problems.hpp"
#include "fk/verify.hpp"

namespace fk::bench {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string lower_method(Method m) {
    std::string s(to_string(m));
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_mm(const std::string& problem) { return problem.rfind("mm:", 0) == 0; }

}  // namespace

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_method(item));
    }
    if (out.empty()) throw Error("no methods given");
    return out;
}

CsrMatrix build_problem(const BenchSpec& spec) {
    if (is_mm(spec.problem)) return load_matrix_market(spec.problem.substr(3));
    return assemble_pde(PdeCase{parse_pde_case(spec.problem), spec.n_grid});
}

SolverConfig solver_config(const BenchSpec& spec, Method method) {
    SolverConfig c;
    c.method = method;
    c.m = spec.m;
    c.n_r = method == Method::AC ? spec.n_r_ac.value_or(spec.n_r) : spec.n_r;
    c.tol = spec.tol;
    c.max_outer = spec.max_outer;
    c.s_strategy = spec.s_strategy;
    c.zeta_fraction = spec.zeta_fraction;
    c.arnoldi_warmup = spec.arnoldi_warmup;
    c.seed = spec.seed;
    return c;
}

void write_history_csv(const SolveResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << kHistoryHeader << '\n';
    const double r0 = result.initial_residual;
    for (const RunRecord& r : result.history) {
        out << r.step << ',' << num(r.theta.real()) << ',' << num(r.theta.imag()) << ',' << num(r.res_norm) << ','
            << num(r0 > 0.0 ? r.res_norm / r0 : 0.0) << ',' << r.mv_total << ',' << num(r.elapsed_s) << ','
            << (r.restarted ? 1 : 0) << ',';
        if (r.filter_used) {
            out << num(r.filter_used->ellipse.d) << ',' << num(r.filter_used->ellipse.a_mod) << ','
                << r.filter_used->m;
        } else {
            out << ",,0";
        }
        out << '\n';
    }
}

void append_summary_row(const std::filesystem::path& path, const BenchSpec& spec, Method method,
                        const SolveResult& result) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (fresh) out << kSummaryHeader << '\n';
    const SolverConfig c = solver_config(spec, method);
    out << to_string(method) << ',' << spec.problem << ',' << (is_mm(spec.problem) ? "" : std::to_string(spec.n_grid))
        << ',' << c.m << ',' << c.n_r << ',' << result.iterations() << ',' << result.mv_total << ','
        << num(result.elapsed_s) << ',' << num(result.eigenvalue.real()) << ',' << num(result.eigenvalue.imag())
        << ',' << (result.converged ? "true" : "false") << '\n';
}

RunOutcome cmd_run(const BenchSpec& spec, std::ostream& log) {
    const CsrMatrix a = build_problem(spec);
    std::filesystem::create_directories(spec.out_dir);
    Vector v0(a.n(), 1.0);
    normalize(v0);

    RunOutcome outcome;
    for (Method method : spec.methods) {
        SolveResult result = solve(a, solver_config(spec, method), v0);
        write_history_csv(result, spec.out_dir / (lower_method(method) + "_history.csv"));
        append_summary_row(spec.out_dir / "summary.csv", spec, method, result);
        log << to_string(method) << ": " << (result.converged ? "converged" : "NOT converged")
            << "  IT=" << result.iterations() << "  MV=" << result.mv_total << "  CPU=" << num(result.elapsed_s)
            << "s  lambda=" << num(result.eigenvalue.real()) << (result.eigenvalue.imag() < 0 ? "" : "+")
            << num(result.eigenvalue.imag()) << "i\n";
        outcome.all_converged = outcome.all_converged && result.converged;
        outcome.runs.push_back({method, std::move(result)});
    }
    return outcome;
}

int cmd_verify(std::size_t samples, std::uint64_t seed, bool inject_branch_fault, std::ostream& out) {
    struct FaultGuard {
        explicit FaultGuard(bool on) { testing::set_branch_fault(on); }
        ~FaultGuard() { testing::set_branch_fault(false); }
    } guard(inject_branch_fault);

    const std::vector<SuiteResult> results = run_all_suites(VerifyOptions{samples, seed});
    bool ok = true;
    for (const SuiteResult& r : results) {
        out << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.checks << " checks, " << num(r.seconds)
            << " s)\n";
        if (!r.passed && ok) out << "  counterexample: " << r.counterexample << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace fk::bench
