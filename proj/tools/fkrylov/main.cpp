#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bench.hpp"
#include "fk/errors.hpp"

namespace {

// FK_SEED in the environment wins over --seed.
std::uint64_t effective_seed(std::uint64_t flag_value) {
    if (const char* env = std::getenv("FK_SEED"); env != nullptr && *env != '\0') {
        return std::stoull(env);
    }
    return flag_value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtered Krylov eigensolver benchmarks"};
    app.require_subcommand(1);

    fk::bench::BenchSpec spec;
    std::string methods = "rfks,fks,cd,ac";
    std::string s_strategy = "refined";
    std::string out_dir = spec.out_dir.string();
    int n_r_ac = 0;

    CLI::App* run = app.add_subcommand("run", "Solve a test problem with one or more methods");
    run->add_option("--problem", spec.problem, "case1 | case2 | mm:<path>")->capture_default_str();
    run->add_option("--N", spec.n_grid, "Interior grid points per dimension")->capture_default_str();
    run->add_option("--methods", methods, "Comma-separated subset of rfks,fks,cd,ac")->capture_default_str();
    run->add_option("--m", spec.m, "Filter degree")->capture_default_str();
    run->add_option("--nr", spec.n_r, "Restart size")->capture_default_str();
    run->add_option("--nr-ac", n_r_ac, "Arnoldi cycle length for AC (default: --nr)");
    run->add_option("--tol", spec.tol, "Relative residual tolerance")->capture_default_str();
    run->add_option("--max-outer", spec.max_outer, "Maximum recorded steps")->capture_default_str();
    run->add_option("--s-strategy", s_strategy, "refined | last | ritz | weighted:<beta>")->capture_default_str();
    run->add_option("--zeta", spec.zeta_fraction, "Position of zeta between x+ and theta1")->capture_default_str();
    run->add_option("--warmup", spec.arnoldi_warmup, "Arnoldi steps behind the FKS filter")->capture_default_str();
    run->add_option("--seed", spec.seed, "Seed for restart perturbations")->capture_default_str();
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();

    std::size_t samples = 100000;
    std::uint64_t verify_seed = 20240611;
    bool inject_fault = false;
    CLI::App* verify = app.add_subcommand("verify", "Run the randomized property suites");
    verify->add_option("--samples", samples, "Samples per half-plane for the root inequalities")
        ->capture_default_str();
    verify->add_option("--seed", verify_seed, "Random seed")->capture_default_str();
    verify->add_flag("--inject-branch-fault", inject_fault)->group("");  // hidden test hook

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            spec.methods = fk::bench::parse_methods(methods);
            spec.s_strategy = fk::parse_s_strategy(s_strategy);
            spec.out_dir = out_dir;
            spec.seed = effective_seed(spec.seed);
            if (n_r_ac > 0) spec.n_r_ac = n_r_ac;
            return fk::bench::cmd_run(spec, std::cout).exit_code();
        }
        return fk::bench::cmd_verify(samples, effective_seed(verify_seed), inject_fault, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
