#pragma once

// Randomized property suites over the filter, dense and basis kernels. Shared
// by the `verify` CLI command and the test binaries.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fk {

struct VerifyOptions {
    std::size_t samples = 100000;  ///< root-modulus samples per half-plane; other suites scale from it
    std::uint64_t seed = 20240611;
};

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::size_t checks = 0;
    std::string counterexample;  ///< first failure: inputs and both sides
    double seconds = 0.0;
};

/// Root-modulus inequalities in both half-planes, with the roots taken from
/// modulus_largest_root: |w-| <= ||z| + sqrt(|z|^2-1)| <= |w+| <= |z| + sqrt(|z|^2+1).
SuiteResult root_modulus_suite(const VerifyOptions& opts);
/// kappa_max <= bound for eigenvalues sampled inside random ellipses (samples/100 instances).
SuiteResult damping_bound_suite(const VerifyOptions& opts);
/// chebyshev_apply on diagonal matrices against filter_value, m <= 60.
SuiteResult filter_consistency_suite(const VerifyOptions& opts);
/// filter_value(lambda_ref) == 1 (samples/10 specs).
SuiteResult normalization_suite(const VerifyOptions& opts);
/// T_m ratio with either root of the quadratic, m <= 20.
SuiteResult branch_invariance_suite(const VerifyOptions& opts);
/// MGS keeps max|V^T V - I| <= 1e-12 on random and nearly dependent inputs.
SuiteResult orthonormality_suite(const VerifyOptions& opts);
/// eig_real residuals, Jacobi against eig_real on symmetric input, refined
/// vector against random sampling.
SuiteResult dense_oracle_suite(const VerifyOptions& opts);

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opts);

}  // namespace fk
