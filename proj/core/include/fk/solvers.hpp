#pragma once

// Filtered Krylov eigensolvers for the rightmost eigenpair of a real sparse
// matrix:
//
//   RFKS  relaxed filtered Krylov subspace: the filter is refitted to the
//         current Ritz values every step and the filter start vector V_k s_k
//         is the refined Ritz combination;
//   FKS   filtered Krylov subspace: one filter per restart cycle, fitted from
//         a short Arnoldi warmup, applied to the newest basis vector;
//   CD    Chebyshev-Davidson: dynamic filter applied to the current Ritz vector;
//   AC    Arnoldi-Chebyshev: fixed-length Arnoldi cycles restarted from the
//         filtered Ritz vector.
//
// RFKS, FKS and CD share one Rayleigh-Ritz engine and differ only in how s_k
// and the filter are chosen.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fk/chebyshev.hpp"
#include "fk/dense_eig.hpp"
#include "fk/linalg.hpp"

namespace fk {

enum class Method { RFKS, FKS, CD, AC };

std::string_view to_string(Method method);
/// Accepts rfks, fks, cd, ac (any case).
Method parse_method(std::string_view name);

/// How the filter start vector V_k s_k is chosen.
struct SStrategy {
    enum class Kind { LastVector, Weighted, RitzVector, Refined };

    Kind kind = Kind::Refined;
    double beta = 0.5;  ///< Weighted only: alpha_i proportional to beta^(k-i)

    static SStrategy last_vector() { return {Kind::LastVector, 0.5}; }
    static SStrategy weighted(double beta) { return {Kind::Weighted, beta}; }
    static SStrategy ritz_vector() { return {Kind::RitzVector, 0.5}; }
    static SStrategy refined() { return {Kind::Refined, 0.5}; }

    friend bool operator==(const SStrategy&, const SStrategy&) = default;
};

/// Parses last | ritz | refined | weighted:<beta>.
SStrategy parse_s_strategy(std::string_view text);
std::string to_string(const SStrategy& s);

enum class FilterMode {
    Dynamic,       ///< refit from the current Ritz values every step (identity at k = 1)
    FrozenWarmup,  ///< fit once per restart cycle from an Arnoldi warmup
};

struct SolverConfig {
    Method method = Method::RFKS;
    int m = 20;         ///< filter degree
    int n_r = 40;       ///< restart size; Arnoldi cycle length for AC
    double tol = 1e-10; ///< on ||r|| / ||r0||
    int max_outer = 20000;
    SStrategy s_strategy = SStrategy::refined();
    FilterMode filter_mode = FilterMode::Dynamic;
    double zeta_fraction = 0.5;
    int arnoldi_warmup = 20;
    std::uint64_t seed = 20240611;

    void validate() const;
};

/// One Rayleigh-Ritz process (one Arnoldi cycle for AC).
struct RunRecord {
    int step = 0;  ///< 1-based
    Complex theta;
    double res_norm = 0.0;
    std::uint64_t mv_total = 0;
    double elapsed_s = 0.0;
    bool restarted = false;
    std::optional<FilterSpec> filter_used;  ///< nullopt: p(lambda) = lambda, or no filter
    bool filter_fallback = false;           ///< filter fit failed; identity used instead
};

/// Growing orthonormal basis V, its image W = A V, H = V^T W, the running
/// Gram matrix W^T W, and the current rightmost Ritz pair.
struct SubspaceState {
    DenseColumns v;
    DenseColumns w;
    Matrix h;
    Matrix wtw;
    EigenPairSet ritz;
    Vector x_cur;   ///< real unit Ritz vector (phase-aligned real part when complex)
    Complex theta_cur;
    double res_norm = 0.0;  ///< ||W y1 - theta1 V y1||

    std::size_t dim() const noexcept { return v.cols(); }
    /// W^T V, which is H^T.
    Matrix wtv() const { return h.transpose(); }
    /// Ritz vector V y1 in complex form.
    ComplexVector ritz_vector() const { return v.combine(ritz.vectors.front()); }
    /// Ritz values other than theta1 and, for complex theta1, its conjugate.
    ComplexVector unwanted_ritz_values() const;
};

/// Recomputes the Ritz data of `state` from its H, V and W.
void refresh_ritz(SubspaceState& state);

/// One-column state from a unit start vector (1 product with A).
SubspaceState seed_subspace(const CsrMatrix& a, std::span<const double> v1, MatvecCounter& counter);

/// Orthonormalizes z against V, appends it, extends W, H and W^T W, and
/// refreshes the Ritz pair (1 product with A). Throws SubspaceExhausted and
/// leaves the state untouched when z lies in span(V).
void rr_extend(SubspaceState& state, const CsrMatrix& a, std::span<const double> z, MatvecCounter& counter);

/// Unit coefficient vector s_k for the filter start V s_k.
Vector select_s(const SStrategy& strategy, const SubspaceState& state);

struct ArnoldiResult {
    DenseColumns basis;     ///< steps + 1 columns, or `steps` on breakdown
    DenseColumns products;  ///< A v_j for the first `steps` basis vectors
    Matrix hbar;            ///< (steps+1) x steps upper Hessenberg
    int steps = 0;
    bool breakdown = false;

    /// Leading steps x steps block of hbar.
    Matrix square() const;
};

/// Arnoldi with modified Gram-Schmidt. Stops early, returning the partial
/// factorization, when the Krylov space becomes invariant.
ArnoldiResult arnoldi(const CsrMatrix& a, std::span<const double> v0, int steps, MatvecCounter& counter);

struct SolveResult {
    Complex eigenvalue;
    Vector eigenvector;
    std::vector<RunRecord> history;
    bool converged = false;
    std::uint64_t mv_total = 0;
    double initial_residual = 0.0;
    double elapsed_s = 0.0;

    int iterations() const noexcept { return static_cast<int>(history.size()); }
};

/// Called after every recorded step with the state that produced the record.
using StepObserver = std::function<void(const SubspaceState&, const RunRecord&)>;

/// Uses config.s_strategy and config.filter_mode as given.
SolveResult rfks_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                       const StepObserver& observer = {});
/// Forces LastVector and a frozen warmup filter.
SolveResult fks_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                      const StepObserver& observer = {});
/// Forces the Ritz-vector start and dynamic filters.
SolveResult cd_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                     const StepObserver& observer = {});
/// n_r is the Arnoldi cycle length; each cycle costs n_r + m products.
SolveResult ac_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                     const StepObserver& observer = {});

/// Dispatches on config.method.
SolveResult solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                  const StepObserver& observer = {});

}  // namespace fk
