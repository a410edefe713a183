#include "fk/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "fk/errors.hpp"

namespace fk {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Drops theta1 and, when it is complex, one copy of its exact conjugate.
ComplexVector drop_wanted(const ComplexVector& values) {
    ComplexVector out;
    if (values.empty()) return out;
    const Complex theta1 = values.front();
    bool partner_dropped = theta1.imag() == 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!partner_dropped && values[i] == std::conj(theta1)) {
            partner_dropped = true;
            continue;
        }
        out.push_back(values[i]);
    }
    return out;
}

struct FilterChoice {
    std::optional<FilterSpec> spec;
    bool fallback = false;
};

FilterChoice fit_filter(const ComplexVector& unwanted, Complex theta1, const SolverConfig& config) {
    FilterChoice out;
    if (unwanted.empty()) return out;
    try {
        const EllipseFit fit = determine_ellipse(unwanted, theta1, config.zeta_fraction);
        out.spec = FilterSpec{fit.ellipse, config.m, theta1.real()};
    } catch (const NoSeparation&) {
        out.fallback = true;
    }
    return out;
}

// Warmup Arnoldi run whose Ritz values fix the filter for one restart cycle.
FilterChoice warmup_filter(const CsrMatrix& a, std::span<const double> v1, const SolverConfig& config,
                           MatvecCounter& counter) {
    const int steps = std::min<int>(config.arnoldi_warmup, static_cast<int>(a.n()));
    if (steps < 2) return {};
    const ArnoldiResult ar = arnoldi(a, v1, steps, counter);
    const ComplexVector values = eig_values(ar.square());
    return fit_filter(drop_wanted(values), values.front(), config);
}

class Clock {
public:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Vector start_vector(const CsrMatrix& a, std::span<const double> v0) {
    if (a.n() == 0) throw Error("solver: empty matrix");
    if (v0.size() != a.n()) throw DimensionMismatch("solver: start vector has wrong length");
    Vector v(v0.begin(), v0.end());
    if (normalize(v) == 0.0 || !std::isfinite(norm2(v))) throw Error("solver: start vector must be finite and nonzero");
    return v;
}

// Shared record/convergence bookkeeping for all four methods.
class Tracker {
public:
    // Residuals below `floor` are rounding noise and count as converged.
    Tracker(const SolverConfig& config, const StepObserver& observer, double floor)
        : config_{config}, observer_{observer}, floor_{floor} {}

    // Returns true when the run should stop.
    bool record(const SubspaceState& state, const MatvecCounter& counter, bool restarted, const FilterChoice& filter) {
        RunRecord r;
        r.step = static_cast<int>(result_.history.size()) + 1;
        r.theta = state.theta_cur;
        r.res_norm = state.res_norm;
        r.mv_total = counter.count();
        r.elapsed_s = clock_.elapsed();
        r.restarted = restarted;
        r.filter_used = filter.spec;
        r.filter_fallback = filter.fallback;
        if (result_.history.empty() && !initial_fixed_) result_.initial_residual = r.res_norm;
        result_.history.push_back(r);
        if (observer_) observer_(state, r);

        if (!have_best_ || r.res_norm < best_res_) {
            have_best_ = true;
            best_res_ = r.res_norm;
            result_.eigenvalue = r.theta;
            result_.eigenvector = state.x_cur;
        }
        if (r.res_norm <= floor_ || r.res_norm <= config_.tol * result_.initial_residual) {
            result_.converged = true;
            result_.eigenvalue = r.theta;
            result_.eigenvector = state.x_cur;
            return true;
        }
        return static_cast<int>(result_.history.size()) >= config_.max_outer;
    }

    SolveResult finish(const MatvecCounter& counter) {
        result_.mv_total = counter.count();
        result_.elapsed_s = clock_.elapsed();
        return std::move(result_);
    }

    // Overrides the first record's residual as the convergence reference.
    void set_initial_residual(double r0) {
        result_.initial_residual = r0;
        initial_fixed_ = true;
    }

private:
    const SolverConfig& config_;
    const StepObserver& observer_;
    Clock clock_;
    SolveResult result_;
    bool have_best_ = false;
    bool initial_fixed_ = false;
    double floor_ = 0.0;
    double best_res_ = 0.0;
};

double residual_floor(const CsrMatrix& a) {
    return 10.0 * std::numeric_limits<double>::epsilon() * a.frobenius_norm();
}

Vector perturbed(const Vector& x, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector out = x;
    const double amp = 1e-8 / std::sqrt(static_cast<double>(x.size()));
    for (double& v : out) v += amp * dist(rng);
    normalize(out);
    return out;
}

// RFKS/FKS/CD engine. Each restart cycle grows V from one to n_r columns.
SolveResult filtered_krylov(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                            const StepObserver& observer) {
    config.validate();
    Vector v1 = start_vector(a, v0);
    MatvecCounter counter;
    Tracker tracker(config, observer, residual_floor(a));
    std::mt19937_64 rng(config.seed);
    const bool frozen = config.filter_mode == FilterMode::FrozenWarmup;

    for (bool first = true;; first = false) {
        SubspaceState state = seed_subspace(a, v1, counter);
        if (tracker.record(state, counter, !first, FilterChoice{})) return tracker.finish(counter);

        FilterChoice frozen_filter;
        if (frozen) frozen_filter = warmup_filter(a, v1, config, counter);

        bool exhausted = false;
        for (int k = 1; k < config.n_r; ++k) {
            const Vector s = k == 1 ? Vector{1.0} : select_s(config.s_strategy, state);

            FilterChoice filter;
            if (frozen) {
                filter = frozen_filter;
            } else if (k > 1) {
                filter = fit_filter(state.unwanted_ritz_values(), state.theta_cur, config);
            }

            Vector z;
            if (filter.spec) {
                try {
                    z = chebyshev_apply(a, state.v.combine(s), *filter.spec, counter);
                } catch (const FilterDegenerate&) {
                    filter = FilterChoice{std::nullopt, true};
                }
            }
            // Identity filter: p(A) V s = W s needs no new product.
            if (!filter.spec) z = state.w.combine(s);

            try {
                rr_extend(state, a, z, counter);
            } catch (const SubspaceExhausted&) {
                exhausted = true;
                break;
            }
            if (tracker.record(state, counter, false, filter)) return tracker.finish(counter);
        }
        v1 = exhausted ? perturbed(state.x_cur, rng) : state.x_cur;
    }
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::RFKS: return "RFKS";
        case Method::FKS: return "FKS";
        case Method::CD: return "CD";
        case Method::AC: return "AC";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    const std::string s = lower(name);
    if (s == "rfks") return Method::RFKS;
    if (s == "fks") return Method::FKS;
    if (s == "cd") return Method::CD;
    if (s == "ac") return Method::AC;
    throw Error("unknown method '" + std::string(name) + "' (expected rfks, fks, cd or ac)");
}

SStrategy parse_s_strategy(std::string_view text) {
    const std::string s = lower(text);
    if (s == "last") return SStrategy::last_vector();
    if (s == "ritz") return SStrategy::ritz_vector();
    if (s == "refined") return SStrategy::refined();
    if (s.rfind("weighted:", 0) == 0) {
        const std::string tail = s.substr(9);
        double beta = 0.0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), beta);
        if (ec != std::errc{} || ptr != tail.data() + tail.size() || !(beta > 0.0) || !std::isfinite(beta))
            throw Error("weighted strategy needs a positive beta, got '" + tail + "'");
        return SStrategy::weighted(beta);
    }
    throw Error("unknown s-strategy '" + std::string(text) + "' (expected last, ritz, refined or weighted:<beta>)");
}

std::string to_string(const SStrategy& s) {
    switch (s.kind) {
        case SStrategy::Kind::LastVector: return "last";
        case SStrategy::Kind::RitzVector: return "ritz";
        case SStrategy::Kind::Refined: return "refined";
        case SStrategy::Kind::Weighted: {
            std::ostringstream os;
            os << "weighted:" << s.beta;
            return os.str();
        }
    }
    return "?";
}

void SolverConfig::validate() const {
    if (m < 1) throw Error("config: m must be at least 1");
    if (n_r < 2) throw Error("config: n_r must be at least 2");
    if (!(tol > 0.0)) throw Error("config: tol must be positive");
    if (max_outer < 1) throw Error("config: max_outer must be at least 1");
    if (!(zeta_fraction > 0.0 && zeta_fraction < 1.0)) throw Error("config: zeta_fraction must lie in (0,1)");
    if (arnoldi_warmup < 1) throw Error("config: arnoldi_warmup must be at least 1");
    if (s_strategy.kind == SStrategy::Kind::Weighted && !(s_strategy.beta > 0.0))
        throw Error("config: weighted beta must be positive");
}

ComplexVector SubspaceState::unwanted_ritz_values() const { return drop_wanted(ritz.values); }

void refresh_ritz(SubspaceState& state) {
    state.ritz = eig_real(state.h);
    state.theta_cur = state.ritz.values.front();
    const ComplexVector& y = state.ritz.vectors.front();
    const ComplexVector vy = state.v.combine(y);
    const ComplexVector wy = state.w.combine(y);
    ComplexVector r(vy.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = wy[i] - state.theta_cur * vy[i];
    state.res_norm = norm2(r);
    state.x_cur = aligned_real_part(vy);
}

SubspaceState seed_subspace(const CsrMatrix& a, std::span<const double> v1, MatvecCounter& counter) {
    if (v1.size() != a.n()) throw DimensionMismatch("seed_subspace: start vector has wrong length");
    Vector v(v1.begin(), v1.end());
    if (normalize(v) == 0.0) throw Error("seed_subspace: start vector is zero");
    const Vector w = matvec(a, v, counter);

    SubspaceState state;
    state.v = DenseColumns(a.n());
    state.w = DenseColumns(a.n());
    state.v.append(v);
    state.w.append(w);
    state.h = Matrix(1, 1);
    state.h(0, 0) = dot(v, w);
    state.wtw = Matrix(1, 1);
    state.wtw(0, 0) = dot(w, w);
    refresh_ritz(state);
    return state;
}

void rr_extend(SubspaceState& state, const CsrMatrix& a, std::span<const double> z, MatvecCounter& counter) {
    const OrthoResult orth = mgs_orthonormalize(state.v, z);
    const Vector w = matvec(a, orth.v, counter);
    const std::size_t k = state.dim();

    const Vector top = state.v.transpose_times(w);       // V^T w
    const Vector left = state.w.transpose_times(orth.v); // W^T v
    const Vector gram = state.w.transpose_times(w);      // W^T w

    state.h.resize(k + 1, k + 1);
    state.wtw.resize(k + 1, k + 1);
    for (std::size_t i = 0; i < k; ++i) {
        state.h(i, k) = top[i];
        state.h(k, i) = left[i];
        state.wtw(i, k) = gram[i];
        state.wtw(k, i) = gram[i];
    }
    state.h(k, k) = dot(orth.v, w);
    state.wtw(k, k) = dot(w, w);
    state.v.append(orth.v);
    state.w.append(w);
    refresh_ritz(state);
}

Vector select_s(const SStrategy& strategy, const SubspaceState& state) {
    const std::size_t k = state.dim();
    if (k == 0) throw Error("select_s: empty subspace");
    switch (strategy.kind) {
        case SStrategy::Kind::LastVector: {
            Vector s(k, 0.0);
            s.back() = 1.0;
            return s;
        }
        case SStrategy::Kind::Weighted: {
            // alpha_i = beta^(k-i) / sum, then scaled to unit length.
            Vector s(k);
            double p = 1.0;
            for (std::size_t i = k; i-- > 0;) {
                s[i] = p;
                p *= strategy.beta;
            }
            const double total = std::accumulate(s.begin(), s.end(), 0.0);
            scale(1.0 / total, s);
            normalize(s);
            return s;
        }
        case SStrategy::Kind::RitzVector:
            return aligned_real_part(state.ritz.vectors.front());
        case SStrategy::Kind::Refined:
            return refined_from_gram(state.wtw, state.h, state.theta_cur).s;
    }
    throw Error("select_s: unknown strategy");
}

Matrix ArnoldiResult::square() const {
    Matrix out(static_cast<std::size_t>(steps), static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) out(i, j) = hbar(i, j);
    return out;
}

ArnoldiResult arnoldi(const CsrMatrix& a, std::span<const double> v0, int steps, MatvecCounter& counter) {
    if (steps < 1) throw Error("arnoldi: steps must be positive");
    if (static_cast<std::size_t>(steps) > a.n()) throw Error("arnoldi: more steps than the dimension");
    Vector v = start_vector(a, v0);

    ArnoldiResult out;
    out.basis = DenseColumns(a.n(), static_cast<std::size_t>(steps) + 1);
    out.products = DenseColumns(a.n(), static_cast<std::size_t>(steps));
    out.hbar = Matrix(static_cast<std::size_t>(steps) + 1, static_cast<std::size_t>(steps));
    out.basis.append(v);

    for (int j = 0; j < steps; ++j) {
        const Vector w = matvec(a, out.basis.col(j), counter);
        out.products.append(w);
        out.steps = j + 1;
        try {
            const OrthoResult orth = mgs_orthonormalize(out.basis, w);
            for (int i = 0; i <= j; ++i) out.hbar(i, j) = orth.h[i];
            out.hbar(j + 1, j) = orth.norm;
            out.basis.append(orth.v);
        } catch (const SubspaceExhausted&) {
            const Vector h = out.basis.transpose_times(w);
            for (int i = 0; i <= j; ++i) out.hbar(i, j) = h[i];
            out.breakdown = true;
            break;
        }
    }
    return out;
}

SolveResult rfks_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                       const StepObserver& observer) {
    return filtered_krylov(a, config, v0, observer);
}

SolveResult fks_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                      const StepObserver& observer) {
    SolverConfig c = config;
    c.s_strategy = SStrategy::last_vector();
    c.filter_mode = FilterMode::FrozenWarmup;
    return filtered_krylov(a, c, v0, observer);
}

SolveResult cd_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                     const StepObserver& observer) {
    SolverConfig c = config;
    c.s_strategy = SStrategy::ritz_vector();
    c.filter_mode = FilterMode::Dynamic;
    return filtered_krylov(a, c, v0, observer);
}

SolveResult ac_solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                     const StepObserver& observer) {
    config.validate();
    Vector v = start_vector(a, v0);
    MatvecCounter counter;
    Tracker tracker(config, observer, residual_floor(a));
    const int steps = std::min<int>(config.n_r, static_cast<int>(a.n()));

    for (bool first = true;; first = false) {
        const ArnoldiResult ar = arnoldi(a, v, steps, counter);
        if (first) {
            // Rayleigh quotient residual of v0 from the first Arnoldi product.
            const double rq = dot(ar.basis.col(0), ar.products.col(0));
            Vector r(ar.products.col(0).begin(), ar.products.col(0).end());
            axpy(-rq, ar.basis.col(0), r);
            tracker.set_initial_residual(norm2(r));
        }

        SubspaceState state;
        state.v = DenseColumns(a.n(), static_cast<std::size_t>(ar.steps));
        for (int j = 0; j < ar.steps; ++j) state.v.append(ar.basis.col(j));
        state.w = ar.products;
        state.h = ar.square();
        refresh_ritz(state);

        FilterChoice filter = fit_filter(state.unwanted_ritz_values(), state.theta_cur, config);
        Vector next = state.x_cur;
        if (filter.spec) {
            try {
                next = chebyshev_apply(a, state.x_cur, *filter.spec, counter);
            } catch (const FilterDegenerate&) {
                filter = FilterChoice{std::nullopt, true};
            }
        }
        if (tracker.record(state, counter, !first, filter)) return tracker.finish(counter);
        if (normalize(next) == 0.0 || !std::isfinite(norm2(next))) next = state.x_cur;
        v = std::move(next);
    }
}

SolveResult solve(const CsrMatrix& a, const SolverConfig& config, std::span<const double> v0,
                  const StepObserver& observer) {
    switch (config.method) {
        case Method::RFKS: return rfks_solve(a, config, v0, observer);
        case Method::FKS: return fks_solve(a, config, v0, observer);
        case Method::CD: return cd_solve(a, config, v0, observer);
        case Method::AC: return ac_solve(a, config, v0, observer);
    }
    throw Error("solve: unknown method");
}

}  // namespace fk
