#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "fk/dense_eig.hpp"
#include "fk/errors.hpp"
#include "fk/problems.hpp"
#include "oracles.hpp"

using namespace fk;

namespace {

// Hand assembly on the full (N+2)^2 grid including boundary nodes, then the
// boundary rows and columns are dropped.
Matrix dense_stencil(PdeCaseKind kind, int n) {
    const double h = 2.0 / (n + 1);
    auto omega = [&](double x, double y) { return kind == PdeCaseKind::CaseI ? -1.0 : -std::exp(x * y); };
    auto gamma = [&](double x, double y) { return -10.0 / (1.0 + x * y); };
    auto mu = [&](double x, double y) { return kind == PdeCaseKind::CaseI ? 1.0 : std::sin(1.0 + x * y); };
    auto nu = [&](double x, double y) { return 1.0 / (1.0 + x * y); };
    const int g = n + 2;
    Matrix full(static_cast<std::size_t>(g * g), static_cast<std::size_t>(g * g));
    auto id = [g](int i, int j) { return static_cast<std::size_t>(j * g + i); };
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= n; ++i) {
            const double x = -1.0 + i * h, y = -1.0 + j * h;
            const std::size_t p = id(i, j);
            // -(omega u_x)_x
            full(p, id(i + 1, j)) += -omega(x + h / 2, y) / (h * h);
            full(p, p) += omega(x + h / 2, y) / (h * h) + omega(x - h / 2, y) / (h * h);
            full(p, id(i - 1, j)) += -omega(x - h / 2, y) / (h * h);
            // -(gamma u_y)_y
            full(p, id(i, j + 1)) += -gamma(x, y + h / 2) / (h * h);
            full(p, p) += gamma(x, y + h / 2) / (h * h) + gamma(x, y - h / 2) / (h * h);
            full(p, id(i, j - 1)) += -gamma(x, y - h / 2) / (h * h);
            // (mu u)_x + (nu u)_y
            full(p, id(i + 1, j)) += mu(x + h, y) / (2 * h);
            full(p, id(i - 1, j)) -= mu(x - h, y) / (2 * h);
            full(p, id(i, j + 1)) += nu(x, y + h) / (2 * h);
            full(p, id(i, j - 1)) -= nu(x, y - h) / (2 * h);
        }
    }
    Matrix out(static_cast<std::size_t>(n * n), static_cast<std::size_t>(n * n));
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= n; ++i)
            for (int jj = 1; jj <= n; ++jj)
                for (int ii = 1; ii <= n; ++ii)
                    out(static_cast<std::size_t>((j - 1) * n + i - 1), static_cast<std::size_t>((jj - 1) * n + ii - 1)) =
                        full(id(i, j), id(ii, jj));
    return out;
}

}  // namespace

TEST_CASE("case I with N = 1 is the stencil centre") {
    const CsrMatrix a = assemble_pde({PdeCaseKind::CaseI, 1});
    REQUIRE(a.n() == 1);
    REQUIRE(a.nnz() == 1);
    // omega = -1 and gamma = -10 at the midpoints, h = 1: (-1 - 1 - 10 - 10) / 1.
    CHECK(a.values()[0] == doctest::Approx(-22.0).epsilon(1e-15));
}

TEST_CASE("assembly matches the dense hand stencil") {
    for (PdeCaseKind kind : {PdeCaseKind::CaseI, PdeCaseKind::CaseII}) {
        for (int n = 1; n <= 4; ++n) {
            const Matrix ref = dense_stencil(kind, n);
            const CsrMatrix a = assemble_pde({kind, n});
            const Matrix got = a.to_dense();
            for (std::size_t i = 0; i < ref.rows(); ++i)
                for (std::size_t j = 0; j < ref.cols(); ++j)
                    CHECK(std::abs(got(i, j) - ref(i, j)) <= 1e-13 * std::max(1.0, std::abs(ref(i, j))));

            std::mt19937_64 rng(static_cast<unsigned>(n));
            const Vector x = test::random_vector(rng, a.n());
            MatvecCounter counter;
            const Vector y = matvec(a, x, counter);
            const Vector y_ref = test::dense_matvec(ref, x);
            for (std::size_t i = 0; i < y.size(); ++i)
                CHECK(std::abs(y[i] - y_ref[i]) <= 1e-13 * std::max(1.0, std::abs(y_ref[i])));
        }
    }
}

TEST_CASE("stencil structure") {
    for (int n : {1, 2, 7, 30}) {
        for (PdeCaseKind kind : {PdeCaseKind::CaseI, PdeCaseKind::CaseII}) {
            const CsrMatrix a = assemble_pde({kind, n});
            CHECK(a.n() == static_cast<std::size_t>(n * n));
            CHECK(a.nnz() <= static_cast<std::size_t>(5 * n * n));
            for (std::size_t i = 0; i < a.n(); ++i) CHECK(a.row_ptr()[i + 1] - a.row_ptr()[i] <= 5);
        }
    }
    CHECK_THROWS_AS(assemble_pde({PdeCaseKind::CaseI, 0}), Error);
}

TEST_CASE("case parsing") {
    CHECK(parse_pde_case("case1") == PdeCaseKind::CaseI);
    CHECK(parse_pde_case("CASE2") == PdeCaseKind::CaseII);
    CHECK_THROWS_AS(parse_pde_case("case3"), Error);
}

TEST_CASE("mesh refinement trend of the rightmost eigenvalue") {
    auto rightmost = [](int n) { return eig_values(assemble_pde({PdeCaseKind::CaseI, n}).to_dense()).front(); };
    const Complex l16 = rightmost(16);
    const Complex l24 = rightmost(24);
    MESSAGE("rightmost eigenvalue N=16: " << l16 << ", N=24: " << l24);
    CHECK(std::abs(l24 - l16) <= 0.05 * std::abs(l16));
}

TEST_CASE("Matrix Market: identity and duplicates") {
    std::istringstream id("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n");
    CHECK(read_matrix_market(id) == CsrMatrix::identity(2));

    std::istringstream dup("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 0.5\n1 1 0.5\n");
    const CsrMatrix d = read_matrix_market(dup);
    CHECK(d.nnz() == 1);
    CHECK(d.values()[0] == 1.0);
}

TEST_CASE("Matrix Market: symmetric storage is expanded") {
    std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4.0\n2 1 -1.0\n");
    const Matrix m = read_matrix_market(in).to_dense();
    CHECK(m(0, 0) == 4.0);
    CHECK(m(0, 1) == -1.0);
    CHECK(m(1, 0) == -1.0);
    CHECK(m(1, 1) == 0.0);
}

TEST_CASE("Matrix Market: malformed input names the line") {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_matrix_market(in);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n").find("line 1") !=
          std::string::npos);
    CHECK(message("%%MatrixMarket matrix array real general\n1 1\n1\n").find("coordinate") != std::string::npos);
    CHECK(message("garbage\n").find("line 1") != std::string::npos);
    CHECK(message("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").find("line 3") !=
          std::string::npos);
    CHECK(message("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").find("declared") !=
          std::string::npos);
    CHECK(message("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1.0\n").find("line 3") !=
          std::string::npos);
    CHECK_THROWS_AS(load_matrix_market("/nonexistent/file.mtx"), ParseError);
}

TEST_CASE("Matrix Market round trip") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Triplet> t;
    for (int i = 0; i < 300; ++i) t.push_back({static_cast<std::size_t>(rng() % 40), static_cast<std::size_t>(rng() % 40), u(rng)});
    const CsrMatrix a = CsrMatrix::from_triplets(40, t);

    const auto path = std::filesystem::temp_directory_path() / "fk_roundtrip.mtx";
    write_matrix_market(a, path);
    const CsrMatrix b = load_matrix_market(path);
    std::filesystem::remove(path);
    CHECK(a == b);
}
