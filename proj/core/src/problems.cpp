#include "fk/problems.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fk/errors.hpp"

namespace fk {

namespace {

double minus_one(double, double) { return -1.0; }
double one(double, double) { return 1.0; }
double minus_exp_xy(double x, double y) { return -std::exp(x * y); }
double minus_ten_over(double x, double y) { return -10.0 / (1.0 + x * y); }
double sin_one_plus(double x, double y) { return std::sin(1.0 + x * y); }
double one_over(double x, double y) { return 1.0 / (1.0 + x * y); }

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ParseError("Matrix Market line " + std::to_string(line) + ": " + what);
}

}  // namespace

PdeCoefficients coefficients(PdeCaseKind kind) {
    if (kind == PdeCaseKind::CaseI) return {minus_one, minus_ten_over, one, one_over};
    return {minus_exp_xy, minus_ten_over, sin_one_plus, one_over};
}

PdeCaseKind parse_pde_case(std::string_view name) {
    const std::string s = lower(name);
    if (s == "case1" || s == "i" || s == "1") return PdeCaseKind::CaseI;
    if (s == "case2" || s == "ii" || s == "2") return PdeCaseKind::CaseII;
    throw Error("unknown PDE case '" + std::string(name) + "' (expected case1 or case2)");
}

std::string_view to_string(PdeCaseKind kind) { return kind == PdeCaseKind::CaseI ? "case1" : "case2"; }

double pde_mesh_width(int n_grid) { return 2.0 / (n_grid + 1); }

CsrMatrix assemble_pde(const PdeCase& pde) {
    const int n = pde.n_grid;
    if (n < 1) throw Error("assemble_pde: N must be at least 1");
    const PdeCoefficients c = coefficients(pde.kind);
    const double h = pde_mesh_width(n);
    const double h2 = h * h;
    const double half = 0.5 * h;

    std::vector<Triplet> t;
    t.reserve(5 * static_cast<std::size_t>(n) * n);
    auto index = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };

    for (int j = 0; j < n; ++j) {
        const double y = -1.0 + (j + 1) * h;
        for (int i = 0; i < n; ++i) {
            const double x = -1.0 + (i + 1) * h;
            const std::size_t row = index(i, j);

            const double w_e = c.omega(x + half, y);
            const double w_w = c.omega(x - half, y);
            const double g_n = c.gamma(x, y + half);
            const double g_s = c.gamma(x, y - half);

            t.push_back({row, row, (w_e + w_w + g_n + g_s) / h2});
            if (i + 1 < n) t.push_back({row, index(i + 1, j), -w_e / h2 + c.mu(x + h, y) / (2.0 * h)});
            if (i > 0) t.push_back({row, index(i - 1, j), -w_w / h2 - c.mu(x - h, y) / (2.0 * h)});
            if (j + 1 < n) t.push_back({row, index(i, j + 1), -g_n / h2 + c.nu(x, y + h) / (2.0 * h)});
            if (j > 0) t.push_back({row, index(i, j - 1), -g_s / h2 - c.nu(x, y - h) / (2.0 * h)});
        }
    }
    return CsrMatrix::from_triplets(static_cast<std::size_t>(n) * n, std::move(t));
}

CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) fail(1, "empty input");
    ++line_no;
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        if (banner != "%%MatrixMarket") fail(line_no, "missing %%MatrixMarket banner");
        if (lower(object) != "matrix") fail(line_no, "object must be 'matrix', got '" + object + "'");
        if (lower(format) != "coordinate") fail(line_no, "format must be 'coordinate', got '" + format + "'");
        if (lower(field) != "real") fail(line_no, "field must be 'real', got '" + field + "'");
        symmetry = lower(symmetry);
        if (symmetry != "general" && symmetry != "symmetric")
            fail(line_no, "symmetry must be 'general' or 'symmetric', got '" + symmetry + "'");
        const bool symmetric = symmetry == "symmetric";

        std::size_t rows = 0, cols = 0, entries = 0;
        bool have_size = false;
        std::vector<Triplet> t;
        std::size_t seen = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%') continue;
            std::istringstream ls(line);
            if (!have_size) {
                if (!(ls >> rows >> cols >> entries)) fail(line_no, "expected 'rows cols entries'");
                if (rows != cols) fail(line_no, "matrix must be square");
                have_size = true;
                t.reserve(symmetric ? 2 * entries : entries);
                continue;
            }
            std::size_t r = 0, col = 0;
            double v = 0.0;
            if (!(ls >> r >> col >> v)) fail(line_no, "expected 'row col value'");
            std::string extra;
            if (ls >> extra) fail(line_no, "trailing data '" + extra + "'");
            if (r < 1 || r > rows || col < 1 || col > cols) fail(line_no, "index out of range");
            if (!std::isfinite(v)) fail(line_no, "non-finite value");
            if (++seen > entries) fail(line_no, "more entries than declared");
            t.push_back({r - 1, col - 1, v});
            if (symmetric && r != col) t.push_back({col - 1, r - 1, v});
        }
        if (!have_size) fail(line_no, "missing size line");
        if (seen != entries)
            fail(line_no, "declared " + std::to_string(entries) + " entries, found " + std::to_string(seen));
        return CsrMatrix::from_triplets(rows, std::move(t));
    }
}

CsrMatrix load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open Matrix Market file '" + path.string() + "'");
    return read_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n() << ' ' << a.n() << ' ' << a.nnz() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
            out << i + 1 << ' ' << a.col_idx()[p] + 1 << ' ' << a.values()[p] << '\n';
}

void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write Matrix Market file '" + path.string() + "'");
    write_matrix_market(a, out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace fk
