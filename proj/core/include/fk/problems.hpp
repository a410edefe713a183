#pragma once

// Test matrices: the 2D convection-diffusion operator
//   -(omega u_x)_x - (gamma u_y)_y + (mu u)_x + (nu u)_y
// on [-1,1]^2 with homogeneous Dirichlet data, and Matrix Market I/O.

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "fk/linalg.hpp"

namespace fk {

enum class PdeCaseKind { CaseI, CaseII };

struct PdeCase {
    PdeCaseKind kind = PdeCaseKind::CaseI;
    int n_grid = 1;  ///< interior points per dimension; matrix size is n_grid^2
};

/// Coefficient functions of one case.
struct PdeCoefficients {
    double (*omega)(double x, double y);
    double (*gamma)(double x, double y);
    double (*mu)(double x, double y);
    double (*nu)(double x, double y);
};

/// Case I:  omega = -1,        gamma = -10/(1+xy), mu = 1,          nu = 1/(1+xy).
/// Case II: omega = -exp(xy),  gamma = -10/(1+xy), mu = sin(1+xy),  nu = 1/(1+xy).
PdeCoefficients coefficients(PdeCaseKind kind);

/// Parses case1 / case2 (also I / II).
PdeCaseKind parse_pde_case(std::string_view name);
std::string_view to_string(PdeCaseKind kind);

/// Mesh width h = 2/(N+1).
double pde_mesh_width(int n_grid);

/// Five-point centered discretization; unknown (i, j) sits at row j N + i.
/// Diffusion coefficients are taken at cell midpoints, convection
/// coefficients at the neighbouring nodes.
CsrMatrix assemble_pde(const PdeCase& pde);

/// Reads a real coordinate file (general or symmetric). Duplicates are
/// summed; symmetric storage is expanded. Throws ParseError with the line.
CsrMatrix load_matrix_market(const std::filesystem::path& path);
CsrMatrix read_matrix_market(std::istream& in);

/// Writes `real general` coordinate format at full precision.
void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path);
void write_matrix_market(const CsrMatrix& a, std::ostream& out);

}  // namespace fk
