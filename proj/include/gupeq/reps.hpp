#pragma once

// Discrete T, K and polymer representations of a GUP theory.
//
// All operators act on nodal values. Inner products are <u, v>_w =
// sum_i w_i conj(u_i) v_i with the grid's weights: dx/f on the T grid, dy on
// the K grid, du or dz on the u/z grids.

#include <complex>
#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

#include "gupeq/extension.hpp"
#include "gupeq/theory.hpp"

namespace gupeq {

using cplx = std::complex<double>;

enum class GridVariable {
    x_momentum,    ///< T space, measure dx/f(x)
    y_momentum,    ///< K space, measure dy
    u_coordinate,  ///< u = h(x), T space in the coordinate where q = i hbar d/du
    z_polymer,     ///< polymer space, measure dz
};

[[nodiscard]] const char* to_string(GridVariable v);

enum class CutoffPolicy {
    automatic,              ///< u/z: finite h-limits where known, h(+-X) elsewhere
    require_finite_limits,  ///< u/z: both h-limits must be finite
    cutoff_only,            ///< u/z: always [h(-X), h(X)]
};

struct Grid {
    GridVariable variable = GridVariable::x_momentum;
    Eigen::VectorXd nodes;
    double spacing = 0.0;
    Eigen::VectorXd weights;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes.size()); }
};

inline constexpr int kMinGridNodes = 16;

/// N nodes lo + (offset_lo + i) * d, with d chosen so the last node sits
/// offset_hi spacings below hi. Offsets of 1/2 give cell-centred ends.
[[nodiscard]] Eigen::VectorXd uniform_nodes(double lo, double hi, int n, double offset_lo = 0.0,
                                            double offset_hi = 0.0);

[[nodiscard]] Grid build_grid(const GupTheory& theory, int n, GridVariable variable,
                              CutoffPolicy policy = CutoffPolicy::automatic);

struct BoundaryCondition {
    enum class Kind { dirichlet, quasi_periodic };
    Kind kind = Kind::dirichlet;
    ExtensionParam lambda;

    static BoundaryCondition dirichlet() { return {}; }
    static BoundaryCondition quasi_periodic(ExtensionParam l) { return {Kind::quasi_periodic, l}; }
};

enum class RepKind { T, K, polymer };
enum class KForm { symmetrized, similarity };

[[nodiscard]] const char* to_string(RepKind k);
[[nodiscard]] const char* to_string(KForm k);

struct RepTriple {
    RepKind kind = RepKind::T;
    KForm k_form = KForm::symmetrized;  ///< meaningful for K only
    Grid grid;
    Eigen::VectorXd momentum;   ///< spectrum of p on the grid: x_i, y_i or g(z_i)
    Eigen::MatrixXcd p_matrix;  ///< diag(momentum)
    Eigen::MatrixXcd q_matrix;  ///< central differences
    /// Compact three-point discretisation of q^2 (midpoint differences). The
    /// square of q_matrix couples only every second node; Hamiltonians use this.
    Eigen::MatrixXcd q_squared;
    BoundaryCondition bc;
};

/// Antisymmetric central-difference d/dx with Dirichlet truncation or
/// quasi-periodic wrap psi_N = e^{-i lambda} psi_0, which puts the spectrum of
/// i hbar d/du on hbar (2 pi k + lambda) / L.
[[nodiscard]] Eigen::MatrixXcd central_difference(int n, double spacing, const BoundaryCondition& bc);

/// T triple: p = diag(x), q = i hbar f(x) d/dx on an x grid; on a u grid
/// q = i hbar d/du and p = diag(g(u)).
[[nodiscard]] RepTriple build_T(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc);

/// K triple on an x or y grid: p = diag(y) and either
/// q = (i hbar / 2)(f D + D f) or q = i hbar sqrt(f) D sqrt(f).
[[nodiscard]] RepTriple build_K(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc,
                                KForm form);

/// Polymer triple on a z grid: q = i hbar D, p = diag(g(z)).
[[nodiscard]] RepTriple build_polymer(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc);

enum class MapDirection { T_to_K, K_to_T };

using DiagonalMap = Eigen::DiagonalMatrix<double, Eigen::Dynamic>;

/// U = diag(1/sqrt f) from T to K, U^{-1} = diag(sqrt f) back.
[[nodiscard]] DiagonalMap unitary_map(const GupTheory& theory, const Grid& grid, MapDirection direction);

[[nodiscard]] double weighted_norm(const Eigen::VectorXcd& v, const Eigen::VectorXd& w);
[[nodiscard]] cplx weighted_inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, const Eigen::VectorXd& w);

/// max over random pairs of |<u, M v>_w - <M u, v>_w| / (|u|_w |M v|_w + |M u|_w |v|_w).
[[nodiscard]] double hermiticity_residual(const Eigen::MatrixXcd& m, const Eigen::VectorXd& w, int trials = 100,
                                          std::uint64_t seed = 12345);

struct CommutatorResult {
    double residual = 0.0;
    bool touches_boundary = false;  ///< the stencil was truncated under v's support
};

/// ||(qp - pq) v - i hbar f(p) v||_w / ||v||_w in the representation's inner product.
[[nodiscard]] CommutatorResult commutator_residual(const RepTriple& rep, const GupTheory& theory,
                                                   const Eigen::VectorXcd& v);

/// Smooth compactly supported bump exp(-1 / (1 - r^2)), r = (s - center) / half_width.
[[nodiscard]] Eigen::VectorXcd bump_vector(const Eigen::VectorXd& nodes, double center, double half_width);

/// Dense row-major CSV, each entry written as "re,im".
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m);

}  // namespace gupeq
