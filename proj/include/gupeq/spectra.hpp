#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gupeq/exact.hpp"
#include "gupeq/reps.hpp"
#include "gupeq/theory.hpp"

namespace gupeq {

// ---------------------------------------------------------------------------
// Eigensolver

enum class EigenMethod {
    automatic,       ///< tridiagonal input: QL directly; n <= jacobi_max_n: Jacobi; else tridiagonal_ql
    jacobi,          ///< cyclic Jacobi rotations
    tridiagonal_ql,  ///< Householder tridiagonalisation + implicit QL (Eigen)
};

enum class ComplexPath {
    automatic,  ///< embedding up to jacobi_max_n, direct Hermitian solver above
    embedding,  ///< 2N x 2N real symmetric embedding [[A, -B], [B, A]]
    direct,     ///< complex Hermitian solver (Eigen)
};

[[nodiscard]] const char* to_string(EigenMethod m);

struct EigOptions {
    EigenMethod method = EigenMethod::automatic;
    ComplexPath complex_path = ComplexPath::automatic;
    int jacobi_max_n = 200;
    double hermiticity_tol = 1e-8;
};

/// Dense real symmetric eigendecomposition, values ascending, columns orthonormal.
struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    int sweeps = 0;  ///< Jacobi sweeps; 0 for other methods
    std::string method;
};

[[nodiscard]] SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, int max_sweeps = 100);
[[nodiscard]] SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a, EigenMethod method, int jacobi_max_n = 200);

struct SpectrumResult {
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXcd eigenvectors; ///< columns, unit norm in `weights`
    Eigen::VectorXd residuals;     ///< ||M v - E v||_w / ||v||_w per pair
    Eigen::VectorXd weights;
    int N = 0;
    double spacing = 0.0;
    BoundaryCondition bc;
    std::string method;

    [[nodiscard]] double max_residual() const;
};

/// Relative weighted Hermiticity defect ||W M - (W M)^H||_F / ||W M||_F.
[[nodiscard]] double weighted_hermiticity_defect(const Eigen::MatrixXcd& m, const Eigen::VectorXd& w);

/// Full diagonalisation of M, Hermitian in <u, v>_w. Solves the symmetric
/// S = W^{1/2} M W^{-1/2}; complex input goes through the real embedding
/// (pairs deduplicated within each degenerate cluster) or the direct solver.
/// Eigenvector phase: first component above 1e-8 of the maximum is real positive.
[[nodiscard]] SpectrumResult eig_sym(const Eigen::MatrixXcd& m, const Eigen::VectorXd& weights,
                                     const EigOptions& opt = {});

// ---------------------------------------------------------------------------
// Hamiltonians

enum class PotentialKind { none, harmonic, linear_fall };

struct HamiltonianSpec {
    double mass = 1.0;
    PotentialKind potential = PotentialKind::harmonic;
    double omega = 1.0;
    double g_accel = 1.0;

    static HamiltonianSpec harmonic(double m, double omega) { return {m, PotentialKind::harmonic, omega, 1.0}; }
    static HamiltonianSpec linear_fall(double m, double g) { return {m, PotentialKind::linear_fall, 1.0, g}; }
    static HamiltonianSpec free(double m) { return {m, PotentialKind::none, 1.0, 1.0}; }

    void validate() const;
};

enum class QSquare {
    compact,  ///< rep.q_squared, three-point midpoint stencil
    product,  ///< q_matrix * q_matrix; decouples even and odd nodes
};

/// H = diag(p_i^2 / 2m) + V(q) on the representation's grid.
[[nodiscard]] Eigen::MatrixXcd assemble_hamiltonian(const RepTriple& rep, const HamiltonianSpec& spec,
                                                    QSquare mode = QSquare::compact);

struct HONumericOptions {
    RepKind rep = RepKind::T;
    KForm k_form = KForm::similarity;
    int N = 1200;
    QSquare q_square = QSquare::compact;
    EigOptions eig;
};

/// Builds the requested triple with Dirichlet bc, assembles the oscillator of
/// `params` (m, omega; hbar must match the theory) and diagonalises it.
[[nodiscard]] SpectrumResult ho_numeric(const GupTheory& theory, const HOExactParams& params,
                                        const HONumericOptions& opt = {});

/// The triple ho_numeric diagonalises.
[[nodiscard]] RepTriple ho_triple(const GupTheory& theory, const HONumericOptions& opt);

// ---------------------------------------------------------------------------
// Free fall

struct FreefallParams {
    double energy = 1.0;
    double mass = 1.0;
    double g_accel = 1.0;

    void validate() const;
};

/// Phi(x) = (1 / (2 hbar m^2 g)) int_0^x (2 m E - t^2) / f(t) dt.
[[nodiscard]] double freefall_phase(const GupTheory& theory, const FreefallParams& params, double x);

/// Phi on sorted nodes, accumulated outward from the node nearest 0.
[[nodiscard]] Eigen::VectorXd freefall_phase_on_nodes(const GupTheory& theory, const FreefallParams& params,
                                                      const Eigen::VectorXd& nodes);

struct GeneralizedState {
    RepKind kind = RepKind::T;
    Eigen::VectorXcd values;
    bool normalizable = false;  ///< always false: these are functionals, not vectors of L^2
};

/// T: exp(-i Phi(x_i)); K: f(y_i)^{-1/2} exp(-i Phi(y_i)).
[[nodiscard]] GeneralizedState freefall_state(const GupTheory& theory, const FreefallParams& params,
                                              RepKind kind, const Grid& grid);

struct OdeResidual {
    double max_abs = 0.0;
    double rms = 0.0;  ///< with weights dx over the interior
};

/// i hbar m g f psi' + (x^2 / 2m - E) psi at interior nodes, psi' by central differences.
[[nodiscard]] OdeResidual freefall_ode_residual(const GupTheory& theory, const FreefallParams& params,
                                                const Grid& grid);

/// poly(s) * exp(-s^2 / 2), s = (x - center) / sigma, cut to zero for |s| >= cutoff.
struct BumpSpec {
    double center = 0.0;
    double sigma = 1.0;
    std::vector<double> poly{1.0};  ///< coefficients, lowest degree first
    double cutoff = 8.0;
    double scale = 1.0;

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double support_lo() const { return center - cutoff * sigma; }
    [[nodiscard]] double support_hi() const { return center + cutoff * sigma; }
};

struct PullbackResult {
    std::complex<double> F;  ///< sum psi_E b dx / f on the T grid
    std::complex<double> G;  ///< sum phi_E (U b) dy on the K grid
    double abs_diff = 0.0;
};

/// PreconditionError if the bump's support reaches the outermost nodes.
[[nodiscard]] PullbackResult pullback_check(const GupTheory& theory, const FreefallParams& params,
                                            const BumpSpec& bump, const Grid& grid);

}  // namespace gupeq
