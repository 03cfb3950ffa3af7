#pragma once

#include <vector>

#include "gupeq/extension.hpp"
#include "gupeq/spectra.hpp"
#include "gupeq/theory.hpp"

namespace gupeq {

enum class SelfAdjVerdict {
    essentially_self_adjoint,
    one_parameter_extensions,
    no_self_adjoint_extension,
    indeterminate,
};

enum class PolymerVerdict {
    inequivalent,
    undetermined_possibly_equivalent,
    invalid_position_operator,
};

[[nodiscard]] const char* to_string(SelfAdjVerdict v);
[[nodiscard]] const char* to_string(PolymerVerdict v);

/// Norm of a deficiency solution psi = exp(-+ h / hbar) in L^2(dx / f),
/// scanned octave by octave on each side with RK4 on (h, norm).
struct NormScan {
    LimitStatus negative_side = LimitStatus::indeterminate;
    LimitStatus positive_side = LimitStatus::indeterminate;

    /// finite when both sides are, infinite when either is.
    [[nodiscard]] LimitStatus total() const noexcept;
};

struct DeficiencyReport {
    int n_plus = -1;   ///< 0 or 1; -1 when undecided
    int n_minus = -1;
    bool minimal_length = false;
    double total_measure = std::numeric_limits<double>::infinity();
    SelfAdjVerdict verdict = SelfAdjVerdict::indeterminate;
    HBounds bounds;
    NormScan psi_plus;   ///< psi_+ = exp(-h / hbar)
    NormScan psi_minus;  ///< psi_- = exp(+h / hbar)
    bool quadrature_agrees = false;  ///< both criteria determinate and equal

    [[nodiscard]] bool determinate() const noexcept { return verdict != SelfAdjVerdict::indeterminate; }
};

/// n_plus = 1 iff h_minus is finite, n_minus = 1 iff h_plus is finite; the
/// direct norm quadrature is computed alongside and compared.
[[nodiscard]] DeficiencyReport deficiency_indices(const GupTheory& theory);

/// Direct quadrature only: sign = +1 for psi_+, -1 for psi_-.
[[nodiscard]] NormScan deficiency_norm_scan(const GupTheory& theory, int sign);

/// q_k = hbar (2 pi k + lambda) / L for k in [k_lo, k_hi], ascending.
/// PreconditionError unless the theory has a minimal length.
[[nodiscard]] std::vector<double> position_lattice(const GupTheory& theory, ExtensionParam lambda, int k_lo, int k_hi);

struct LatticeNumeric {
    int N = 0;
    double spacing_du = 0.0;
    std::vector<double> physical;  ///< eigenvalues whose eigenvectors are smooth, ascending
    int doublers = 0;              ///< discarded sawtooth eigenvectors
    double spacing = 0.0;          ///< mean gap of the central physical eigenvalues
    double spacing_exact = 0.0;    ///< 2 pi hbar / L
    double offset = 0.0;           ///< physical eigenvalue nearest hbar lambda / L
};

/// Diagonalises q_T on a quasi-periodic u grid of n nodes. The central
/// difference has sawtooth partners of every smooth eigenvector; they are
/// separated by the sign of the nearest-neighbour correlation.
[[nodiscard]] LatticeNumeric lattice_numeric(const GupTheory& theory, ExtensionParam lambda, int n,
                                             int central_gaps = 4, const EigOptions& eig = {});

/// Verdict of the polymer comparison; IndeterminateError if the deficiency
/// indices could not be decided.
[[nodiscard]] PolymerVerdict polymer_inequivalence(const GupTheory& theory);
[[nodiscard]] PolymerVerdict polymer_inequivalence(const DeficiencyReport& report);

}  // namespace gupeq
