#include "gupeq/selfadj.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gupeq/errors.hpp"

namespace gupeq {

namespace {

struct Rk4Step {
    double h = 0.0;
    double norm = 0.0;
};

// RK4 on h' = 1/f, n' = exp(-2 sign h / hbar) / f from a to b with `steps` steps.
Rk4Step rk4_octave(const GupTheory& theory, int sign, double a, double b, double h0, int steps) {
    const double hbar = theory.hbar();
    const double dx = (b - a) / steps;
    auto rhs = [&](double x, double h, double& dh, double& dn) {
        const double inv = 1.0 / theory.f(x);
        dh = inv;
        dn = std::exp(-2.0 * sign * h / hbar) * inv;
    };
    double h = h0;
    double n = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double x = a + i * dx;
        double k1h, k1n, k2h, k2n, k3h, k3n, k4h, k4n;
        rhs(x, h, k1h, k1n);
        rhs(x + 0.5 * dx, h + 0.5 * dx * k1h, k2h, k2n);
        rhs(x + 0.5 * dx, h + 0.5 * dx * k2h, k3h, k3n);
        rhs(x + dx, h + dx * k3h, k4h, k4n);
        h += dx / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
        n += dx / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
    }
    return {h, std::fabs(n)};
}

constexpr int kFirstSteps = 32;
constexpr int kMaxSteps = 1 << 18;

// Octave integral with step doubling. Returns NaN when the step cap is hit
// and +inf when the integrand overflows.
Rk4Step converged_octave(const GupTheory& theory, int sign, double a, double b, double h0) {
    try {
        Rk4Step prev = rk4_octave(theory, sign, a, b, h0, kFirstSteps);
        for (int steps = 2 * kFirstSteps; steps <= kMaxSteps; steps *= 2) {
            const Rk4Step next = rk4_octave(theory, sign, a, b, h0, steps);
            if (!std::isfinite(next.norm) || !std::isfinite(next.h)) {
                return {next.h, std::numeric_limits<double>::infinity()};
            }
            const bool norm_ok = std::fabs(next.norm - prev.norm) <= 1e-10 * next.norm || next.norm < 1e-300;
            const bool h_ok = std::fabs(next.h - prev.h) <= 1e-12 * std::max(1.0, std::fabs(next.h));
            if (norm_ok && h_ok) return next;
            prev = next;
        }
    } catch (const DomainError&) {
        return {0.0, std::numeric_limits<double>::infinity()};
    }
    return {0.0, std::numeric_limits<double>::quiet_NaN()};
}

LimitStatus scan_norm_side(const GupTheory& theory, int sign, double side) {
    const Rk4Step base = converged_octave(theory, sign, 0.0, side, 0.0);
    if (std::isnan(base.norm)) return LimitStatus::indeterminate;
    if (!std::isfinite(base.norm)) return LimitStatus::infinite;

    double h = base.h;
    bool stalled = false;
    auto octave = [&](int k) -> double {
        const double a = side * std::ldexp(1.0, k);
        const double b = side * std::ldexp(1.0, k + 1);
        const Rk4Step r = converged_octave(theory, sign, a, b, h);
        if (std::isnan(r.norm)) {
            stalled = true;
            return r.norm;
        }
        h = r.h;
        return r.norm;
    };
    const TailScan scan = scan_octaves(octave, theory.quad_tol(), theory.options().octave_cap);
    return stalled ? LimitStatus::indeterminate : scan.status;
}

int index_from(const HLimit& side) {
    if (!side.converged()) return -1;
    return side.finite() ? 1 : 0;
}

double total_measure_or_throw(const GupTheory& theory) {
    const HBounds& b = theory.h_bounds();
    if (!b.both_finite()) {
        if (!b.determinate()) {
            throw IndeterminateError("h-limits are indeterminate; cannot decide whether the theory has a minimal length");
        }
        throw PreconditionError("not a minimal-length theory: at least one h-limit is infinite");
    }
    return b.total_measure();
}

}  // namespace

const char* to_string(SelfAdjVerdict v) {
    switch (v) {
        case SelfAdjVerdict::essentially_self_adjoint: return "essentially_self_adjoint";
        case SelfAdjVerdict::one_parameter_extensions: return "one_parameter_extensions";
        case SelfAdjVerdict::no_self_adjoint_extension: return "no_self_adjoint_extension";
        case SelfAdjVerdict::indeterminate: return "indeterminate";
    }
    return "?";
}

const char* to_string(PolymerVerdict v) {
    switch (v) {
        case PolymerVerdict::inequivalent: return "inequivalent";
        case PolymerVerdict::undetermined_possibly_equivalent: return "undetermined_possibly_equivalent";
        case PolymerVerdict::invalid_position_operator: return "invalid_position_operator";
    }
    return "?";
}

LimitStatus NormScan::total() const noexcept {
    if (negative_side == LimitStatus::finite && positive_side == LimitStatus::finite) return LimitStatus::finite;
    if (negative_side == LimitStatus::infinite || positive_side == LimitStatus::infinite) return LimitStatus::infinite;
    return LimitStatus::indeterminate;
}

NormScan deficiency_norm_scan(const GupTheory& theory, int sign) {
    if (sign != 1 && sign != -1) {
        throw PreconditionError("deficiency_norm_scan: sign must be +1 or -1");
    }
    NormScan s;
    s.negative_side = scan_norm_side(theory, sign, -1.0);
    s.positive_side = scan_norm_side(theory, sign, +1.0);
    return s;
}

DeficiencyReport deficiency_indices(const GupTheory& theory) {
    DeficiencyReport r;
    r.bounds = theory.h_bounds();
    r.n_plus = index_from(r.bounds.minus);
    r.n_minus = index_from(r.bounds.plus);
    r.psi_plus = deficiency_norm_scan(theory, +1);
    r.psi_minus = deficiency_norm_scan(theory, -1);

    if (r.n_plus >= 0 && r.n_minus >= 0) {
        r.minimal_length = r.n_plus == 1 && r.n_minus == 1;
        r.total_measure = r.bounds.total_measure();
        if (r.n_plus == 0 && r.n_minus == 0) {
            r.verdict = SelfAdjVerdict::essentially_self_adjoint;
        } else if (r.minimal_length) {
            r.verdict = SelfAdjVerdict::one_parameter_extensions;
        } else {
            r.verdict = SelfAdjVerdict::no_self_adjoint_extension;
        }
    }

    auto quad_index = [](const NormScan& s) {
        const LimitStatus t = s.total();
        return t == LimitStatus::indeterminate ? -1 : (t == LimitStatus::finite ? 1 : 0);
    };
    const int qp = quad_index(r.psi_plus);
    const int qm = quad_index(r.psi_minus);
    r.quadrature_agrees = r.determinate() && qp >= 0 && qm >= 0 && qp == r.n_plus && qm == r.n_minus;
    return r;
}

std::vector<double> position_lattice(const GupTheory& theory, ExtensionParam lambda, int k_lo, int k_hi) {
    const double L = total_measure_or_throw(theory);
    if (k_lo > k_hi) {
        throw PreconditionError("position_lattice: empty k range");
    }
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (int k = k_lo; k <= k_hi; ++k) {
        q.push_back(theory.hbar() * (2.0 * std::numbers::pi * k + lambda.value()) / L);
    }
    return q;
}

LatticeNumeric lattice_numeric(const GupTheory& theory, ExtensionParam lambda, int n, int central_gaps,
                               const EigOptions& eig) {
    const double L = total_measure_or_throw(theory);
    if (central_gaps < 1) {
        throw PreconditionError("lattice_numeric: need at least one gap");
    }
    const Grid grid = build_grid(theory, n, GridVariable::u_coordinate, CutoffPolicy::require_finite_limits);
    // On the u grid q_T = i hbar D; p = g(u) is not needed for the position spectrum.
    const Eigen::MatrixXcd q =
        cplx(0.0, theory.hbar()) * central_difference(n, grid.spacing, BoundaryCondition::quasi_periodic(lambda));
    const SpectrumResult sp = eig_sym(q, grid.weights, eig);

    LatticeNumeric out;
    out.N = n;
    out.spacing_du = grid.spacing;
    out.spacing_exact = 2.0 * std::numbers::pi * theory.hbar() / L;

    // Correlation form C(u, v) = Re sum conj(u_i) v_{i+1}, symmetrised.
    auto correlation = [](const Eigen::MatrixXcd& v) {
        const auto m = v.rows();
        const Eigen::MatrixXcd c = v.topRows(m - 1).adjoint() * v.bottomRows(m - 1);
        return Eigen::MatrixXcd(0.5 * (c + c.adjoint()));
    };

    const double scale = std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * scale;
    const auto total = sp.eigenvalues.size();
    Eigen::Index start = 0;
    while (start < total) {
        Eigen::Index end = start + 1;
        while (end < total && sp.eigenvalues(end) - sp.eigenvalues(end - 1) <= tol) ++end;
        const Eigen::Index size = end - start;
        const Eigen::MatrixXcd v = sp.eigenvectors.middleCols(start, size);
        const Eigen::MatrixXcd c = correlation(v);
        const Eigen::MatrixXcd gram = v.adjoint() * v;
        // Generalised problem C a = c G a separates smooth from sawtooth vectors.
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(c, gram);
        for (Eigen::Index j = 0; j < size; ++j) {
            if (ges.eigenvalues()(j) > 0.0) {
                out.physical.push_back(sp.eigenvalues(start + j));
            } else {
                ++out.doublers;
            }
        }
        start = end;
    }
    std::sort(out.physical.begin(), out.physical.end());

    const double target = theory.hbar() * lambda.value() / L;
    const auto np = static_cast<int>(out.physical.size());
    if (np < central_gaps + 1) {
        throw NumericalError("lattice_numeric: too few smooth eigenvectors");
    }
    int j0 = 0;
    for (int j = 1; j < np; ++j) {
        if (std::fabs(out.physical[j] - target) < std::fabs(out.physical[j0] - target)) j0 = j;
    }
    out.offset = out.physical[j0];
    int lo = std::clamp(j0 - central_gaps / 2, 0, np - 1 - central_gaps);
    out.spacing = (out.physical[lo + central_gaps] - out.physical[lo]) / central_gaps;
    return out;
}

PolymerVerdict polymer_inequivalence(const DeficiencyReport& report) {
    if (!report.determinate()) {
        throw IndeterminateError("deficiency indices are indeterminate; no polymer verdict");
    }
    if (report.n_plus == 1 && report.n_minus == 1) return PolymerVerdict::inequivalent;
    if (report.n_plus == 0 && report.n_minus == 0) return PolymerVerdict::undetermined_possibly_equivalent;
    return PolymerVerdict::invalid_position_operator;
}

PolymerVerdict polymer_inequivalence(const GupTheory& theory) {
    // The polymer q = i hbar d/dz on L^2(R, dz) has indices (0, 0): exp(-+ z / hbar)
    // is never square integrable on the whole line. The verdict therefore
    // depends on the indices of the theory's own q alone.
    return polymer_inequivalence(deficiency_indices(theory));
}

}  // namespace gupeq
