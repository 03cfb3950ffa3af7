#include "gupeq/spectra.hpp"

#include <cmath>
#include <string>

#include "gupeq/errors.hpp"
#include "gupeq/quadrature.hpp"

namespace gupeq {

namespace {

constexpr cplx I{0.0, 1.0};

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(what) + " must be positive and finite");
    }
}

void require_momentum_grid(const Grid& grid, const char* who) {
    if (grid.variable != GridVariable::x_momentum && grid.variable != GridVariable::y_momentum) {
        throw PreconditionError(std::string(who) + ": expects a momentum grid, got " + to_string(grid.variable));
    }
    if (grid.size() < 3) {
        throw PreconditionError(std::string(who) + ": grid too small");
    }
}

double phase_prefactor(const GupTheory& theory, const FreefallParams& p) {
    return 1.0 / (2.0 * theory.hbar() * p.mass * p.mass * p.g_accel);
}

double phase_integral(const GupTheory& theory, const FreefallParams& p, double a, double b) {
    SimpsonOptions opt;
    opt.abs_tol = theory.quad_tol();
    const double two_m_e = 2.0 * p.mass * p.energy;
    return adaptive_simpson([&](double t) { return (two_m_e - t * t) / theory.f(t); }, a, b, opt).value;
}

}  // namespace

void HamiltonianSpec::validate() const {
    require_positive(mass, "mass");
    if (potential == PotentialKind::harmonic) require_positive(omega, "omega");
    if (potential == PotentialKind::linear_fall) require_positive(g_accel, "gravitational acceleration");
}

Eigen::MatrixXcd assemble_hamiltonian(const RepTriple& rep, const HamiltonianSpec& spec, QSquare mode) {
    spec.validate();
    const Eigen::VectorXd kinetic = rep.momentum.array().square() / (2.0 * spec.mass);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rep.q_matrix.rows(), rep.q_matrix.cols());
    switch (spec.potential) {
        case PotentialKind::harmonic: {
            const double k = 0.5 * spec.mass * spec.omega * spec.omega;
            if (mode == QSquare::compact) {
                h = k * rep.q_squared;
            } else {
                h = k * (rep.q_matrix * rep.q_matrix);
            }
            break;
        }
        case PotentialKind::linear_fall:
            h = (spec.mass * spec.g_accel) * rep.q_matrix;
            break;
        case PotentialKind::none:
            break;
    }
    h.diagonal() += kinetic.cast<cplx>();
    return h;
}

RepTriple ho_triple(const GupTheory& theory, const HONumericOptions& opt) {
    const auto bc = BoundaryCondition::dirichlet();
    switch (opt.rep) {
        case RepKind::T:
            return build_T(theory, build_grid(theory, opt.N, GridVariable::x_momentum), bc);
        case RepKind::K:
            return build_K(theory, build_grid(theory, opt.N, GridVariable::y_momentum), bc, opt.k_form);
        case RepKind::polymer:
            return build_polymer(theory, build_grid(theory, opt.N, GridVariable::z_polymer), bc);
    }
    throw PreconditionError("unknown representation");
}

SpectrumResult ho_numeric(const GupTheory& theory, const HOExactParams& params, const HONumericOptions& opt) {
    // beta comes from the theory's f; only m, omega and hbar are read here.
    require_positive(params.m, "mass");
    require_positive(params.omega, "omega");
    if (std::fabs(params.hbar - theory.hbar()) > 1e-12 * theory.hbar()) {
        throw ValidationError("oscillator hbar differs from the theory's hbar");
    }
    const RepTriple rep = ho_triple(theory, opt);
    const Eigen::MatrixXcd h = assemble_hamiltonian(rep, HamiltonianSpec::harmonic(params.m, params.omega), opt.q_square);
    SpectrumResult r = eig_sym(h, rep.grid.weights, opt.eig);
    r.spacing = rep.grid.spacing;
    r.bc = rep.bc;
    return r;
}

void FreefallParams::validate() const {
    if (!std::isfinite(energy)) {
        throw ValidationError("energy must be finite");
    }
    require_positive(mass, "mass");
    require_positive(g_accel, "gravitational acceleration");
}

double freefall_phase(const GupTheory& theory, const FreefallParams& params, double x) {
    params.validate();
    if (x == 0.0) return 0.0;
    return phase_prefactor(theory, params) * phase_integral(theory, params, 0.0, x);
}

Eigen::VectorXd freefall_phase_on_nodes(const GupTheory& theory, const FreefallParams& params,
                                        const Eigen::VectorXd& nodes) {
    params.validate();
    const auto n = nodes.size();
    Eigen::VectorXd phi(n);
    if (n == 0) return phi;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(nodes(i) > nodes(i - 1))) {
            throw PreconditionError("freefall_phase_on_nodes: nodes must be strictly increasing");
        }
    }
    Eigen::Index i0 = 0;
    nodes.cwiseAbs().minCoeff(&i0);
    const double c = phase_prefactor(theory, params);
    phi(i0) = freefall_phase(theory, params, nodes(i0));
    for (Eigen::Index i = i0 + 1; i < n; ++i) {
        phi(i) = phi(i - 1) + c * phase_integral(theory, params, nodes(i - 1), nodes(i));
    }
    for (Eigen::Index i = i0 - 1; i >= 0; --i) {
        phi(i) = phi(i + 1) + c * phase_integral(theory, params, nodes(i + 1), nodes(i));
    }
    return phi;
}

GeneralizedState freefall_state(const GupTheory& theory, const FreefallParams& params, RepKind kind,
                                const Grid& grid) {
    require_momentum_grid(grid, "freefall_state");
    if (kind == RepKind::polymer) {
        throw PreconditionError("freefall_state: only the T and K representations are supported");
    }
    const Eigen::VectorXd phi = freefall_phase_on_nodes(theory, params, grid.nodes);
    GeneralizedState s;
    s.kind = kind;
    s.values.resize(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        s.values(i) = std::exp(-I * phi(i));
        if (kind == RepKind::K) s.values(i) /= std::sqrt(theory.f(grid.nodes(i)));
    }
    return s;
}

OdeResidual freefall_ode_residual(const GupTheory& theory, const FreefallParams& params, const Grid& grid) {
    const GeneralizedState psi = freefall_state(theory, params, RepKind::T, grid);
    const double d = grid.spacing;
    const double hbar = theory.hbar();
    OdeResidual out;
    double sum = 0.0;
    const auto n = grid.size();
    for (int i = 1; i + 1 < n; ++i) {
        const double x = grid.nodes(i);
        const cplx deriv = (psi.values(i + 1) - psi.values(i - 1)) / (2.0 * d);
        const cplx r = I * hbar * params.mass * params.g_accel * theory.f(x) * deriv +
                       (x * x / (2.0 * params.mass) - params.energy) * psi.values(i);
        out.max_abs = std::max(out.max_abs, std::abs(r));
        sum += std::norm(r) * d;
    }
    out.rms = std::sqrt(sum / (d * (n - 2)));
    return out;
}

double BumpSpec::operator()(double x) const {
    const double s = (x - center) / sigma;
    if (!(std::fabs(s) < cutoff)) return 0.0;
    double p = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) p = p * s + *it;
    return scale * p * std::exp(-0.5 * s * s);
}

PullbackResult pullback_check(const GupTheory& theory, const FreefallParams& params, const BumpSpec& bump,
                              const Grid& grid) {
    require_momentum_grid(grid, "pullback_check");
    if (!(bump.sigma > 0.0) || !(bump.cutoff > 0.0)) {
        throw PreconditionError("pullback_check: bump width and cutoff must be positive");
    }
    const auto n = grid.size();
    if (!(bump.support_lo() > grid.nodes(0)) || !(bump.support_hi() < grid.nodes(n - 1))) {
        throw PreconditionError("pullback_check: bump support touches the grid boundary");
    }
    const GeneralizedState psi = freefall_state(theory, params, RepKind::T, grid);
    const GeneralizedState phi = freefall_state(theory, params, RepKind::K, grid);
    const double d = grid.spacing;
    PullbackResult out{};
    for (int i = 0; i < n; ++i) {
        const double x = grid.nodes(i);
        const double b = bump(x);
        if (b == 0.0) continue;
        const double f = theory.f(x);
        out.F += psi.values(i) * b * (d / f);
        out.G += phi.values(i) * (b / std::sqrt(f)) * d;
    }
    out.abs_diff = std::abs(out.F - out.G);
    return out;
}

}  // namespace gupeq
