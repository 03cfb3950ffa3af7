#include "gupeq/reps.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include <Eigen/Sparse>

namespace gupeq {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
constexpr cplx I{0.0, 1.0};

// Forward differences onto midpoints. Dirichlet: n + 1 midpoints -1/2 .. n-1/2
// with zero ghosts; quasi-periodic: n midpoints 1/2 .. n-1/2 with wrap.
SpMat midpoint_gradient(int n, double d, const BoundaryCondition& bc) {
    std::vector<Eigen::Triplet<cplx>> t;
    const double s = 1.0 / d;
    if (bc.kind == BoundaryCondition::Kind::dirichlet) {
        for (int j = 0; j <= n; ++j) {
            if (j < n) t.emplace_back(j, j, s);
            if (j > 0) t.emplace_back(j, j - 1, -s);
        }
        SpMat g(n + 1, n);
        g.setFromTriplets(t.begin(), t.end());
        return g;
    }
    const cplx phase = std::polar(1.0, -bc.lambda.value());
    for (int j = 0; j < n; ++j) {
        t.emplace_back(j, j, -s);
        if (j + 1 < n) {
            t.emplace_back(j, j + 1, s);
        } else {
            t.emplace_back(j, 0, phase * s);
        }
    }
    SpMat g(n, n);
    g.setFromTriplets(t.begin(), t.end());
    return g;
}

// f on the midpoints used by midpoint_gradient.
Eigen::VectorXd midpoint_values(const Eigen::VectorXd& f, const BoundaryCondition& bc) {
    const auto n = f.size();
    if (bc.kind == BoundaryCondition::Kind::dirichlet) {
        Eigen::VectorXd m(n + 1);
        m(0) = f(0);
        m(n) = f(n - 1);
        for (Eigen::Index j = 1; j < n; ++j) m(j) = 0.5 * (f(j - 1) + f(j));
        return m;
    }
    Eigen::VectorXd m(n);
    for (Eigen::Index j = 0; j < n; ++j) m(j) = 0.5 * (f(j) + f((j + 1) % n));
    return m;
}

SpMat sparse_diag(const Eigen::VectorXd& d) {
    SpMat m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
    for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d(i);
    m.makeCompressed();
    return m;
}

Eigen::VectorXd f_on_nodes(const GupTheory& theory, const Eigen::VectorXd& nodes) {
    Eigen::VectorXd f(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) f(i) = theory.f(nodes(i));
    return f;
}

Eigen::VectorXd g_on_nodes(const GupTheory& theory, const Eigen::VectorXd& nodes) {
    Eigen::VectorXd g(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) g(i) = g_of(theory, nodes(i));
    return g;
}

void check_x_grid(const GupTheory& theory, const Grid& grid, const char* who) {
    if (grid.variable != GridVariable::x_momentum && grid.variable != GridVariable::y_momentum) {
        throw PreconditionError(std::string(who) + ": expects a momentum grid, got " + to_string(grid.variable));
    }
    const double X = theory.cutoff() * (1.0 + 1e-12);
    if (grid.nodes.cwiseAbs().maxCoeff() > X) {
        throw PreconditionError(std::string(who) + ": grid extends beyond the theory cutoff X = " +
                                format_number(theory.cutoff()));
    }
}

void check_size(const Grid& grid) {
    if (grid.size() < 3) {
        throw PreconditionError("grid too small for a three-point stencil");
    }
}

RepTriple base_triple(RepKind kind, Grid grid, Eigen::VectorXd momentum, const BoundaryCondition& bc) {
    RepTriple r;
    r.kind = kind;
    r.grid = std::move(grid);
    r.p_matrix = momentum.cast<cplx>().asDiagonal();
    r.momentum = std::move(momentum);
    r.bc = bc;
    return r;
}

}  // namespace

const char* to_string(GridVariable v) {
    switch (v) {
        case GridVariable::x_momentum: return "x_momentum";
        case GridVariable::y_momentum: return "y_momentum";
        case GridVariable::u_coordinate: return "u_coordinate";
        case GridVariable::z_polymer: return "z_polymer";
    }
    return "?";
}

const char* to_string(RepKind k) {
    switch (k) {
        case RepKind::T: return "T";
        case RepKind::K: return "K";
        case RepKind::polymer: return "polymer";
    }
    return "?";
}

const char* to_string(KForm k) { return k == KForm::symmetrized ? "symmetrized" : "similarity"; }

Eigen::VectorXd uniform_nodes(double lo, double hi, int n, double offset_lo, double offset_hi) {
    const double intervals = (n - 1) + offset_lo + offset_hi;
    if (n < 1 || !(intervals > 0.0) || !(hi > lo)) {
        throw PreconditionError("uniform_nodes: need hi > lo and a positive number of intervals");
    }
    const double d = (hi - lo) / intervals;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = lo + (offset_lo + i) * d;
    if (offset_hi == 0.0) x(n - 1) = hi;
    if (offset_lo == 0.0) x(0) = lo;
    return x;
}

Grid build_grid(const GupTheory& theory, int n, GridVariable variable, CutoffPolicy policy) {
    if (n < kMinGridNodes) {
        throw PreconditionError("grid needs at least " + std::to_string(kMinGridNodes) + " nodes, got " +
                                std::to_string(n));
    }
    Grid g;
    g.variable = variable;
    const double X = theory.cutoff();

    if (variable == GridVariable::x_momentum || variable == GridVariable::y_momentum) {
        g.nodes = uniform_nodes(-X, X, n);
        g.spacing = 2.0 * X / (n - 1);
        if (variable == GridVariable::x_momentum) {
            g.weights = g.spacing * f_on_nodes(theory, g.nodes).cwiseInverse();
        } else {
            g.weights = Eigen::VectorXd::Constant(n, g.spacing);
        }
        return g;
    }

    double lo = 0.0;
    double hi = 0.0;
    double off_lo = 0.0;
    double off_hi = 0.0;
    if (policy == CutoffPolicy::cutoff_only) {
        lo = h_of(theory, -X);
        hi = h_of(theory, X);
    } else {
        const HBounds& b = theory.h_bounds();
        if (policy == CutoffPolicy::require_finite_limits && !b.both_finite()) {
            if (!b.determinate()) {
                throw IndeterminateError("h-limits are indeterminate; the grid policy requires them");
            }
            throw PreconditionError("grid policy requires finite h-limits on both sides");
        }
        if (b.minus.finite()) {
            lo = b.minus.value;
            off_lo = 0.5;
        } else {
            lo = h_of(theory, -X);
        }
        if (b.plus.finite()) {
            hi = b.plus.value;
            off_hi = 0.5;
        } else {
            hi = h_of(theory, X);
        }
    }
    g.nodes = uniform_nodes(lo, hi, n, off_lo, off_hi);
    g.spacing = (hi - lo) / ((n - 1) + off_lo + off_hi);
    g.weights = Eigen::VectorXd::Constant(n, g.spacing);
    return g;
}

Eigen::MatrixXcd central_difference(int n, double spacing, const BoundaryCondition& bc) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    const double s = 0.5 / spacing;
    for (int i = 0; i + 1 < n; ++i) {
        d(i, i + 1) = s;
        d(i + 1, i) = -s;
    }
    if (bc.kind == BoundaryCondition::Kind::quasi_periodic) {
        const cplx phase = std::polar(1.0, -bc.lambda.value());
        d(n - 1, 0) += phase * s;
        d(0, n - 1) += -std::conj(phase) * s;
    }
    return d;
}

RepTriple build_T(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc) {
    check_size(grid);
    const double hbar = theory.hbar();
    const int n = grid.size();
    const Eigen::MatrixXcd d = central_difference(n, grid.spacing, bc);
    const SpMat gm = midpoint_gradient(n, grid.spacing, bc);

    if (grid.variable == GridVariable::u_coordinate) {
        RepTriple r = base_triple(RepKind::T, grid, g_on_nodes(theory, grid.nodes), bc);
        r.q_matrix = I * hbar * d;
        r.q_squared = (hbar * hbar) * Eigen::MatrixXcd(gm.adjoint() * gm);
        return r;
    }
    check_x_grid(theory, grid, "build_T");
    const Eigen::VectorXd f = f_on_nodes(theory, grid.nodes);
    Grid tg = grid;
    tg.variable = GridVariable::x_momentum;
    tg.weights = grid.spacing * f.cwiseInverse();

    RepTriple r = base_triple(RepKind::T, std::move(tg), grid.nodes, bc);
    r.q_matrix = I * hbar * (f.cast<cplx>().asDiagonal() * d);
    const SpMat inner = gm.adjoint() * sparse_diag(midpoint_values(f, bc)) * gm;
    r.q_squared = (hbar * hbar) * (f.cast<cplx>().asDiagonal() * Eigen::MatrixXcd(inner));
    return r;
}

RepTriple build_K(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc, KForm form) {
    check_size(grid);
    check_x_grid(theory, grid, "build_K");
    const double hbar = theory.hbar();
    const int n = grid.size();
    const Eigen::VectorXd f = f_on_nodes(theory, grid.nodes);
    const Eigen::VectorXd sf = f.cwiseSqrt();
    const Eigen::MatrixXcd d = central_difference(n, grid.spacing, bc);
    const SpMat gm = midpoint_gradient(n, grid.spacing, bc);
    const SpMat fmid = sparse_diag(midpoint_values(f, bc));

    Grid kg = grid;
    kg.variable = GridVariable::y_momentum;
    kg.weights = Eigen::VectorXd::Constant(n, grid.spacing);
    RepTriple r = base_triple(RepKind::K, std::move(kg), grid.nodes, bc);
    r.k_form = form;

    if (form == KForm::symmetrized) {
        const auto fd = f.cast<cplx>().asDiagonal();
        r.q_matrix = (0.5 * I * hbar) * (Eigen::MatrixXcd(fd * d) + Eigen::MatrixXcd(d * fd));
        const SpMat a = 0.5 * (fmid * gm + gm * sparse_diag(f));
        r.q_squared = (hbar * hbar) * Eigen::MatrixXcd(a.adjoint() * a);
    } else {
        const auto sd = sf.cast<cplx>().asDiagonal();
        r.q_matrix = I * hbar * (sd * d * sd);
        const SpMat inner = gm.adjoint() * fmid * gm;
        r.q_squared = (hbar * hbar) * (sd * Eigen::MatrixXcd(inner) * sd);
    }
    return r;
}

RepTriple build_polymer(const GupTheory& theory, const Grid& grid, const BoundaryCondition& bc) {
    check_size(grid);
    if (grid.variable != GridVariable::z_polymer) {
        throw PreconditionError(std::string("build_polymer: expects a z grid, got ") + to_string(grid.variable));
    }
    const HBounds& b = theory.h_bounds();
    const double zmin = grid.nodes.minCoeff();
    const double zmax = grid.nodes.maxCoeff();
    if ((b.plus.finite() && !(zmax < b.plus.value)) || (b.minus.finite() && !(zmin > b.minus.value))) {
        throw PreconditionError("build_polymer: z grid leaves (h_minus, h_plus) where g is undefined");
    }
    const double hbar = theory.hbar();
    const int n = grid.size();
    RepTriple r = base_triple(RepKind::polymer, grid, g_on_nodes(theory, grid.nodes), bc);
    r.q_matrix = I * hbar * central_difference(n, grid.spacing, bc);
    const SpMat gm = midpoint_gradient(n, grid.spacing, bc);
    r.q_squared = (hbar * hbar) * Eigen::MatrixXcd(gm.adjoint() * gm);
    return r;
}

DiagonalMap unitary_map(const GupTheory& theory, const Grid& grid, MapDirection direction) {
    if (grid.variable != GridVariable::x_momentum && grid.variable != GridVariable::y_momentum) {
        throw PreconditionError("unitary_map: expects a momentum grid");
    }
    const Eigen::VectorXd sf = f_on_nodes(theory, grid.nodes).cwiseSqrt();
    return DiagonalMap(direction == MapDirection::T_to_K ? Eigen::VectorXd(sf.cwiseInverse()) : sf);
}

double weighted_norm(const Eigen::VectorXcd& v, const Eigen::VectorXd& w) {
    return std::sqrt((w.array() * v.array().abs2()).sum());
}

cplx weighted_inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v, const Eigen::VectorXd& w) {
    return (u.conjugate().array() * v.array() * w.cast<cplx>().array()).sum();
}

double hermiticity_residual(const Eigen::MatrixXcd& m, const Eigen::VectorXd& w, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const auto n = m.rows();
    auto random_vector = [&] {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
        return v;
    };
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXcd u = random_vector();
        const Eigen::VectorXcd v = random_vector();
        const Eigen::VectorXcd mu = m * u;
        const Eigen::VectorXcd mv = m * v;
        const double scale = weighted_norm(u, w) * weighted_norm(mv, w) + weighted_norm(mu, w) * weighted_norm(v, w);
        if (scale == 0.0) continue;
        worst = std::max(worst, std::abs(weighted_inner(u, mv, w) - weighted_inner(mu, v, w)) / scale);
    }
    return worst;
}

CommutatorResult commutator_residual(const RepTriple& rep, const GupTheory& theory, const Eigen::VectorXcd& v) {
    const auto& w = rep.grid.weights;
    const double norm = weighted_norm(v, w);
    if (v.size() != rep.momentum.size()) {
        throw PreconditionError("commutator_residual: vector size does not match the grid");
    }
    if (norm == 0.0) {
        throw PreconditionError("commutator_residual: test vector is zero");
    }
    const Eigen::VectorXcd pv = rep.momentum.cast<cplx>().cwiseProduct(v);
    const Eigen::VectorXcd qv = rep.q_matrix * v;
    Eigen::VectorXcd target(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        target(i) = I * theory.hbar() * theory.f(rep.momentum(i)) * v(i);
    }
    const Eigen::VectorXcd r = rep.q_matrix * pv - rep.momentum.cast<cplx>().cwiseProduct(qv) - target;

    CommutatorResult out;
    out.residual = weighted_norm(r, w) / norm;
    const double vmax = v.cwiseAbs().maxCoeff();
    const auto n = v.size();
    for (Eigen::Index i : {Eigen::Index{0}, Eigen::Index{1}, n - 2, n - 1}) {
        if (std::abs(v(i)) > 1e-14 * vmax) {
            out.touches_boundary = true;
        }
    }
    return out;
}

Eigen::VectorXcd bump_vector(const Eigen::VectorXd& nodes, double center, double half_width) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
        const double r = (nodes(i) - center) / half_width;
        if (std::fabs(r) < 1.0) {
            v(i) = std::exp(-1.0 / (1.0 - r * r));
        }
    }
    return v;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
    const auto old = os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) os << ',';
            os << m(i, j).real() << ',' << m(i, j).imag();
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace gupeq
