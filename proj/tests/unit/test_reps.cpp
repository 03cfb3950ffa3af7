#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gupeq/reps.hpp"
#include "gupeq/spectra.hpp"
#include "support.hpp"

using namespace gupeq;
using gupeq::testing::theory_of;

namespace {

constexpr cplx I{0.0, 1.0};

Eigen::VectorXcd diag_of(const DiagonalMap& m) { return m.diagonal().cast<cplx>(); }

double sym_gap(const GupTheory& theory, int n) {
    const Grid grid = build_grid(theory, n, GridVariable::x_momentum);
    const auto bc = BoundaryCondition::dirichlet();
    const RepTriple t = build_T(theory, grid, bc);
    const RepTriple ksym = build_K(theory, grid, bc, KForm::symmetrized);
    const Eigen::MatrixXcd mapped = diag_of(unitary_map(theory, grid, MapDirection::T_to_K)).asDiagonal() *
                                    t.q_matrix *
                                    diag_of(unitary_map(theory, grid, MapDirection::K_to_T)).asDiagonal();
    const Eigen::VectorXcd b = bump_vector(grid.nodes, 0.0, 10.0);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, grid.spacing);
    return weighted_norm((mapped - ksym.q_matrix) * b, w) / weighted_norm(b, w);
}

double commutator_at(const GupTheory& theory, RepKind kind, int n, double center = 0.0) {
    const auto bc = BoundaryCondition::dirichlet();
    if (kind == RepKind::polymer) {
        const Grid z = build_grid(theory, n, GridVariable::z_polymer);
        const RepTriple rep = build_polymer(theory, z, bc);
        return commutator_residual(rep, theory, bump_vector(z.nodes, center, 0.5 * z.nodes(n - 1))).residual;
    }
    const Grid x = build_grid(theory, n, GridVariable::x_momentum);
    const RepTriple rep = kind == RepKind::T ? build_T(theory, x, bc) : build_K(theory, x, bc, KForm::similarity);
    return commutator_residual(rep, theory, bump_vector(x.nodes, center, 0.5 * theory.cutoff())).residual;
}

}  // namespace

TEST_CASE("uniform nodes and grid construction") {
    const Eigen::VectorXd nodes = uniform_nodes(-2.0, 2.0, 5);
    REQUIRE(nodes.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(nodes(i) == doctest::Approx(-2.0 + i));

    const GupTheory flat = theory_of("1", 2.0);
    CHECK_THROWS_AS((void)build_grid(flat, 5, GridVariable::x_momentum), PreconditionError);

    const Grid x = build_grid(flat, 17, GridVariable::x_momentum);
    CHECK(x.spacing == doctest::Approx(0.25));
    CHECK(x.nodes(0) == -2.0);
    CHECK(x.nodes(16) == doctest::Approx(2.0));
    const Grid y = build_grid(flat, 17, GridVariable::y_momentum);
    CHECK((x.weights - y.weights).cwiseAbs().maxCoeff() == 0.0);

    const GupTheory ho = theory_of("1+0.1*p^2");
    const Grid t = build_grid(ho, 200, GridVariable::x_momentum);
    for (int i = 0; i < 200; ++i) {
        CHECK(t.weights(i) == doctest::Approx(t.spacing / (1 + 0.1 * t.nodes(i) * t.nodes(i))).epsilon(1e-14));
        if (i > 0) CHECK(std::fabs(t.nodes(i) - t.nodes(i - 1) - t.spacing) < 1e-12 * t.spacing * 200);
    }

    const Grid u = build_grid(ho, 400, GridVariable::u_coordinate);
    const double hp = ho.h_bounds().plus.value;
    CHECK(u.nodes(0) == doctest::Approx(-hp + u.spacing / 2).epsilon(1e-10));
    CHECK(u.nodes(399) == doctest::Approx(hp - u.spacing / 2).epsilon(1e-10));
    CHECK(u.spacing == doctest::Approx(2 * hp / 400).epsilon(1e-10));
    CHECK(hp == doctest::Approx(4.967).epsilon(1e-3));

    CHECK_THROWS_AS((void)build_grid(flat, 64, GridVariable::u_coordinate, CutoffPolicy::require_finite_limits),
                    PreconditionError);
    const Grid uf = build_grid(flat, 64, GridVariable::u_coordinate);
    CHECK(uf.nodes(0) == doctest::Approx(-2.0));
}

TEST_CASE("central difference and boundary conditions") {
    const Eigen::MatrixXcd d = central_difference(4, 0.5, BoundaryCondition::dirichlet());
    CHECK(d(0, 1) == cplx(1.0));
    CHECK(d(1, 0) == cplx(-1.0));
    CHECK(d(0, 3) == cplx(0.0));
    const double lam = 0.7;
    const Eigen::MatrixXcd q = central_difference(4, 0.5, BoundaryCondition::quasi_periodic(ExtensionParam(lam)));
    CHECK(std::abs(q(3, 0) - std::polar(1.0, -lam)) < 1e-15);
    CHECK(std::abs(q(0, 3) + std::polar(1.0, lam)) < 1e-15);
    // i D is Hermitian.
    const Eigen::MatrixXcd h = I * q;
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("f = 1: T and both K forms reduce to i hbar D") {
    const GupTheory flat = theory_of("1", 5.0, 0.7);
    const Grid x = build_grid(flat, 64, GridVariable::x_momentum);
    const auto bc = BoundaryCondition::dirichlet();
    const Eigen::MatrixXcd ref = cplx(0.0, 0.7) * central_difference(64, x.spacing, bc);
    CHECK((build_T(flat, x, bc).q_matrix - ref).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((build_K(flat, x, bc, KForm::similarity).q_matrix - ref).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((build_K(flat, x, bc, KForm::symmetrized).q_matrix - ref).cwiseAbs().maxCoeff() < 1e-15);
    const RepTriple poly = build_polymer(flat, build_grid(flat, 64, GridVariable::z_polymer), bc);
    CHECK((poly.momentum - poly.grid.nodes).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("every built q and p is Hermitian in its weighted inner product") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const GupTheory mixed = theory_of("1+exp(p)", 10.0);
    for (const GupTheory* th : {&ho, &mixed}) {
        const Grid x = build_grid(*th, 120, GridVariable::x_momentum);
        const Grid z = build_grid(*th, 120, GridVariable::z_polymer);
        for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::quasi_periodic(ExtensionParam(1.3))}) {
            const RepTriple reps[] = {build_T(*th, x, bc), build_K(*th, x, bc, KForm::symmetrized),
                                      build_K(*th, x, bc, KForm::similarity), build_polymer(*th, z, bc)};
            for (const RepTriple& r : reps) {
                CHECK(hermiticity_residual(r.q_matrix, r.grid.weights) < 1e-12);
                CHECK(hermiticity_residual(r.p_matrix, r.grid.weights) < 1e-12);
                CHECK(hermiticity_residual(r.q_squared, r.grid.weights) < 1e-12);
            }
        }
    }
}

TEST_CASE("K grid weights are unweighted, T grid weights are dx/f") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const Grid x = build_grid(ho, 64, GridVariable::x_momentum);
    const RepTriple k = build_K(ho, x, BoundaryCondition::dirichlet(), KForm::similarity);
    CHECK((k.grid.weights.array() - x.spacing).abs().maxCoeff() < 1e-15);
    CHECK(k.grid.variable == GridVariable::y_momentum);
}

TEST_CASE("polymer momentum is g(z) = tan(sqrt(beta) z) / sqrt(beta)") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const Grid z = build_grid(ho, 200, GridVariable::z_polymer);
    const RepTriple r = build_polymer(ho, z, BoundaryCondition::dirichlet());
    const double sb = std::sqrt(0.1);
    for (int i = 0; i < 200; ++i) {
        const double want = std::tan(sb * z.nodes(i)) / sb;
        CHECK(std::fabs(r.momentum(i) - want) < 1e-8 * std::max(1.0, std::fabs(want)) * (1 + want * want * 0.1));
    }
}

TEST_CASE("unitary map: isometry, inverse, similarity") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const Grid x = build_grid(ho, 300, GridVariable::x_momentum);
    const DiagonalMap u = unitary_map(ho, x, MapDirection::T_to_K);
    const DiagonalMap ui = unitary_map(ho, x, MapDirection::K_to_T);
    const Eigen::VectorXd wk = Eigen::VectorXd::Constant(300, x.spacing);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXcd v(300);
        for (auto& c : v) c = cplx(g(rng), g(rng));
        const double nt = weighted_norm(v, x.weights);
        CHECK(std::fabs(weighted_norm(diag_of(u).cwiseProduct(v), wk) - nt) < 1e-12 * nt);
    }
    CHECK((u.diagonal().cwiseProduct(ui.diagonal()).array() - 1.0).abs().maxCoeff() < 1e-14);

    const auto bc = BoundaryCondition::dirichlet();
    const Eigen::MatrixXcd mapped = diag_of(u).asDiagonal() * build_T(ho, x, bc).q_matrix * diag_of(ui).asDiagonal();
    const Eigen::MatrixXcd ksim = build_K(ho, x, bc, KForm::similarity).q_matrix;
    CHECK((mapped - ksim).cwiseAbs().maxCoeff() < 1e-14 * ksim.cwiseAbs().maxCoeff());
}

TEST_CASE("symmetrized K form converges to the similarity form at second order") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const double r1 = sym_gap(ho, 200) / sym_gap(ho, 400);
    const double r2 = sym_gap(ho, 400) / sym_gap(ho, 800);
    CHECK(r1 >= 3.2);
    CHECK(r1 <= 4.8);
    CHECK(r2 >= 3.2);
    CHECK(r2 <= 4.8);
    CHECK(sym_gap(theory_of("1"), 200) == 0.0);
}

TEST_CASE("similarity transform preserves the spectrum of q") {
    const GupTheory ho = theory_of("1+0.1*p^2", 8.0);
    const Grid x = build_grid(ho, 90, GridVariable::x_momentum);
    const auto bc = BoundaryCondition::dirichlet();
    const RepTriple t = build_T(ho, x, bc);
    const RepTriple k = build_K(ho, x, bc, KForm::similarity);
    const SpectrumResult st = eig_sym(t.q_matrix, t.grid.weights);
    const SpectrumResult sk = eig_sym(k.q_matrix, k.grid.weights);
    CHECK((st.eigenvalues - sk.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("commutator residual converges at second order in every representation") {
    const GupTheory ho = theory_of("1+0.1*p^2");
    const GupTheory flat = theory_of("1");
    for (RepKind kind : {RepKind::T, RepKind::K, RepKind::polymer}) {
        CAPTURE(to_string(kind));
        for (const GupTheory* th : {&flat, &ho}) {
            const double ratio = commutator_at(*th, kind, 400) / commutator_at(*th, kind, 800);
            CHECK(ratio >= 3.2);
            CHECK(ratio <= 4.8);
        }
    }
}

TEST_CASE("constant f = c scales the f = 1 residual by c") {
    const double r1 = commutator_at(theory_of("1"), RepKind::T, 400);
    const double rc = commutator_at(theory_of("2.5"), RepKind::T, 400);
    CHECK(rc == doctest::Approx(2.5 * r1).epsilon(1e-10));
}

TEST_CASE("boundary-touching vectors are flagged") {
    const GupTheory flat = theory_of("1", 5.0);
    const Grid x = build_grid(flat, 100, GridVariable::x_momentum);
    const RepTriple t = build_T(flat, x, BoundaryCondition::dirichlet());
    const CommutatorResult interior = commutator_residual(t, flat, bump_vector(x.nodes, 0.0, 2.0));
    CHECK_FALSE(interior.touches_boundary);
    const CommutatorResult edge = commutator_residual(t, flat, bump_vector(x.nodes, 5.0, 2.0));
    CHECK(edge.touches_boundary);
    CHECK(edge.residual > 10 * interior.residual);
    CHECK_THROWS_AS((void)commutator_residual(t, flat, Eigen::VectorXcd::Zero(100)), PreconditionError);
}

TEST_CASE("matrix CSV export") {
    Eigen::MatrixXcd m(2, 2);
    m << cplx(1, 0), cplx(0, -0.5), cplx(0, 0.5), cplx(2, 0);
    std::ostringstream os;
    write_matrix_csv(os, m);
    CHECK(os.str() == "1,0,0,-0.5\n0,0.5,2,0\n");
}
