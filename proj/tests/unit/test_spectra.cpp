#include <doctest.h>

#include <cmath>

#include "gupeq/quadrature.hpp"
#include "gupeq/spectra.hpp"
#include "support.hpp"

using namespace gupeq;
using gupeq::testing::theory_of;

namespace {

const double kBeta = 0.1;
const double kSqrtBeta = std::sqrt(kBeta);

// Closed form of (1/2) int_0^x (2E - t^2) / (1 + beta t^2) dt for m = g = hbar = 1.
double phase_oracle(double energy, double x) {
    const double at = std::atan(kSqrtBeta * x);
    return 0.5 * (2 * energy * at / kSqrtBeta - (x / kBeta - at / (kBeta * kSqrtBeta)));
}

SpectrumResult solve(const GupTheory& th, RepKind rep, int n, KForm form = KForm::similarity) {
    HONumericOptions o;
    o.rep = rep;
    o.N = n;
    o.k_form = form;
    HOExactParams p;
    return ho_numeric(th, p, o);
}

}  // namespace

TEST_CASE("oscillator spectrum at beta = 0.1 in all representations") {
    const GupTheory th = theory_of("1+0.1*p^2");
    const HOExactParams p;
    for (RepKind rep : {RepKind::T, RepKind::K, RepKind::polymer}) {
        CAPTURE(to_string(rep));
        const SpectrumResult s = solve(th, rep, 1200);
        CHECK(s.max_residual() < 1e-8);
        CHECK(s.N == 1200);
        // Refined pairs sit at the top of the spectrum; they must stay orthonormal.
        const Eigen::MatrixXcd top = s.eigenvectors.rightCols(400);
        const Eigen::MatrixXcd gram = top.adjoint() * s.weights.cast<cplx>().asDiagonal() * top;
        CHECK((gram - Eigen::MatrixXcd::Identity(400, 400)).cwiseAbs().maxCoeff() < 1e-9);
        for (int n = 0; n <= 5; ++n) {
            const double e = ho_spectrum_exact(p, n);
            CHECK(std::fabs(s.eigenvalues(n) - e) / e < 1e-3);
        }
    }
}

TEST_CASE("undeformed limits") {
    const SpectrumResult flat = solve(theory_of("1", 12.0), RepKind::T, 800);
    for (int n = 0; n <= 5; ++n) CHECK(std::fabs(flat.eigenvalues(n) - (n + 0.5)) / (n + 0.5) < 1e-3);
    const SpectrumResult tiny = solve(theory_of("1+1e-6*p^2"), RepKind::T, 1200);
    for (int n = 0; n <= 5; ++n) CHECK(std::fabs(tiny.eigenvalues(n) - (n + 0.5)) / (n + 0.5) < 1e-3);
}

TEST_CASE("T and K spectra: identical for the similarity form, second order for the symmetrized form") {
    const GupTheory th = theory_of("1+0.1*p^2");
    for (int n : {300, 600}) {
        const SpectrumResult t = solve(th, RepKind::T, n);
        const SpectrumResult k = solve(th, RepKind::K, n);
        CHECK((t.eigenvalues.head(20) - k.eigenvalues.head(20)).cwiseAbs().maxCoeff() < 1e-10);
    }
    auto sym_gap = [&](int n) {
        const SpectrumResult t = solve(th, RepKind::T, n);
        const SpectrumResult k = solve(th, RepKind::K, n, KForm::symmetrized);
        return (t.eigenvalues.head(6) - k.eigenvalues.head(6)).cwiseAbs().maxCoeff();
    };
    const double ratio = sym_gap(300) / sym_gap(600);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("numerical eigenvectors overlap the exact eigenfunctions") {
    const GupTheory th = theory_of("1+0.1*p^2");
    const HOExactParams p;
    for (RepKind rep : {RepKind::T, RepKind::K}) {
        HONumericOptions o;
        o.rep = rep;
        const RepTriple triple = ho_triple(th, o);
        const SpectrumResult s = ho_numeric(th, p, o);
        for (int n = 0; n <= 3; ++n) {
            const Eigen::VectorXcd exact = HOEigenfunction(p, n).sample(triple.grid.nodes, rep);
            const double overlap = std::abs(weighted_inner(exact, s.eigenvectors.col(n), s.weights)) /
                                   (weighted_norm(exact, s.weights) * weighted_norm(s.eigenvectors.col(n), s.weights));
            CHECK(overlap >= 0.999);
        }
    }
}

TEST_CASE("literal q*q decouples the sublattices, the compact stencil does not") {
    const GupTheory th = theory_of("1", 12.0);
    HONumericOptions o;
    o.N = 400;
    const SpectrumResult compact = ho_numeric(th, HOExactParams{}, o);
    o.q_square = QSquare::product;
    const SpectrumResult product = ho_numeric(th, HOExactParams{}, o);
    CHECK(compact.eigenvalues(1) - compact.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(product.eigenvalues(1) - product.eigenvalues(0) < 1e-2);
}

TEST_CASE("Hamiltonian assembly") {
    const GupTheory th = theory_of("1+0.1*p^2");
    const Grid x = build_grid(th, 64, GridVariable::x_momentum);
    const RepTriple t = build_T(th, x, BoundaryCondition::dirichlet());
    const Eigen::MatrixXcd fall = assemble_hamiltonian(t, HamiltonianSpec::linear_fall(2.0, 9.8));
    CHECK(weighted_hermiticity_defect(fall, x.weights) < 1e-14);
    CHECK((fall - (t.momentum.array().square() / 4.0).matrix().cast<cplx>().asDiagonal().toDenseMatrix() -
           19.6 * t.q_matrix).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXcd free = assemble_hamiltonian(t, HamiltonianSpec::free(1.0));
    CHECK(free.isDiagonal());
    CHECK_THROWS_AS((void)assemble_hamiltonian(t, HamiltonianSpec::harmonic(0.0, 1.0)), ValidationError);
    CHECK_THROWS_AS((void)assemble_hamiltonian(t, HamiltonianSpec::harmonic(1.0, -1.0)), ValidationError);
}

TEST_CASE("free-fall phase") {
    const GupTheory flat = theory_of("1");
    FreefallParams p;
    CHECK(freefall_phase(flat, p, 1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(freefall_phase(flat, p, 0.0) == 0.0);
    const GupTheory th = theory_of("1+0.1*p^2");
    CHECK(freefall_phase(th, p, 0.0) == 0.0);
    CHECK(std::fabs(freefall_phase(th, p, 2.0) - phase_oracle(1.0, 2.0)) < 1e-8);
    const Grid x = build_grid(th, 101, GridVariable::x_momentum);
    const Eigen::VectorXd phi = freefall_phase_on_nodes(th, p, x.nodes);
    for (int i = 0; i < 101; i += 7) CHECK(std::fabs(phi(i) - phase_oracle(1.0, x.nodes(i))) < 1e-8);
    FreefallParams bad;
    bad.g_accel = 0.0;
    CHECK_THROWS_AS((void)freefall_phase(th, bad, 1.0), ValidationError);
}

TEST_CASE("free-fall generalized states") {
    const GupTheory th = theory_of("1+0.1*p^2", 5.0);
    const FreefallParams p;
    const Grid x = build_grid(th, 400, GridVariable::x_momentum);
    const GeneralizedState psi = freefall_state(th, p, RepKind::T, x);
    const GeneralizedState phi = freefall_state(th, p, RepKind::K, x);
    CHECK_FALSE(psi.normalizable);
    CHECK((psi.values.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    const Eigen::VectorXcd mapped = unitary_map(th, x, MapDirection::T_to_K).diagonal().cast<cplx>().cwiseProduct(psi.values);
    CHECK((mapped - phi.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS((void)freefall_state(th, p, RepKind::polymer, x), PreconditionError);
}

TEST_CASE("free-fall ODE residual converges at second order") {
    const GupTheory th = theory_of("1+0.1*p^2", 5.0);
    for (double energy : {0.5, 1.0, 3.0}) {
        FreefallParams p;
        p.energy = energy;
        const double coarse = freefall_ode_residual(th, p, build_grid(th, 400, GridVariable::x_momentum)).rms;
        const double fine = freefall_ode_residual(th, p, build_grid(th, 800, GridVariable::x_momentum)).rms;
        CHECK(coarse / fine >= 3.2);
        CHECK(coarse / fine <= 4.8);
    }
}

TEST_CASE("pullback of the free-fall functional") {
    const GupTheory th = theory_of("1+0.1*p^2", 5.0);
    const FreefallParams p;
    const Grid x = build_grid(th, 801, GridVariable::x_momentum);
    BumpSpec bump;
    bump.sigma = 0.5;
    const PullbackResult r = pullback_check(th, p, bump, x);
    CHECK(r.abs_diff < 1e-12);

    BumpSpec scaled = bump;
    scaled.scale = -2.75;
    const PullbackResult rs = pullback_check(th, p, scaled, x);
    CHECK(std::abs(rs.F + 2.75 * r.F) < 1e-12);

    BumpSpec shaped;
    shaped.center = 0.8;
    shaped.sigma = 0.4;
    shaped.poly = {1.0, -0.5, 0.25};
    CHECK(pullback_check(th, p, shaped, x).abs_diff < 1e-12);

    // Continuum oracle with the closed-form phase.
    SimpsonOptions o;
    o.abs_tol = 1e-13;
    const auto re = adaptive_simpson([&](double t) { return std::cos(phase_oracle(1.0, t)) * bump(t) / (1 + kBeta * t * t); }, -4.0, 4.0, o);
    const auto im = adaptive_simpson([&](double t) { return -std::sin(phase_oracle(1.0, t)) * bump(t) / (1 + kBeta * t * t); }, -4.0, 4.0, o);
    CHECK(std::abs(r.F - cplx(re.value, im.value)) < 1e-6);

    BumpSpec wide;
    wide.sigma = 1.0;
    CHECK_THROWS_AS((void)pullback_check(th, p, wide, x), PreconditionError);
}
