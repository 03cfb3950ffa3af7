#include <doctest.h>

#include <cmath>
#include <random>

#include "gupeq/spectra.hpp"

using namespace gupeq;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = g(rng);
        for (int j = 0; j < i; ++j) {
            a(i, j) = cplx(g(rng), g(rng));
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

double reconstruction_error(const Eigen::MatrixXd& a, const SymmetricEigen& e) {
    return (a - e.vectors * e.values.asDiagonal() * e.vectors.transpose()).norm() / a.norm();
}

}  // namespace

TEST_CASE("random 50x50 symmetric matrices are reconstructed by every method") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Eigen::MatrixXd a = random_symmetric(50, seed);
        const SymmetricEigen j = jacobi_eigen(a);
        const SymmetricEigen q = symmetric_eigen(a, EigenMethod::tridiagonal_ql);
        CHECK(reconstruction_error(a, j) < 1e-9);
        CHECK(reconstruction_error(a, q) < 1e-9);
        CHECK((j.vectors.transpose() * j.vectors - Eigen::MatrixXd::Identity(50, 50)).norm() < 1e-12);
        CHECK((j.values - q.values).cwiseAbs().maxCoeff() < 1e-11);
        for (int i = 1; i < 50; ++i) CHECK(j.values(i) >= j.values(i - 1));
        CHECK(j.sweeps > 0);
        CHECK(j.sweeps < 20);
    }
}

TEST_CASE("Jacobi handles degenerate and zero-diagonal input") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(0, 3) = a(3, 0) = 1.0;
    a(1, 2) = a(2, 1) = 1.0;
    const SymmetricEigen e = jacobi_eigen(a);
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));
    CHECK(e.values(2) == doctest::Approx(1.0));
    CHECK(e.values(3) == doctest::Approx(1.0));
    CHECK(reconstruction_error(a, e) < 1e-14);
    CHECK(jacobi_eigen(Eigen::MatrixXd::Identity(5, 5)).values.isApprox(Eigen::VectorXd::Ones(5)));
}

TEST_CASE("eig_sym examples") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const SpectrumResult r = eig_sym(d, Eigen::VectorXd::Ones(3));
    CHECK(r.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(r.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(r.eigenvalues(2) == doctest::Approx(3.0));

    Eigen::MatrixXcd pauli(2, 2);
    pauli << cplx(0, 0), cplx(0, 1), cplx(0, -1), cplx(0, 0);
    const SpectrumResult p = eig_sym(pauli, Eigen::VectorXd::Ones(2));
    CHECK(p.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(p.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(p.max_residual() < 1e-14);
    for (int k = 0; k < 2; ++k) CHECK(p.eigenvectors.col(k).norm() == doctest::Approx(1.0));
}

TEST_CASE("non-Hermitian input is rejected") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS((void)eig_sym(m, Eigen::VectorXd::Ones(2)), NumericalError);
    // Hermitian in the plain product but not in the weighted one.
    Eigen::MatrixXcd s(2, 2);
    s << 1.0, 1.0, 1.0, 1.0;
    Eigen::VectorXd w(2);
    w << 1.0, 2.0;
    CHECK(weighted_hermiticity_defect(s, w) > 0.1);
    CHECK_THROWS_AS((void)eig_sym(s, w), NumericalError);
}

TEST_CASE("embedding and direct complex paths agree") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Eigen::MatrixXcd h = random_hermitian(40, seed);
        EigOptions emb;
        emb.complex_path = ComplexPath::embedding;
        EigOptions dir;
        dir.complex_path = ComplexPath::direct;
        const SpectrumResult a = eig_sym(h, Eigen::VectorXd::Ones(40), emb);
        const SpectrumResult b = eig_sym(h, Eigen::VectorXd::Ones(40), dir);
        CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() < 1e-11);
        CHECK(a.max_residual() < 1e-10);
        CHECK(b.max_residual() < 1e-10);
        // Same gauge: first significant component real positive.
        for (int k = 0; k < 40; ++k) CHECK((a.eigenvectors.col(k) - b.eigenvectors.col(k)).norm() < 1e-8);
    }
}

TEST_CASE("weighted problems return weight-normalised eigenvectors") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const int n = 30;
    Eigen::VectorXd w(n);
    for (auto& x : w) x = u(rng);
    // M = W^{-1} H is Hermitian in <.,.>_w for Hermitian H.
    const Eigen::MatrixXcd h = random_hermitian(n, 21);
    const Eigen::MatrixXcd m = w.cwiseInverse().cast<cplx>().asDiagonal() * h;
    const SpectrumResult r = eig_sym(m, w);
    CHECK(r.max_residual() < 1e-10);
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXcd v = r.eigenvectors.col(k);
        CHECK(std::sqrt((w.cast<cplx>().asDiagonal() * v).dot(v).real()) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("embedding handles exact degeneracies") {
    // i D with periodic wrap has every nonzero eigenvalue doubly degenerate.
    const int n = 32;
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, (i + 1) % n) = cplx(0, 0.5);
        d((i + 1) % n, i) = cplx(0, -0.5);
    }
    EigOptions emb;
    emb.complex_path = ComplexPath::embedding;
    const SpectrumResult r = eig_sym(d, Eigen::VectorXd::Ones(n), emb);
    CHECK(r.max_residual() < 1e-12);
    const Eigen::MatrixXcd gram = r.eigenvectors.adjoint() * r.eigenvectors;
    CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("large tridiagonal input takes the QL path") {
    const int n = 500;
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        t(i, i) = 2.0;
        if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = -1.0;
    }
    const SpectrumResult r = eig_sym(t, Eigen::VectorXd::Ones(n));
    for (int k = 0; k < 5; ++k) {
        const double exact = 2.0 - 2.0 * std::cos((k + 1) * M_PI / (n + 1));
        CHECK(r.eigenvalues(k) == doctest::Approx(exact).epsilon(1e-9));
    }
    CHECK(r.method.find("tridiagonal") != std::string::npos);
}
