#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "gupeq/errors.hpp"
#include "gupeq/spectra.hpp"

namespace gupeq {

namespace {

// Sort values ascending (stable) and permute the columns alongside.
template <typename Mat>
void sort_pairs(Eigen::VectorXd& values, Mat& vectors) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    Eigen::VectorXd v2(values.size());
    Mat m2(vectors.rows(), vectors.cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
        v2(static_cast<Eigen::Index>(k)) = values(order[k]);
        m2.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
    }
    values = std::move(v2);
    vectors = std::move(m2);
}

bool is_tridiagonal(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(i - j) > 1 && a(i, j) != 0.0) return false;
        }
    }
    return true;
}

SymmetricEigen from_eigen(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
    if (es.info() != Eigen::Success) {
        throw NumericalError("tridiagonal QL iteration did not converge");
    }
    SymmetricEigen out;
    out.method = "tridiagonal_ql";
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

Eigen::VectorXd tridiagonal_apply(const Eigen::VectorXd& d, const Eigen::VectorXd& e, const Eigen::VectorXd& v) {
    const auto n = d.size();
    Eigen::VectorXd out = d.cwiseProduct(v);
    out.head(n - 1) += e.cwiseProduct(v.tail(n - 1));
    out.tail(n - 1) += e.cwiseProduct(v.head(n - 1));
    return out;
}

// Solves (T - shift) y = rhs by Gaussian elimination with partial pivoting;
// tiny pivots are replaced by `floor` as in inverse iteration.
Eigen::VectorXd tridiagonal_shifted_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double shift,
                                          const Eigen::VectorXd& rhs, double floor) {
    const auto n = d.size();
    // Row i of U holds u0 (diagonal), u1, u2 (two superdiagonals).
    Eigen::VectorXd u0(n), u1 = Eigen::VectorXd::Zero(n), u2 = Eigen::VectorXd::Zero(n), b = rhs;
    double cur0 = d(0) - shift;
    double cur1 = n > 1 ? e(0) : 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double low = e(i);
        const double next0 = d(i + 1) - shift;
        const double next1 = i + 2 < n ? e(i + 1) : 0.0;
        if (std::fabs(low) > std::fabs(cur0)) {
            // Swap rows i and i + 1.
            u0(i) = low;
            u1(i) = next0;
            u2(i) = next1;
            std::swap(b(i), b(i + 1));
            const double m = cur0 / low;
            cur0 = cur1 - m * next0;
            cur1 = -m * next1;
            b(i + 1) -= m * b(i);
        } else {
            if (std::fabs(cur0) < floor) cur0 = cur0 < 0.0 ? -floor : floor;
            u0(i) = cur0;
            u1(i) = cur1;
            u2(i) = 0.0;
            const double m = low / cur0;
            cur0 = next0 - m * cur1;
            cur1 = next1;
            b(i + 1) -= m * b(i);
        }
    }
    if (std::fabs(cur0) < floor) cur0 = cur0 < 0.0 ? -floor : floor;
    u0(n - 1) = cur0;
    Eigen::VectorXd y(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double acc = b(i);
        if (i + 1 < n) acc -= u1(i) * y(i + 1);
        if (i + 2 < n) acc -= u2(i) * y(i + 2);
        y(i) = acc / u0(i);
    }
    return y;
}

// One inverse-iteration step per pair. A refined vector is kept only when it
// lowers the residual and stays within 1e-6 of the QL vector, so clustered
// pairs keep their mutual orthogonality.
void refine_tridiagonal_pairs(const Eigen::VectorXd& d, const Eigen::VectorXd& e, SymmetricEigen& se) {
    const auto n = d.size();
    const double scale = d.cwiseAbs().maxCoeff() + 2.0 * e.cwiseAbs().maxCoeff();
    const double eps = std::numeric_limits<double>::epsilon();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::VectorXd v = se.vectors.col(j);
        const double lambda = se.values(j);
        const double before = (tridiagonal_apply(d, e, v) - lambda * v).norm();
        if (before <= 4.0 * eps * scale) continue;
        Eigen::VectorXd y = tridiagonal_shifted_solve(d, e, lambda, v, eps * scale);
        const double ny = y.norm();
        if (!(ny > 0.0) || !std::isfinite(ny)) continue;
        y /= ny;
        if (y.dot(v) < 0.0) y = -y;
        if ((y - v).norm() > 1e-6) continue;
        const Eigen::VectorXd ty = tridiagonal_apply(d, e, y);
        const double rq = y.dot(ty);
        if ((ty - rq * y).norm() < before) {
            se.vectors.col(j) = y;
            se.values(j) = rq;
        }
    }
}

SymmetricEigen tridiagonal_ql(const Eigen::MatrixXd& a) {
    const auto n = a.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (n > 1 && is_tridiagonal(a)) {
        const Eigen::VectorXd diag = a.diagonal();
        const Eigen::VectorXd sub = a.diagonal(-1);
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        SymmetricEigen se = from_eigen(es);
        refine_tridiagonal_pairs(diag, sub, se);
        sort_pairs(se.values, se.vectors);
        return se;
    }
    es.compute(a, Eigen::ComputeEigenvectors);
    return from_eigen(es);
}

void fix_phase(Eigen::VectorXcd& v) {
    const double vmax = v.cwiseAbs().maxCoeff();
    if (vmax == 0.0) return;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > 1e-8 * vmax) {
            v *= std::conj(v(i)) / a;
            v(i) = a;
            return;
        }
    }
}

// Eigenpairs of complex Hermitian S through E = [[A, -B], [B, A]]. Every
// eigenvalue of S appears twice in E, with (x; y) and (-y; x) both mapping to
// multiples of x + i y. Each cluster of 2m equal values yields m vectors.
void solve_embedded(const Eigen::MatrixXcd& s, EigenMethod method, int jacobi_max_n, Eigen::VectorXd& values,
                    Eigen::MatrixXcd& vectors, std::string& used) {
    const auto n = s.rows();
    const Eigen::MatrixXd a = s.real();
    const Eigen::MatrixXd b = s.imag();
    Eigen::MatrixXd e(2 * n, 2 * n);
    e << a, -b, b, a;
    const SymmetricEigen big = symmetric_eigen(e, method, 2 * jacobi_max_n);
    used = "embedding+" + big.method;

    const double scale = std::max(1.0, big.values.cwiseAbs().maxCoeff());
    const double cluster_tol = 1e-9 * scale;

    values.resize(n);
    vectors.resize(n, n);
    Eigen::Index filled = 0;
    Eigen::Index start = 0;
    while (start < 2 * n) {
        Eigen::Index end = start + 1;
        while (end < 2 * n && big.values(end) - big.values(end - 1) <= cluster_tol) ++end;
        const Eigen::Index size = end - start;
        if (size % 2 != 0) {
            throw NumericalError("embedding pair mismatch: cluster of " + std::to_string(size) +
                                 " eigenvalues near " + format_number(big.values(start)));
        }
        const Eigen::Index m = size / 2;

        Eigen::MatrixXcd cand(n, size);
        for (Eigen::Index j = 0; j < size; ++j) {
            const auto col = big.vectors.col(start + j);
            cand.col(j) = col.head(n).cast<cplx>() + cplx(0.0, 1.0) * col.tail(n).cast<cplx>();
        }
        // Pivoted Gram-Schmidt: m orthonormal vectors spanning the candidates.
        Eigen::MatrixXcd q(n, m);
        for (Eigen::Index k = 0; k < m; ++k) {
            Eigen::Index best = 0;
            double best_norm = -1.0;
            for (Eigen::Index j = 0; j < size; ++j) {
                const double nj = cand.col(j).norm();
                if (nj > best_norm) {
                    best_norm = nj;
                    best = j;
                }
            }
            if (best_norm < 1e-6) {
                throw NumericalError("embedding pair mismatch: rank-deficient cluster near " +
                                     format_number(big.values(start)));
            }
            q.col(k) = cand.col(best) / best_norm;
            for (Eigen::Index j = 0; j < size; ++j) {
                cand.col(j) -= q.col(k) * q.col(k).dot(cand.col(j));
            }
        }
        // Rayleigh-Ritz inside the cluster.
        const Eigen::MatrixXcd h = q.adjoint() * s * q;
        if (m == 1) {
            values(filled) = h(0, 0).real();
            vectors.col(filled) = q.col(0);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(h);
            values.segment(filled, m) = small.eigenvalues();
            vectors.middleCols(filled, m) = q * small.eigenvectors();
        }
        filled += m;
        start = end;
    }
}

}  // namespace

const char* to_string(EigenMethod m) {
    switch (m) {
        case EigenMethod::automatic: return "automatic";
        case EigenMethod::jacobi: return "jacobi";
        case EigenMethod::tridiagonal_ql: return "tridiagonal_ql";
    }
    return "?";
}

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, int max_sweeps) {
    const auto n = input.rows();
    if (input.cols() != n) {
        throw PreconditionError("jacobi_eigen: matrix is not square");
    }
    Eigen::MatrixXd a = 0.5 * (input + input.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    SymmetricEigen out;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double negligible = eps * eps * a.norm();

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) off += std::fabs(a(p, q));
        }
        if (off == 0.0) {
            out.sweeps = sweep - 1;
            out.method = "jacobi";
            out.values = a.diagonal();
            out.vectors = std::move(v);
            sort_pairs(out.values, out.vectors);
            return out;
        }
        // Early sweeps skip small elements; later ones zero the negligible.
        const double thresh = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double g = 100.0 * std::fabs(apq);
                if (sweep > 4 && ((std::fabs(a(p, p)) + g == std::fabs(a(p, p)) &&
                                   std::fabs(a(q, q)) + g == std::fabs(a(q, q))) ||
                                  std::fabs(apq) <= negligible)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                if (std::fabs(apq) <= thresh || apq == 0.0) continue;

                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const Eigen::VectorXd cp = a.col(p);
                const Eigen::VectorXd cq = a.col(q);
                a.col(p) = c * cp - s * cq;
                a.col(q) = s * cp + c * cq;
                const Eigen::RowVectorXd rp = a.row(p);
                const Eigen::RowVectorXd rq = a.row(q);
                a.row(p) = c * rp - s * rq;
                a.row(q) = s * rp + c * rq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                const Eigen::VectorXd vp = v.col(p);
                const Eigen::VectorXd vq = v.col(q);
                v.col(p) = c * vp - s * vq;
                v.col(q) = s * vp + c * vq;
            }
        }
    }
    throw NumericalError("Jacobi iteration did not converge in " + std::to_string(max_sweeps) + " sweeps");
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a, EigenMethod method, int jacobi_max_n) {
    switch (method) {
        case EigenMethod::jacobi: return jacobi_eigen(a);
        case EigenMethod::tridiagonal_ql: return tridiagonal_ql(a);
        case EigenMethod::automatic: break;
    }
    if (a.rows() > 1 && is_tridiagonal(a)) return tridiagonal_ql(a);
    if (a.rows() <= jacobi_max_n) return jacobi_eigen(a);
    return tridiagonal_ql(a);
}

double SpectrumResult::max_residual() const { return residuals.size() == 0 ? 0.0 : residuals.maxCoeff(); }

double weighted_hermiticity_defect(const Eigen::MatrixXcd& m, const Eigen::VectorXd& w) {
    const Eigen::MatrixXcd wm = w.cast<cplx>().asDiagonal() * m;
    const double scale = wm.norm();
    if (scale == 0.0) return 0.0;
    return (wm - wm.adjoint()).norm() / scale;
}

SpectrumResult eig_sym(const Eigen::MatrixXcd& m, const Eigen::VectorXd& weights, const EigOptions& opt) {
    const auto n = m.rows();
    if (n == 0 || m.cols() != n || weights.size() != n) {
        throw PreconditionError("eig_sym: matrix and weights must be square and of equal size");
    }
    if (!(weights.minCoeff() > 0.0)) {
        throw PreconditionError("eig_sym: weights must be positive");
    }
    const double defect = weighted_hermiticity_defect(m, weights);
    if (!(defect <= opt.hermiticity_tol)) {
        throw NumericalError("eig_sym: matrix is not Hermitian in the weighted inner product (defect " +
                             format_number(defect) + ")");
    }

    const Eigen::VectorXd sw = weights.cwiseSqrt();
    const Eigen::VectorXd isw = sw.cwiseInverse();
    Eigen::MatrixXcd s = sw.cast<cplx>().asDiagonal() * m * isw.cast<cplx>().asDiagonal();
    s = (0.5 * (s + s.adjoint())).eval();

    SpectrumResult out;
    Eigen::MatrixXcd y;
    const bool real = s.imag().norm() <= 1e-14 * s.norm();
    if (real) {
        const Eigen::MatrixXd sr = s.real();
        const SymmetricEigen se = symmetric_eigen(sr, opt.method, opt.jacobi_max_n);
        out.eigenvalues = se.values;
        y = se.vectors.cast<cplx>();
        out.method = se.method;
    } else {
        const bool embed = opt.complex_path == ComplexPath::embedding ||
                           (opt.complex_path == ComplexPath::automatic && n <= opt.jacobi_max_n);
        if (embed) {
            solve_embedded(s, opt.method, opt.jacobi_max_n, out.eigenvalues, y, out.method);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s);
            if (es.info() != Eigen::Success) {
                throw NumericalError("complex Hermitian QL iteration did not converge");
            }
            out.eigenvalues = es.eigenvalues();
            y = es.eigenvectors();
            out.method = "complex_ql";
        }
    }

    // Residuals ||S y - E y|| equal the weighted residuals of M since v = W^{-1/2} y.
    Eigen::MatrixXcd sy;
    const Eigen::Index nnz = (s.array() != cplx(0.0, 0.0)).count();
    if (nnz < n * n / 8) {
        const Eigen::SparseMatrix<cplx> ss = s.sparseView();
        sy = ss * y;
    } else {
        sy = s * y;
    }
    out.residuals.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.residuals(j) = (sy.col(j) - out.eigenvalues(j) * y.col(j)).norm() / y.col(j).norm();
    }

    Eigen::MatrixXcd v = isw.cast<cplx>().asDiagonal() * y;
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXcd col = v.col(j);
        col /= weighted_norm(col, weights);
        fix_phase(col);
        v.col(j) = col;
    }
    Eigen::VectorXd vals = out.eigenvalues;
    // Carry residuals through the sort as an extra row.
    Eigen::MatrixXcd tagged(n + 1, n);
    tagged.topRows(n) = v;
    tagged.row(n) = out.residuals.transpose().cast<cplx>();
    sort_pairs(vals, tagged);
    out.eigenvalues = vals;
    out.eigenvectors = tagged.topRows(n);
    out.residuals = tagged.row(n).real().transpose();

    out.weights = weights;
    out.N = static_cast<int>(n);
    return out;
}

}  // namespace gupeq
