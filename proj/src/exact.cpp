#include "gupeq/exact.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gupeq/errors.hpp"
#include "gupeq/quadrature.hpp"

namespace gupeq {

namespace {

double positive_field(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string("oscillator parameter ") + name + " must be positive and finite");
    }
    return v;
}

void check_level(int n) {
    if (n < 0) {
        throw PreconditionError("oscillator level n must be >= 0, got " + std::to_string(n));
    }
}

// beta m hbar omega, the only combination the spectrum depends on besides hbar omega.
double coupling(const HOExactParams& p) { return p.beta * p.m * p.hbar * p.omega; }

double rel_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

void HOExactParams::validate() const {
    positive_field(beta, "beta");
    positive_field(m, "m");
    positive_field(omega, "omega");
    positive_field(hbar, "hbar");
}

HOSpectrumForms ho_spectrum_forms(const HOExactParams& params, int n) {
    params.validate();
    check_level(n);
    const double hw = params.hbar * params.omega;
    const double k = coupling(params);
    const double nh = n + 0.5;

    const double r = 1.0 / (4.0 * k * k);
    const double inv4sr = 1.0 / (4.0 * std::sqrt(r));

    HOSpectrumForms out;
    out.t_form = hw * nh * (inv4sr + std::sqrt(1.0 + 1.0 / (16.0 * r))) + hw * inv4sr * n * n;
    out.k_form = hw * nh * (0.5 * k + 0.5 * std::sqrt(4.0 + k * k)) + 0.5 * hw * k * n * n;
    out.rel_diff = std::fabs(out.t_form - out.k_form) / std::fabs(out.k_form);
    return out;
}

double ho_spectrum_exact(const HOExactParams& params, int n) {
    const HOSpectrumForms f = ho_spectrum_forms(params, n);
    if (!(f.rel_diff <= kSpectrumFormTolerance)) {
        throw NumericalError("closed-form spectra disagree at n = " + std::to_string(n) +
                             ": relative gap " + format_number(f.rel_diff));
    }
    return f.k_form;
}

HOIndexSet ho_indices(const HOExactParams& params, int n) {
    HOIndexSet s;
    s.n = n;
    s.energy = ho_spectrum_exact(params, n);
    const double k = coupling(params);
    const double root = std::sqrt(4.0 + k * k) / k;

    s.nu = 0.5 * (-1.0 + root);
    s.mu_n = n + 1.0 + s.nu;
    s.mu_from_energy = std::sqrt(1.0 + 2.0 * params.beta * s.energy * params.m) /
                       (params.hbar * params.omega * params.m * params.beta);
    s.quantization_residual = std::fabs(1.0 + s.nu - s.mu_from_energy + n);

    s.r = 1.0 / (4.0 * k * k);
    s.s_n = s.energy / (2.0 * params.m * params.hbar * params.hbar * params.omega * params.omega * params.beta);
    s.sqrt_sr_n = 0.5 * (n + 0.5) + 0.25 * root;
    s.sqrt_s_plus_r = std::sqrt(s.s_n + s.r);
    s.a_n = -n - root;
    s.c_n = 1.0 - 2.0 * s.sqrt_sr_n;

    s.gap_mu_minus_nu = rel_gap(s.mu_n - s.nu, s.a_n);
    s.gap_neg_mu_minus_nu = rel_gap(-s.mu_n - s.nu, s.a_n);
    s.gap_one_minus_mu = rel_gap(1.0 - s.mu_n, s.c_n);
    s.gap_half_mu = rel_gap(0.5 * s.mu_n, s.sqrt_sr_n);

    if (!(rel_gap(s.mu_from_energy, s.mu_n) <= kIndexTolerance)) {
        throw NumericalError("degree mu from E_n disagrees with the quantization condition at n = " +
                             std::to_string(n));
    }
    return s;
}

std::complex<double> hyp2f1_terminating(double a, int n, double c, std::complex<double> z) {
    check_level(n);
    for (int k = 0; k < n; ++k) {
        if (c + k == 0.0) {
            throw PreconditionError("hyp2f1_terminating: c = " + format_number(c) +
                                    " hits a zero Pochhammer denominator");
        }
    }
    std::complex<double> term{1.0, 0.0};
    std::complex<double> sum = term;
    for (int k = 0; k < n; ++k) {
        term *= (a + k) * (-n + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    return sum;
}

HOEigenfunction::HOEigenfunction(const HOExactParams& params, int n)
    : params_(params), idx_(ho_indices(params, n)) {
    const double beta = params_.beta;
    const double sb = std::sqrt(beta);

    // With x = tan(t) / sqrt(beta): dx / f = dt / sqrt(beta) and 1 + beta x^2 = 1 / cos^2 t.
    auto density = [&](double t) {
        const double c = std::cos(t);
        const double pre = std::pow(c, 2.0 * idx_.sqrt_sr_n);
        const std::complex<double> z{0.5, 0.5 * std::tan(t)};
        return std::norm(pre * hyp2f1_terminating(idx_.a_n, n, idx_.c_n, z)) / sb;
    };
    SimpsonOptions opt;
    opt.abs_tol = 1e-14;
    const double half_pi = 0.5 * std::numbers::pi;
    const double mass = adaptive_simpson(density, -half_pi, half_pi, opt).value;
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw NumericalError("oscillator eigenfunction normalisation failed at n = " + std::to_string(n));
    }
    norm_ = 1.0 / std::sqrt(mass);

    // psi has parity (-1)^n: even levels fix the phase by psi(0), odd ones by psi'(0).
    std::complex<double> lead;
    if (n % 2 == 0) {
        lead = hyp2f1_terminating(idx_.a_n, n, idx_.c_n, 0.5);
    } else {
        const double scale = idx_.a_n * (-n) / idx_.c_n;
        const std::complex<double> dz{0.0, 0.5 * sb};
        lead = dz * scale * hyp2f1_terminating(idx_.a_n + 1.0, n - 1, idx_.c_n + 1.0, 0.5);
    }
    if (std::abs(lead) == 0.0) {
        throw NumericalError("oscillator eigenfunction has a vanishing leading coefficient at n = " +
                             std::to_string(n));
    }
    phase_ = std::conj(lead) / std::abs(lead);
}

std::complex<double> HOEigenfunction::unnormalized(double x) const {
    const double beta = params_.beta;
    const double pre = std::pow(1.0 + beta * x * x, -idx_.sqrt_sr_n);
    const std::complex<double> z{0.5, 0.5 * std::sqrt(beta) * x};
    return pre * hyp2f1_terminating(idx_.a_n, idx_.n, idx_.c_n, z);
}

std::complex<double> HOEigenfunction::operator()(double x, RepKind kind) const {
    std::complex<double> v = norm_ * phase_ * unnormalized(x);
    if (kind == RepKind::K) {
        v /= std::sqrt(1.0 + params_.beta * x * x);
    } else if (kind != RepKind::T) {
        throw PreconditionError("closed-form eigenfunctions exist for the T and K representations only");
    }
    return v;
}

Eigen::VectorXcd HOEigenfunction::sample(const Eigen::VectorXd& nodes, RepKind kind) const {
    Eigen::VectorXcd v(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) v(i) = (*this)(nodes(i), kind);
    return v;
}

std::complex<double> ho_eigenfunction_exact(const HOExactParams& params, int n, double x, RepKind kind) {
    return HOEigenfunction(params, n)(x, kind);
}

}  // namespace gupeq
