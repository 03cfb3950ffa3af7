#pragma once

// Closed-form harmonic oscillator for f(p) = 1 + beta p^2.

#include <complex>

#include "gupeq/reps.hpp"

namespace gupeq {

struct HOExactParams {
    double beta = 0.1;
    double m = 1.0;
    double omega = 1.0;
    double hbar = 1.0;

    /// Throws ValidationError unless every field is positive and finite.
    void validate() const;
};

/// Both printed spectrum forms for level n and their relative gap.
struct HOSpectrumForms {
    double t_form = 0.0;  ///< written with r = 1 / (4 beta^2 m^2 hbar^2 omega^2)
    double k_form = 0.0;  ///< quantization 1 + nu - mu = -n solved for E
    double rel_diff = 0.0;
};

inline constexpr double kSpectrumFormTolerance = 1e-12;

[[nodiscard]] HOSpectrumForms ho_spectrum_forms(const HOExactParams& params, int n);

/// K-form E_n after checking it against the T-form; NumericalError if the
/// two disagree beyond kSpectrumFormTolerance.
[[nodiscard]] double ho_spectrum_exact(const HOExactParams& params, int n);

struct HOIndexSet {
    int n = 0;
    double energy = 0.0;
    double nu = 0.0;
    double mu_n = 0.0;              ///< from the quantization condition
    double mu_from_energy = 0.0;    ///< sqrt(1 + 2 beta E m) / (hbar omega m beta) at E = E_n
    double a_n = 0.0;
    double c_n = 0.0;
    double s_n = 0.0;
    double r = 0.0;
    double sqrt_sr_n = 0.0;         ///< closed form of (sqrt(s + r))_n
    double sqrt_s_plus_r = 0.0;     ///< sqrt(s_n + r) evaluated directly
    double quantization_residual = 0.0;  ///< |1 + nu - mu + n| with mu from E_n

    // Identity checks, relative gaps.
    double gap_mu_minus_nu = 0.0;      ///< |(mu_n - nu) - a_n|
    double gap_neg_mu_minus_nu = 0.0;  ///< |(-mu_n - nu) - a_n|
    double gap_one_minus_mu = 0.0;     ///< |(1 - mu_n) - c_n|
    double gap_half_mu = 0.0;          ///< |mu_n / 2 - (sqrt(s + r))_n|
};

inline constexpr double kIndexTolerance = 1e-10;

/// Index set for level n. NumericalError if mu from E_n disagrees with mu_n.
[[nodiscard]] HOIndexSet ho_indices(const HOExactParams& params, int n);

/// sum_{k=0}^{n} (a)_k (-n)_k / ((c)_k k!) z^k.
/// PreconditionError when c is one of 0, -1, ..., -(n-1).
[[nodiscard]] std::complex<double> hyp2f1_terminating(double a, int n, double c, std::complex<double> z);

/// Normalised closed-form eigenfunction of level n. T: unit norm in dx/f;
/// K: the T form divided by sqrt(f), unit norm in dy. The phase makes the
/// lowest non-vanishing Taylor coefficient at x = 0 real and positive.
class HOEigenfunction {
public:
    HOEigenfunction(const HOExactParams& params, int n);

    [[nodiscard]] std::complex<double> operator()(double x, RepKind kind = RepKind::T) const;
    [[nodiscard]] Eigen::VectorXcd sample(const Eigen::VectorXd& nodes, RepKind kind = RepKind::T) const;

    [[nodiscard]] const HOIndexSet& indices() const noexcept { return idx_; }
    /// Normalisation constant; the same for T and K.
    [[nodiscard]] double normalization() const noexcept { return norm_; }

private:
    [[nodiscard]] std::complex<double> unnormalized(double x) const;

    HOExactParams params_;
    HOIndexSet idx_;
    double norm_ = 1.0;
    std::complex<double> phase_{1.0, 0.0};
};

[[nodiscard]] std::complex<double> ho_eigenfunction_exact(const HOExactParams& params, int n, double x,
                                                          RepKind kind);

}  // namespace gupeq
