#pragma once

#include <functional>
#include <limits>
#include <memory>

#include "gupeq/fexpr.hpp"

namespace gupeq {

struct TheoryOptions {
    double hbar = 1.0;
    double cutoff = 20.0;  ///< momentum cutoff X; grids live on [-X, X]
    double quad_tol = 1e-10;
    int octave_cap = 128;  ///< dyadic tail scan stops at [2^cap, 2^(cap+1)]
};

enum class LimitStatus { finite, infinite, indeterminate };

[[nodiscard]] const char* to_string(LimitStatus s);

/// One side of the antiderivative range: h(+inf) or h(-inf).
struct HLimit {
    LimitStatus status = LimitStatus::indeterminate;
    double value = std::numeric_limits<double>::quiet_NaN();  ///< +-inf when infinite
    double tail_estimate = std::numeric_limits<double>::quiet_NaN();
    int octaves = 0;

    [[nodiscard]] bool finite() const noexcept { return status == LimitStatus::finite; }
    [[nodiscard]] bool converged() const noexcept { return status != LimitStatus::indeterminate; }
};

/// Range of h(x) = int_0^x dt/f(t) over the real line.
struct HBounds {
    HLimit plus;
    HLimit minus;

    [[nodiscard]] bool determinate() const noexcept { return plus.converged() && minus.converged(); }
    [[nodiscard]] bool both_finite() const noexcept { return plus.finite() && minus.finite(); }
    /// h_plus - h_minus, +inf unless both sides are finite.
    [[nodiscard]] double total_measure() const noexcept;
};

/// Result of scanning dyadic octaves [2^k, 2^(k+1)] of a positive integrand.
struct TailScan {
    LimitStatus status = LimitStatus::indeterminate;
    double sum = 0.0;        ///< accumulated octaves (plus remainder when finite)
    double remainder = 0.0;  ///< geometric estimate of the unscanned tail
    int octaves = 0;
};

/// Shared divergence heuristic. `octave(k)` returns the integral over the k-th
/// octave. Finite: the last three octave ratios are <= 0.9 and the geometric
/// remainder is below `tol`. Infinite: the final four octaves scanned (at the
/// cap, or before the integrand overflowed) are non-decreasing. Otherwise
/// indeterminate.
[[nodiscard]] TailScan scan_octaves(const std::function<double(int)>& octave, double tol, int cap);

/// A validated deformation function together with hbar, the momentum cutoff,
/// and the quadrature tolerance. Immutable; copies share the memoised
/// h-limits.
class GupTheory {
public:
    explicit GupTheory(DeformationSpec f, TheoryOptions opt = {});

    [[nodiscard]] const DeformationSpec& deformation() const noexcept { return f_; }
    [[nodiscard]] const TheoryOptions& options() const noexcept { return opt_; }
    [[nodiscard]] double hbar() const noexcept { return opt_.hbar; }
    [[nodiscard]] double cutoff() const noexcept { return opt_.cutoff; }
    [[nodiscard]] double quad_tol() const noexcept { return opt_.quad_tol; }

    /// f(p); throws DomainError, or ValidationError if f(p) <= 0 off the sampled range.
    [[nodiscard]] double f(double p) const;

    /// int_a^b dt / f(t) without the cutoff restriction.
    [[nodiscard]] double integrate_inverse_f(double a, double b, double tol) const;

    /// Memoised h_limits.
    [[nodiscard]] const HBounds& h_bounds() const;

private:
    struct Cache;
    DeformationSpec f_;
    TheoryOptions opt_;
    std::shared_ptr<Cache> cache_;
};

/// h(x) = int_0^x dt/f(t), |x| <= cutoff.
[[nodiscard]] double h_of(const GupTheory& theory, double x);

/// Dyadic tail test on both sides; never throws for an indeterminate side,
/// the status says so.
[[nodiscard]] HBounds h_limits(const GupTheory& theory);

/// Inverse of h: root of h(x) = z for z strictly inside (h_minus, h_plus).
[[nodiscard]] double g_of(const GupTheory& theory, double z);

}  // namespace gupeq
