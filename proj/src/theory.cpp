#include "gupeq/theory.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "gupeq/quadrature.hpp"

namespace gupeq {

const char* to_string(LimitStatus s) {
    switch (s) {
        case LimitStatus::finite: return "finite";
        case LimitStatus::infinite: return "infinite";
        case LimitStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

double HBounds::total_measure() const noexcept {
    if (!both_finite()) {
        return std::numeric_limits<double>::infinity();
    }
    return plus.value - minus.value;
}

TailScan scan_octaves(const std::function<double(int)>& octave, double tol, int cap) {
    TailScan scan;
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(cap));
    for (int k = 0; k < cap; ++k) {
        const double v = octave(k);
        if (!std::isfinite(v)) {
            break;
        }
        t.push_back(v);
        scan.sum += v;
        scan.octaves = k + 1;
        const std::size_t n = t.size();
        if (n < 4) {
            continue;
        }
        if (t[n - 1] == 0.0 && t[n - 2] == 0.0) {
            scan.status = LimitStatus::finite;
            scan.remainder = 0.0;
            return scan;
        }
        double ratio = 0.0;
        bool ratios_defined = true;
        for (std::size_t j = n - 3; j < n; ++j) {
            if (t[j - 1] <= 0.0) {
                ratios_defined = false;
                break;
            }
            ratio = std::max(ratio, t[j] / t[j - 1]);
        }
        if (ratios_defined && ratio <= 0.9) {
            const double remainder = t[n - 1] * ratio / (1.0 - ratio);
            if (remainder < tol) {
                scan.status = LimitStatus::finite;
                scan.remainder = remainder;
                scan.sum += remainder;
                return scan;
            }
        }
    }
    const std::size_t n = t.size();
    if (n >= 4 && t[n - 4] <= t[n - 3] && t[n - 3] <= t[n - 2] && t[n - 2] <= t[n - 1]) {
        scan.status = LimitStatus::infinite;
        scan.sum = std::numeric_limits<double>::infinity();
        scan.remainder = std::numeric_limits<double>::infinity();
    }
    return scan;
}

struct GupTheory::Cache {
    std::once_flag once;
    HBounds bounds;
};

GupTheory::GupTheory(DeformationSpec f, TheoryOptions opt)
    : f_(std::move(f)), opt_(opt), cache_(std::make_shared<Cache>()) {
    if (!(opt_.hbar > 0.0) || !std::isfinite(opt_.hbar)) {
        throw ValidationError("hbar must be a positive finite number");
    }
    if (!(opt_.cutoff > 0.0) || !std::isfinite(opt_.cutoff)) {
        throw ValidationError("momentum cutoff X must be a positive finite number");
    }
    const double slack = 1e-12 * opt_.cutoff;
    if (-opt_.cutoff < f_.sample_range.p_min - slack || opt_.cutoff > f_.sample_range.p_max + slack) {
        throw ValidationError("momentum cutoff X = " + format_number(opt_.cutoff) +
                              " lies outside the validated sample range of f");
    }
    if (!(opt_.quad_tol > 0.0)) {
        throw ValidationError("quadrature tolerance must be > 0");
    }
    if (opt_.octave_cap < 8) {
        throw ValidationError("octave cap must be at least 8");
    }
}

double GupTheory::f(double p) const {
    const double v = f_.ast.eval(p);
    if (!(v > 0.0)) {
        throw ValidationError("f(p) = " + format_number(v) + " is not positive at p = " + format_number(p));
    }
    return v;
}

double GupTheory::integrate_inverse_f(double a, double b, double tol) const {
    SimpsonOptions opt;
    opt.abs_tol = tol;
    return adaptive_simpson([this](double t) { return 1.0 / f(t); }, a, b, opt).value;
}

const HBounds& GupTheory::h_bounds() const {
    std::call_once(cache_->once, [this] { cache_->bounds = h_limits(*this); });
    return cache_->bounds;
}

double h_of(const GupTheory& theory, double x) {
    const double X = theory.cutoff();
    if (!(std::fabs(x) <= X * (1.0 + 1e-12))) {
        throw PreconditionError("h_of: |x| = " + format_number(std::fabs(x)) + " exceeds the cutoff " +
                                format_number(X));
    }
    if (x == 0.0) {
        return 0.0;
    }
    return theory.integrate_inverse_f(0.0, x, theory.quad_tol());
}

namespace {

HLimit scan_side(const GupTheory& theory, double sign) {
    const double tol = theory.quad_tol();
    const double base = std::fabs(theory.integrate_inverse_f(0.0, sign, 0.25 * tol));
    auto octave = [&](int k) -> double {
        const double lo = std::ldexp(1.0, k);
        const double hi = std::ldexp(1.0, k + 1);
        try {
            return std::fabs(theory.integrate_inverse_f(sign * lo, sign * hi, std::ldexp(tol, -(k + 2))));
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const TailScan scan = scan_octaves(octave, tol, theory.options().octave_cap);
    HLimit out;
    out.status = scan.status;
    out.octaves = scan.octaves;
    switch (scan.status) {
        case LimitStatus::finite:
            out.value = sign * (base + scan.sum);
            out.tail_estimate = scan.remainder;
            break;
        case LimitStatus::infinite:
            out.value = sign * std::numeric_limits<double>::infinity();
            out.tail_estimate = std::numeric_limits<double>::infinity();
            break;
        case LimitStatus::indeterminate:
            break;
    }
    return out;
}

}  // namespace

HBounds h_limits(const GupTheory& theory) {
    HBounds b;
    b.plus = scan_side(theory, +1.0);
    b.minus = scan_side(theory, -1.0);
    return b;
}

double g_of(const GupTheory& theory, double z) {
    const HBounds& bounds = theory.h_bounds();
    if (bounds.plus.finite() && !(z < bounds.plus.value)) {
        throw PreconditionError("g_of: z = " + format_number(z) + " is not below h_plus = " +
                                format_number(bounds.plus.value));
    }
    if (bounds.minus.finite() && !(z > bounds.minus.value)) {
        throw PreconditionError("g_of: z = " + format_number(z) + " is not above h_minus = " +
                                format_number(bounds.minus.value));
    }
    if (z == 0.0) {
        return 0.0;
    }
    const double sign = z > 0.0 ? 1.0 : -1.0;
    const double target = std::fabs(z);
    const double tol = 0.25 * theory.quad_tol();

    // H(x) = sign * h(sign * x) is increasing on [0, inf) with H(0) = 0.
    auto piece = [&](double a, double b) { return sign * theory.integrate_inverse_f(sign * a, sign * b, tol); };

    double lo = 0.0;
    double h_lo = 0.0;
    double hi = 1.0;
    double h_hi = piece(0.0, 1.0);
    const int cap = theory.options().octave_cap;
    for (int k = 0; h_hi < target; ++k) {
        if (k > cap) {
            throw PreconditionError("g_of: z = " + format_number(z) + " lies beyond the range of h");
        }
        lo = hi;
        h_lo = h_hi;
        hi *= 2.0;
        h_hi = h_lo + piece(lo, hi);
    }

    // Safeguarded Newton: H'(x) = 1/f(sign * x).
    double x = lo + (hi - lo) * (target - h_lo) / (h_hi - h_lo);
    for (int it = 0; it < 200; ++it) {
        const double hx = h_lo + piece(lo, x);
        const double r = hx - target;
        if (std::fabs(r) <= theory.quad_tol()) {
            return sign * x;
        }
        if (r > 0.0) {
            hi = x;
            h_hi = hx;
        } else {
            lo = x;
            h_lo = hx;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(hi)) {
            return sign * x;
        }
        double next = x - r * theory.f(sign * x);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        x = next;
    }
    throw NumericalError("g_of: Newton/bisection did not converge for z = " + format_number(z));
}

}  // namespace gupeq
