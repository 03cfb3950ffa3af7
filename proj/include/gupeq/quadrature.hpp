#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "gupeq/errors.hpp"

namespace gupeq {

template <typename T>
struct QuadResult {
    T value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct SimpsonOptions {
    double abs_tol = 1e-10;
    int max_depth = 48;
    std::size_t max_evaluations = 20'000'000;
};

/// Adaptive Simpson with Richardson correction over [a, b] (a > b allowed,
/// giving the negated integral). Absolute tolerance; the local acceptance test
/// is floored at a few ulps of the local estimate so that round-off cannot
/// stall the bisection. Throws QuadratureError naming the failing interval.
template <typename F>
auto adaptive_simpson(F&& f, double a, double b, const SimpsonOptions& opt = {})
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    QuadResult<T> out;
    if (a == b) {
        return out;
    }
    if (a > b) {
        auto r = adaptive_simpson(f, b, a, opt);
        r.value = -r.value;
        return r;
    }

    struct Panel {
        double a, b;
        T fa, fm, fb;
        T whole;
        double tol;
        int depth;
    };

    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double m0 = 0.5 * (a + b);
    const T fa0 = f(a);
    const T fm0 = f(m0);
    const T fb0 = f(b);
    out.evaluations = 3;

    std::vector<Panel> stack;
    stack.push_back({a, b, fa0, fm0, fb0, (b - a) / 6.0 * (fa0 + 4.0 * fm0 + fb0), opt.abs_tol, 0});

    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double lm = 0.5 * (p.a + m);
        const double rm = 0.5 * (m + p.b);
        const T flm = f(lm);
        const T frm = f(rm);
        out.evaluations += 2;
        const T left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        const T right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        const T refined = left + right;
        const double delta = std::abs(refined - p.whole);
        const double floor = 64.0 * eps * (std::abs(left) + std::abs(right));
        if (!std::isfinite(delta)) {
            throw QuadratureError("non-finite integrand on [" + format_number(p.a) + ", " +
                                      format_number(p.b) + "]",
                                  p.a, p.b);
        }
        if (delta <= 15.0 * p.tol || delta <= floor) {
            out.value += refined + (refined - p.whole) / 15.0;
            out.error_estimate += delta / 15.0;
            continue;
        }
        if (p.depth >= opt.max_depth || out.evaluations > opt.max_evaluations) {
            throw QuadratureError("adaptive Simpson did not converge on [" + format_number(p.a) + ", " +
                                      format_number(p.b) + "]",
                                  p.a, p.b);
        }
        stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
        stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
    }
    return out;
}

}  // namespace gupeq
