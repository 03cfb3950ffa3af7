#pragma once

#include <cmath>
#include <string>

#include "gupeq/theory.hpp"

namespace gupeq::testing {

inline GupTheory theory_of(const std::string& f, double cutoff = 20.0, double hbar = 1.0) {
    TheoryOptions o;
    o.cutoff = cutoff;
    o.hbar = hbar;
    return GupTheory(make_deformation(f, {-cutoff, cutoff}), o);
}

inline double rel_diff(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); }

}  // namespace gupeq::testing
