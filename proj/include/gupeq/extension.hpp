#pragma once

#include <cmath>
#include <numbers>

namespace gupeq {

/// Phase labelling a self-adjoint extension of the position operator.
/// Stored reduced to [0, 2*pi).
class ExtensionParam {
public:
    constexpr ExtensionParam() = default;
    explicit ExtensionParam(double lambda) : lambda_(wrap(lambda)) {}

    [[nodiscard]] double value() const noexcept { return lambda_; }

    static double wrap(double lambda) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double r = std::fmod(lambda, two_pi);
        if (r < 0.0) {
            r += two_pi;
        }
        return r >= two_pi ? 0.0 : r;
    }

private:
    double lambda_ = 0.0;
};

}  // namespace gupeq
